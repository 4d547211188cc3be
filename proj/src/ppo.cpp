#include "rift/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rift {

int RolloutBuffer::completed_episodes() const {
  int n = 0;
  for (auto d : dones) n += d;
  return n;
}

EpisodeStream::EpisodeStream(std::span<const TradingDay> days, const EnvConfig& config)
    : config_(config) {
  for (const auto& d : days) {
    if (!d.incomplete) days_.push_back(&d);
  }
  if (days_.empty()) throw std::invalid_argument("EpisodeStream: no usable days");
}

const Vector8d& EpisodeStream::current_observation() {
  if (!have_obs_) {
    env_.emplace(*days_[next_day_], config_);
    next_day_ = (next_day_ + 1) % days_.size();
    obs_ = env_->reset();
    have_obs_ = true;
  }
  return obs_;
}

StepOutcome EpisodeStream::step(int action) {
  current_observation();  // ensure an episode is live
  StepOutcome out = env_->step(action);
  if (out.done) {
    have_obs_ = false;
  } else {
    obs_ = out.observation;
  }
  return out;
}

double EpisodeStream::reward_of(const StepOutcome& out) const {
  return config_.reward_mode == RewardMode::RIF ? out.r_rif : out.r_rf;
}

RolloutBuffer collect_rollout(EpisodeStream& stream, const NetParams& params,
                              std::mt19937_64& rng, int buffer_size) {
  RolloutBuffer buf;
  buf.observations.reserve(buffer_size);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  for (int i = 0; i < buffer_size; ++i) {
    Vector8d obs = stream.current_observation();
    auto fwd = forward(params, obs);
    int action = uniform(rng) < fwd.probs[0] ? 0 : 1;  // inverse CDF
    StepOutcome out = stream.step(action);

    buf.observations.push_back(obs);
    buf.actions.push_back(out.action_taken);
    buf.log_probs.push_back(fwd.log_probs[out.action_taken]);
    buf.rewards.push_back(stream.reward_of(out));
    buf.values.push_back(fwd.value);
    buf.dones.push_back(out.done ? 1 : 0);
  }

  if (buf.dones.back() == 0) {
    buf.truncated = true;
    buf.bootstrap_value = forward(params, stream.current_observation()).value;
  }
  return buf;
}

AdvantageResult compute_advantages(const RolloutBuffer& buffer, double gamma,
                                   double lambda) {
  const std::size_t n = buffer.size();
  if (n == 0) throw std::invalid_argument("compute_advantages: empty buffer");

  AdvantageResult res;
  res.raw_advantages.assign(n, 0.0);
  double next_adv = 0.0;
  double next_value = buffer.truncated ? buffer.bootstrap_value : 0.0;
  for (std::size_t i = n; i-- > 0;) {
    double not_done = buffer.dones[i] ? 0.0 : 1.0;
    double delta =
        buffer.rewards[i] + gamma * next_value * not_done - buffer.values[i];
    next_adv = delta + gamma * lambda * not_done * next_adv;
    res.raw_advantages[i] = next_adv;
    next_value = buffer.values[i];
  }

  res.return_targets.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    res.return_targets[i] = res.raw_advantages[i] + buffer.values[i];
  }

  double mean = std::accumulate(res.raw_advantages.begin(), res.raw_advantages.end(),
                                0.0) /
                static_cast<double>(n);
  double var = 0.0;
  for (double a : res.raw_advantages) var += (a - mean) * (a - mean);
  var /= static_cast<double>(n);

  res.advantages.resize(n);
  if (var <= 1e-300) {
    // degenerate: all advantages equal, keep them un-normalized
    res.advantages = res.raw_advantages;
    res.normalized = false;
  } else {
    double inv_std = 1.0 / std::sqrt(var);
    for (std::size_t i = 0; i < n; ++i) {
      res.advantages[i] = (res.raw_advantages[i] - mean) * inv_std;
    }
  }
  return res;
}

UpdateDiagnostics ppo_update(NetParams& params, const RolloutBuffer& buffer,
                             const PpoConfig& config, AdamState& adam,
                             std::mt19937_64& rng) {
  const std::size_t n = buffer.size();
  if (static_cast<int>(n) != config.buffer_size) {
    throw std::invalid_argument("ppo_update: buffer not full");
  }
  if (config.buffer_size % config.minibatch_size != 0) {
    throw std::invalid_argument("minibatch size must divide buffer size");
  }

  auto adv = compute_advantages(buffer, config.gamma, config.gae_lambda);

  LossSpec spec;
  spec.clip_epsilon = config.clip_epsilon;
  spec.value_coef = config.value_coef;
  spec.entropy_coef = config.entropy_coef;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  UpdateDiagnostics diag;
  double loss_sum = 0.0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n; start += config.minibatch_size) {
      std::vector<LossSample> batch(config.minibatch_size);
      for (int k = 0; k < config.minibatch_size; ++k) {
        std::size_t idx = order[start + k];
        batch[k].obs = buffer.observations[idx];
        batch[k].action = buffer.actions[idx];
        batch[k].old_log_prob = buffer.log_probs[idx];
        batch[k].advantage = adv.advantages[idx];
        batch[k].return_target = adv.return_targets[idx];
      }
      double loss = ppo_loss(params, batch, spec);
      if (!std::isfinite(loss)) {
        throw std::runtime_error("ppo_update: non-finite loss at epoch " +
                                 std::to_string(epoch) + ", minibatch " +
                                 std::to_string(start / config.minibatch_size));
      }
      NetParams grads = backward(params, batch, spec);
      adam_step(params, grads, adam);
      loss_sum += loss;
      ++diag.minibatches;
    }
  }
  diag.mean_loss = diag.minibatches ? loss_sum / diag.minibatches : 0.0;
  return diag;
}

int greedy_action(const NetParams& params, const Vector8d& obs) {
  auto fwd = forward(params, obs);
  return fwd.probs[1] > fwd.probs[0] ? 1 : 0;
}

double greedy_cumulative_return(std::span<const TradingDay> days,
                                const NetParams& params, const EnvConfig& env_config,
                                double commission) {
  EnvConfig cfg = env_config;
  cfg.trading_commission = commission;
  double equity = 1.0;
  for (const auto& day : days) {
    if (day.incomplete) continue;
    TradingEnv env(day, cfg);
    Vector8d obs = env.reset();
    double pnl = 0.0;
    double base = day.bars[env.first_decision_index()].open;
    while (!env.done()) {
      StepOutcome out = env.step(greedy_action(params, obs));
      pnl += out.r_rf;
      obs = out.observation;
    }
    equity *= 1.0 + pnl / base;
  }
  return equity - 1.0;
}

TrainResult train(std::span<const TradingDay> train_days,
                  std::span<const TradingDay> validation_days,
                  const EnvConfig& env_config, const PpoConfig& ppo_config,
                  std::uint64_t seed) {
  if (train_days.empty() || validation_days.empty()) {
    throw std::invalid_argument("train: empty train or validation window");
  }

  std::mt19937_64 rng(seed);
  NetParams params = init_params(seed);
  AdamState adam;
  adam.lr = ppo_config.learning_rate;

  EpisodeStream stream(train_days, env_config);

  TrainResult result;
  result.best_params = params;
  result.best_validation_return = -std::numeric_limits<double>::infinity();

  int episodes_since_eval = 0;
  int no_improve = 0;
  const int episodes_per_pass = static_cast<int>(train_days.size());

  for (int iter = 0; iter < ppo_config.max_iterations; ++iter) {
    RolloutBuffer buffer = collect_rollout(stream, params, rng, ppo_config.buffer_size);
    ppo_update(params, buffer, ppo_config, adam, rng);

    TrainRecord rec;
    rec.iteration = iter;
    rec.mean_step_reward =
        std::accumulate(buffer.rewards.begin(), buffer.rewards.end(), 0.0) /
        static_cast<double>(buffer.size());

    episodes_since_eval += buffer.completed_episodes();
    if (episodes_since_eval >= episodes_per_pass) {
      episodes_since_eval = 0;
      double val = greedy_cumulative_return(validation_days, params, env_config,
                                            ppo_config.validation_commission);
      rec.validation_return = val;
      if (val > result.best_validation_return) {
        result.best_validation_return = val;
        result.best_params = params;
        no_improve = 0;
      } else {
        ++no_improve;
      }
      rec.early_stop_counter = no_improve;
      if (no_improve >= ppo_config.patience) {
        rec.stopped = true;
        result.early_stopped = true;
        result.history.push_back(rec);
        break;
      }
    } else {
      rec.validation_return = result.best_validation_return;
      rec.early_stop_counter = no_improve;
    }
    result.history.push_back(rec);
  }
  return result;
}

}  // namespace rift
