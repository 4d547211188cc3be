#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "rift/neural.hpp"
#include "rift/trading_env.hpp"

namespace rift {

struct PpoConfig {
  int buffer_size = 1024;
  int epochs = 10;
  int minibatch_size = 64;
  double clip_epsilon = 0.2;
  double gae_lambda = 0.95;
  double gamma = 1.0;  // finite-horizon intraday episodes, no discounting
  double value_coef = 0.5;
  double entropy_coef = 0.01;
  double learning_rate = 1e-4;
  int max_iterations = 200;
  int patience = 3;                       // consecutive non-improving evals
  double validation_commission = 0.0001;  // 1 bp, fixed evaluation fee
};

struct RolloutBuffer {
  std::vector<Eigen::Matrix<double, 8, 1>> observations;
  std::vector<int> actions;
  std::vector<double> log_probs;
  std::vector<double> rewards;
  std::vector<double> values;
  std::vector<std::uint8_t> dones;  // episode ended at this step
  double bootstrap_value = 0.0;     // V(s_next) when truncated mid-episode
  bool truncated = false;

  std::size_t size() const { return rewards.size(); }
  int completed_episodes() const;
};

struct AdvantageResult {
  std::vector<double> advantages;      // normalized (zero mean, unit variance)
  std::vector<double> raw_advantages;  // pre-normalization GAE values
  std::vector<double> return_targets;  // raw_advantage + value
  bool normalized = true;              // false when variance was degenerate
};

/// Cycles training days in order, persisting a partially played episode
/// across rollout buffers.
class EpisodeStream {
 public:
  EpisodeStream(std::span<const TradingDay> days, const EnvConfig& config);

  /// Observation the agent currently faces; starts a new episode if needed.
  const Vector8d& current_observation();
  StepOutcome step(int action);
  double reward_of(const StepOutcome& out) const;

 private:
  std::vector<const TradingDay*> days_;
  EnvConfig config_;
  std::size_t next_day_ = 0;
  std::optional<TradingEnv> env_;
  Vector8d obs_ = Vector8d::Zero();
  bool have_obs_ = false;
};

RolloutBuffer collect_rollout(EpisodeStream& stream, const NetParams& params,
                              std::mt19937_64& rng, int buffer_size = 1024);

AdvantageResult compute_advantages(const RolloutBuffer& buffer, double gamma,
                                   double lambda);

struct UpdateDiagnostics {
  double mean_loss = 0.0;
  int minibatches = 0;
};

UpdateDiagnostics ppo_update(NetParams& params, const RolloutBuffer& buffer,
                             const PpoConfig& config, AdamState& adam,
                             std::mt19937_64& rng);

/// Greedy argmax action; ties resolve to action 0.
int greedy_action(const NetParams& params, const Vector8d& obs);

/// Compounded cumulative return of the greedy policy over the given days,
/// using reinforcement feedback at `commission` and the first decision
/// minute's open price as the per-day return base.
double greedy_cumulative_return(std::span<const TradingDay> days,
                                const NetParams& params, const EnvConfig& env_config,
                                double commission);

struct TrainRecord {
  int iteration = 0;
  double mean_step_reward = 0.0;
  double validation_return = 0.0;
  int early_stop_counter = 0;
  bool stopped = false;
};

struct TrainResult {
  NetParams best_params;
  double best_validation_return = 0.0;
  std::vector<TrainRecord> history;
  bool early_stopped = false;
};

/// Full training loop: collect/update until a pass over the training days
/// completes, then evaluate on validation days; stops after `patience`
/// consecutive non-improvements and returns the best-validation checkpoint.
TrainResult train(std::span<const TradingDay> train_days,
                  std::span<const TradingDay> validation_days,
                  const EnvConfig& env_config, const PpoConfig& ppo_config,
                  std::uint64_t seed);

}  // namespace rift
