#include "rift/run_config.hpp"

#include <fstream>
#include <stdexcept>

namespace rift {

namespace {

std::string kind_name(SyntheticKind k) {
  switch (k) {
    case SyntheticKind::RandomWalk: return "random-walk";
    case SyntheticKind::DeterministicTrend: return "deterministic-trend";
    case SyntheticKind::Sinusoid: return "sinusoid";
  }
  return "random-walk";
}

SyntheticKind kind_from_name(const std::string& name) {
  if (name == "random-walk") return SyntheticKind::RandomWalk;
  if (name == "deterministic-trend") return SyntheticKind::DeterministicTrend;
  if (name == "sinusoid") return SyntheticKind::Sinusoid;
  throw std::invalid_argument("unknown synthetic kind '" + name + "'");
}

}  // namespace

EnvConfig RunConfig::env_config() const {
  EnvConfig env;
  env.trading_commission = phi_bps * 1e-4;
  env.expert_commission = theta_bps * 1e-4;
  if (reward_mode == "RIF") env.reward_mode = RewardMode::RIF;
  else if (reward_mode == "RF") env.reward_mode = RewardMode::RF;
  else throw std::invalid_argument("reward_mode must be RF or RIF");
  env.charge_exit_commission = charge_exit_commission;
  env.indicators = indicators;
  return env;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  if (csv_path) j["data"]["csv_path"] = *csv_path;
  if (synthetic) {
    auto& s = j["data"]["synthetic"];
    s["kind"] = kind_name(synthetic->kind);
    s["length_days"] = synthetic->length_days;
    s["volatility"] = synthetic->volatility;
    s["drift"] = synthetic->drift;
    s["base_price"] = synthetic->base_price;
    s["seed"] = synthetic->seed;
    s["start_date"] = {synthetic->start_year, synthetic->start_month,
                       synthetic->start_day};
  }

  auto& ind = j["indicators"];
  ind["periods"] = {indicators.williams_period, indicators.rsi_period,
                    indicators.cci_period, indicators.uo_short, indicators.uo_mid,
                    indicators.uo_long, indicators.adx_period, indicators.roc_period};
  ind["cci_bounds"] = {indicators.cci_lo, indicators.cci_hi};
  ind["roc_bounds"] = {indicators.roc_lo, indicators.roc_hi};
  ind["first_decision_minute"] = indicators.first_decision_minute;
  ind["forced_exit_minute"] = indicators.forced_exit_minute;

  auto& env = j["env"];
  env["phi_bps"] = phi_bps;
  env["theta_bps"] = theta_bps;
  env["reward_mode"] = reward_mode;
  env["charge_exit_commission"] = charge_exit_commission;

  auto& p = j["ppo"];
  p["buffer_size"] = ppo.buffer_size;
  p["epochs"] = ppo.epochs;
  p["minibatch_size"] = ppo.minibatch_size;
  p["clip_epsilon"] = ppo.clip_epsilon;
  p["gae_lambda"] = ppo.gae_lambda;
  p["value_coef"] = ppo.value_coef;
  p["entropy_coef"] = ppo.entropy_coef;
  p["learning_rate"] = ppo.learning_rate;
  p["max_iterations"] = ppo.max_iterations;
  p["patience"] = ppo.patience;

  j["grid"]["theta_bps"] = theta_grid_bps;
  j["grid"]["phi_bps"] = phi_grid_bps;
  j["window"] = {{"train_months", train_months},
                 {"val_months", val_months},
                 {"test_months", test_months}};
  j["seed"] = seed;
  j["out_dir"] = out_dir;
  return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig c;
  if (j.contains("data")) {
    const auto& d = j["data"];
    if (d.contains("csv_path")) c.csv_path = d["csv_path"].get<std::string>();
    if (d.contains("synthetic")) {
      const auto& s = d["synthetic"];
      SyntheticSpec spec;
      spec.kind = kind_from_name(s.value("kind", "random-walk"));
      spec.length_days = s.value("length_days", 1);
      spec.volatility = s.value("volatility", 0.001);
      spec.drift = s.value("drift", 0.0);
      spec.base_price = s.value("base_price", 100.0);
      spec.seed = s.value("seed", 0ull);
      if (s.contains("start_date")) {
        spec.start_year = s["start_date"][0];
        spec.start_month = s["start_date"][1];
        spec.start_day = s["start_date"][2];
      }
      c.synthetic = spec;
    }
  }
  if (j.contains("indicators")) {
    const auto& ind = j["indicators"];
    if (ind.contains("periods")) {
      const auto& p = ind["periods"];
      c.indicators.williams_period = p[0];
      c.indicators.rsi_period = p[1];
      c.indicators.cci_period = p[2];
      c.indicators.uo_short = p[3];
      c.indicators.uo_mid = p[4];
      c.indicators.uo_long = p[5];
      c.indicators.adx_period = p[6];
      c.indicators.roc_period = p[7];
    }
    if (ind.contains("cci_bounds")) {
      c.indicators.cci_lo = ind["cci_bounds"][0];
      c.indicators.cci_hi = ind["cci_bounds"][1];
    }
    if (ind.contains("roc_bounds")) {
      c.indicators.roc_lo = ind["roc_bounds"][0];
      c.indicators.roc_hi = ind["roc_bounds"][1];
    }
    c.indicators.first_decision_minute =
        ind.value("first_decision_minute", c.indicators.first_decision_minute);
    c.indicators.forced_exit_minute =
        ind.value("forced_exit_minute", c.indicators.forced_exit_minute);
  }
  if (j.contains("env")) {
    const auto& env = j["env"];
    c.phi_bps = env.value("phi_bps", c.phi_bps);
    c.theta_bps = env.value("theta_bps", c.theta_bps);
    c.reward_mode = env.value("reward_mode", c.reward_mode);
    c.charge_exit_commission =
        env.value("charge_exit_commission", c.charge_exit_commission);
  }
  if (j.contains("ppo")) {
    const auto& p = j["ppo"];
    c.ppo.buffer_size = p.value("buffer_size", c.ppo.buffer_size);
    c.ppo.epochs = p.value("epochs", c.ppo.epochs);
    c.ppo.minibatch_size = p.value("minibatch_size", c.ppo.minibatch_size);
    c.ppo.clip_epsilon = p.value("clip_epsilon", c.ppo.clip_epsilon);
    c.ppo.gae_lambda = p.value("gae_lambda", c.ppo.gae_lambda);
    c.ppo.value_coef = p.value("value_coef", c.ppo.value_coef);
    c.ppo.entropy_coef = p.value("entropy_coef", c.ppo.entropy_coef);
    c.ppo.learning_rate = p.value("learning_rate", c.ppo.learning_rate);
    c.ppo.max_iterations = p.value("max_iterations", c.ppo.max_iterations);
    c.ppo.patience = p.value("patience", c.ppo.patience);
  }
  if (j.contains("grid")) {
    c.theta_grid_bps = j["grid"].value("theta_bps", std::vector<double>{});
    c.phi_grid_bps = j["grid"].value("phi_bps", std::vector<double>{});
  }
  if (j.contains("window")) {
    c.train_months = j["window"].value("train_months", c.train_months);
    c.val_months = j["window"].value("val_months", c.val_months);
    c.test_months = j["window"].value("test_months", c.test_months);
  }
  c.seed = j.value("seed", c.seed);
  c.out_dir = j.value("out_dir", c.out_dir);
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t RunConfig::hash() const { return fnv1a(to_json().dump()); }

std::vector<TradingDay> load_days(const RunConfig& config) {
  if (config.csv_path) {
    auto bars = parse_ohlcv_file(*config.csv_path);
    return segment_days(bars);
  }
  if (config.synthetic) return generate_synthetic(*config.synthetic);
  throw std::invalid_argument("config has no data source (csv_path or synthetic)");
}

}  // namespace rift
