#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "rift/evaluation.hpp"
#include "rift/run_config.hpp"

namespace fs = std::filesystem;
using namespace rift;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitRuntime = 4;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string provenance_line(const RunConfig& config) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "# config_hash=%016llx seed=%llu",
                static_cast<unsigned long long>(config.hash()),
                static_cast<unsigned long long>(config.seed));
  return buf;
}

std::ofstream open_output(const fs::path& path) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

RunConfig load_config_arg(const std::string& path) {
  try {
    return RunConfig::load(path);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config: ") + e.what());
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
}

// simple fallback split when the dataset is too short for calendar windows:
// last quarter of the days becomes validation
std::pair<std::span<const TradingDay>, std::span<const TradingDay>> simple_split(
    std::span<const TradingDay> days) {
  std::size_t n_val = std::max<std::size_t>(1, days.size() / 4);
  std::size_t n_train = days.size() - n_val;
  if (n_train == 0) throw std::runtime_error("not enough days to split");
  return {days.subspan(0, n_train), days.subspan(n_train)};
}

int cmd_label(const RunConfig& config, const std::string& input, double theta_bps,
              int terminal_label, const std::string& out_dir) {
  RunConfig cfg = config;
  if (!input.empty()) {
    cfg.csv_path = input;
    cfg.synthetic.reset();
  }
  auto days = load_days(cfg);
  if (days.empty()) throw std::runtime_error("no trading days in input");

  fs::create_directories(out_dir);
  double theta = theta_bps * 1e-4;
  for (const auto& day : days) {
    std::vector<double> closes(day.bars.size());
    for (std::size_t i = 0; i < closes.size(); ++i) closes[i] = day.bars[i].close;
    auto labels = oracle_labels(closes, theta,
                                static_cast<std::uint8_t>(terminal_label));
    auto out = open_output(fs::path(out_dir) / ("labels_" + day.date_string() + ".csv"));
    out << provenance_line(cfg) << "\n";
    out << "timestamp,close,label\n";
    for (std::size_t i = 0; i < closes.size(); ++i) {
      out << format_timestamp(day.bars[i].ts) << ',' << closes[i] << ','
          << int(labels.labels[i]) << "\n";
    }
  }
  std::cout << "labeled " << days.size() << " day(s) at " << theta_bps
            << " bps into " << out_dir << "\n";
  return 0;
}

int cmd_train(const RunConfig& config, const std::string& out_dir) {
  auto days = load_days(config);
  if (days.empty()) throw std::runtime_error("no trading days in input");

  auto [train_days, val_days] = simple_split(days);
  EnvConfig env = config.env_config();
  fit_bounds(env.indicators, train_days);

  TrainResult result = rift::train(train_days, val_days, env, config.ppo, config.seed);

  fs::create_directories(out_dir);
  save_checkpoint(result.best_params, config.seed, config.hash(),
                  (fs::path(out_dir) / "checkpoint.json").string());

  auto hist = open_output(fs::path(out_dir) / "history.csv");
  hist << provenance_line(config) << "\n";
  hist << "iteration,mean_step_reward,validation_return,early_stop_counter,stopped\n";
  for (const auto& rec : result.history) {
    hist << rec.iteration << ',' << rec.mean_step_reward << ','
         << rec.validation_return << ',' << rec.early_stop_counter << ','
         << (rec.stopped ? 1 : 0) << "\n";
  }
  std::cout << "best validation return: " << result.best_validation_return
            << (result.early_stopped ? " (early stopped)" : "") << "\n";
  return 0;
}

void write_reports(const RunConfig& config, const std::string& tag,
                   const BacktestResult& bt, double phi, const fs::path& out_dir) {
  auto trades = extract_trades(bt.log, phi);
  auto tstats = trade_statistics(trades);

  auto tout = open_output(out_dir / ("trade_stats_" + tag + ".csv"));
  tout << provenance_line(config) << "\n";
  tout << "strategy,num_trades,winrate_pct,mean_positive_pct,mean_negative_pct,"
          "avg_holding_minutes\n";
  tout << tag << ',' << tstats.num_trades << ',' << tstats.winrate_pct << ','
       << tstats.mean_positive_pct << ',' << tstats.mean_negative_pct << ','
       << tstats.avg_holding_minutes << "\n";

  auto rout = open_output(out_dir / ("return_stats_" + tag + ".csv"));
  rout << provenance_line(config) << "\n";
  rout << "strategy,ann_mean_pct,ann_vol_pct,mdd_pct,sharpe\n";
  if (bt.daily_returns.size() >= 2) {
    auto rstats = return_statistics(bt.daily_returns);
    rout << tag << ',' << rstats.annualized_mean_pct << ',' << rstats.annualized_vol_pct
         << ',' << rstats.max_drawdown_pct << ','
         << (rstats.sharpe_defined ? std::to_string(rstats.sharpe) : "undefined")
         << "\n";
  }

  nlohmann::json j;
  j["config_hash"] = config.hash();
  j["seed"] = config.seed;
  j["strategy"] = tag;
  j["num_trades"] = tstats.num_trades;
  j["winrate_pct"] = tstats.winrate_pct;
  j["daily_returns"] = bt.daily_returns;
  auto jout = open_output(out_dir / ("summary_" + tag + ".json"));
  jout << j.dump(2) << "\n";
}

int cmd_evaluate(const RunConfig& config, const std::string& checkpoint,
                 const std::string& out_dir) {
  auto days = load_days(config);
  if (days.empty()) throw std::runtime_error("no trading days in input");

  NetParams params = load_checkpoint(checkpoint);
  EnvConfig env = config.env_config();
  auto bt = backtest(days, params, env);
  write_reports(config, config.reward_mode, bt, env.trading_commission, out_dir);
  std::cout << "evaluated " << bt.daily_returns.size() << " day(s), "
            << extract_trades(bt.log, env.trading_commission).size() << " trade(s)\n";
  return 0;
}

int cmd_scatter(const RunConfig& config, int steps, const std::string& out_path) {
  auto days = load_days(config);
  auto points = reward_scatter(days, config.env_config(), steps, config.seed);
  auto out = open_output(out_path);
  out << provenance_line(config) << "\n";
  out << "r_rf,r_rif,y,a\n";
  for (const auto& p : points) {
    out << p.r_rf << ',' << p.r_rif << ',' << p.label << ',' << p.action << "\n";
  }
  std::cout << "wrote " << points.size() << " scatter points to " << out_path << "\n";
  return 0;
}

int cmd_report(const RunConfig& config, int jobs, const std::string& out_dir) {
  auto days = load_days(config);
  if (days.empty()) throw std::runtime_error("no trading days in input");

  auto theta_grid = config.theta_grid_bps;
  auto phi_grid = config.phi_grid_bps;
  auto to_frac = [](std::vector<double>& bps) {
    for (auto& v : bps) v *= 1e-4;
  };
  if (theta_grid.empty()) theta_grid = {0.5, 1, 2, 3, 4, 5, 10, 20};
  if (phi_grid.empty()) phi_grid = {0.5, 1, 2, 3, 4, 5, 10, 20};
  to_frac(theta_grid);
  to_frac(phi_grid);

  std::span<const TradingDay> all(days);
  std::vector<RollingWindow> windows;
  try {
    windows = make_windows(all, config.train_months, config.val_months,
                           config.test_months);
  } catch (const std::invalid_argument&) {
    // desk-scale fallback: one pseudo-window, 60/20/20 day split
    RollingWindow w;
    int n = static_cast<int>(days.size());
    w.train_begin = 0;
    w.train_end = std::max(1, 3 * n / 5);
    w.val_begin = w.train_end;
    w.val_end = std::max(w.val_begin + 1, 4 * n / 5);
    w.test_begin = w.val_end;
    w.test_end = n;
    if (w.test_begin >= w.test_end) throw std::runtime_error("dataset too small");
    windows.push_back(w);
  }

  const fs::path out(out_dir);
  fs::create_directories(out);

  for (const std::string mode : {"RIF", "RF"}) {
    BacktestResult combined;
    RunConfig cfg = config;
    cfg.reward_mode = mode;
    for (std::size_t wi = 0; wi < windows.size(); ++wi) {
      const auto& w = windows[wi];
      auto train_days = all.subspan(w.train_begin, w.train_end - w.train_begin);
      auto val_days = all.subspan(w.val_begin, w.val_end - w.val_begin);
      auto test_days = all.subspan(w.test_begin, w.test_end - w.test_begin);

      EnvConfig env = cfg.env_config();
      fit_bounds(env.indicators, train_days);
      std::uint64_t wseed = cfg.seed + 1000003ull * wi;

      auto grid = grid_search(train_days, val_days, theta_grid, phi_grid, env,
                              cfg.ppo, wseed, jobs);
      const GridCellResult* best = nullptr;
      for (const auto& cell : grid.cells) {
        if (cell.expert_commission == grid.best_theta &&
            cell.trading_commission == grid.best_phi) {
          best = &cell;
        }
      }
      EnvConfig test_env = env;
      test_env.expert_commission = grid.best_theta;
      test_env.trading_commission = cfg.ppo.validation_commission;
      auto bt = backtest(test_days, best->train_result.best_params, test_env);
      combined.log.insert(combined.log.end(), bt.log.begin(), bt.log.end());
      combined.daily_returns.insert(combined.daily_returns.end(),
                                    bt.daily_returns.begin(), bt.daily_returns.end());
      combined.dates.insert(combined.dates.end(), bt.dates.begin(), bt.dates.end());
    }
    write_reports(cfg, mode, combined, cfg.ppo.validation_commission, out);
  }

  // buy-and-hold benchmark: long from the first decision minute to forced exit
  {
    BacktestResult bh;
    EnvConfig env = config.env_config();
    env.trading_commission = config.ppo.validation_commission;
    for (const auto& day : days) {
      if (day.incomplete) continue;
      TradingEnv envd(day, env);
      envd.reset();
      double pnl = 0.0;
      double base = day.bars[envd.first_decision_index()].open;
      int prev_action = 0;
      while (!envd.done()) {
        int t = envd.current_index();
        StepOutcome o = envd.step(1);
        StepLogRecord rec;
        rec.date = day.date_string();
        rec.minute = day.bars[t].ts.minute_of_day;
        rec.action = o.action_taken;
        rec.prev_action = prev_action;
        rec.label = o.label;
        rec.r_rf = o.r_rf;
        rec.r_if = o.r_if;
        rec.r_rif = o.r_rif;
        rec.open_next = day.bars[t + 1].open;
        rec.close_next = day.bars[t + 1].close;
        bh.log.push_back(rec);
        pnl += o.r_rf;
        prev_action = o.action_taken;
      }
      bh.daily_returns.push_back(pnl / base);
      bh.dates.push_back(day.date_string());
    }
    write_reports(config, "buy_and_hold", bh, env.trading_commission, out);
  }

  std::cout << "report written to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Imitation-augmented intraday RL trading toolkit"};
  app.require_subcommand(1);

  std::string config_path, input_path, out_arg, checkpoint_path;
  double theta_bps = 3.0, phi_bps = -1.0;
  std::uint64_t seed_override = 0;
  bool seed_set = false;
  int terminal_label = 0, steps = 100000, jobs = 1;

  app.add_option("--config", config_path, "run config JSON file");
  app.add_option("--seed", seed_override, "master seed override")
      ->each([&](const std::string&) { seed_set = true; });

  auto* label = app.add_subcommand("label", "emit oracle labels per day");
  label->add_option("--input", input_path, "OHLCV CSV input");
  label->add_option("--theta-bps", theta_bps, "expert commission in bps");
  label->add_option("--terminal-label", terminal_label, "final label (0 or 1)");
  label->add_option("--out", out_arg, "output directory")->required();

  auto* train_cmd = app.add_subcommand("train", "train a PPO agent");
  train_cmd->add_option("--out", out_arg, "output directory")->required();
  train_cmd->add_option("--phi-bps", phi_bps, "trading commission override (bps)");

  auto* evaluate = app.add_subcommand("evaluate", "backtest a checkpoint");
  evaluate->add_option("--checkpoint", checkpoint_path, "checkpoint JSON")->required();
  evaluate->add_option("--out", out_arg, "output directory")->required();

  auto* scatter = app.add_subcommand("scatter", "random-policy reward scatter");
  scatter->add_option("--steps", steps, "number of steps");
  scatter->add_option("--out", out_arg, "output CSV path")->required();

  auto* report = app.add_subcommand("report", "full walk-forward report");
  report->add_option("--jobs", jobs, "parallel training jobs");
  report->add_option("--out", out_arg, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig config;
    if (!config_path.empty()) config = load_config_arg(config_path);
    if (seed_set) config.seed = seed_override;
    if (phi_bps >= 0.0) config.phi_bps = phi_bps;

    if (label->parsed()) {
      if (input_path.empty() && !config.csv_path && !config.synthetic) {
        throw ConfigError("label: need --input or a config data source");
      }
      return cmd_label(config, input_path, theta_bps, terminal_label, out_arg);
    }
    if (train_cmd->parsed()) {
      if (config_path.empty()) throw ConfigError("train: --config is required");
      return cmd_train(config, out_arg);
    }
    if (evaluate->parsed()) {
      if (config_path.empty()) throw ConfigError("evaluate: --config is required");
      return cmd_evaluate(config, checkpoint_path, out_arg);
    }
    if (scatter->parsed()) {
      if (config_path.empty()) throw ConfigError("scatter: --config is required");
      return cmd_scatter(config, steps, out_arg);
    }
    if (report->parsed()) {
      if (config_path.empty()) throw ConfigError("report: --config is required");
      return cmd_report(config, jobs, out_arg);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
