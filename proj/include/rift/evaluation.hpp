#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rift/ppo.hpp"

namespace rift {

/// Contiguous, non-overlapping train/validation/test ranges over the dataset
/// day list, expressed as index ranges [begin, end).
struct RollingWindow {
  int train_begin = 0, train_end = 0;
  int val_begin = 0, val_end = 0;
  int test_begin = 0, test_end = 0;
};

/// Calendar-month walk-forward windows: 12 months train, 3 validation,
/// 3 test, advancing by the test span.  Throws if the dataset covers fewer
/// than 18 months.
std::vector<RollingWindow> make_windows(std::span<const TradingDay> days,
                                        int train_months = 12, int val_months = 3,
                                        int test_months = 3);

/// One decision-step record of a played-out episode.
struct StepLogRecord {
  std::string date;
  int minute = 0;       // minute-of-day of the decision bar
  int action = 0;
  int prev_action = 0;
  int label = 0;
  int prev_label = 0;
  double r_rf = 0.0;
  double r_if = 0.0;
  double r_rif = 0.0;
  double open_next = 0.0;   // fill price of the following bar
  double close_next = 0.0;
};

struct BacktestResult {
  std::vector<StepLogRecord> log;
  std::vector<double> daily_returns;  // per-day pnl / first decision open
  std::vector<std::string> dates;
};

/// Plays every (complete) day with the greedy policy and logs each step.
BacktestResult backtest(std::span<const TradingDay> days, const NetParams& params,
                        const EnvConfig& env_config);

struct TradeRecord {
  std::string entry_date;
  int entry_minute = 0;
  int exit_minute = 0;
  double entry_price = 0.0;
  double exit_price = 0.0;
  double commission_paid = 0.0;
  double ret = 0.0;  // net of commissions, fraction of entry price
  int holding_minutes = 0;
};

/// Round trips implied by 0->1 ... 1->0 action transitions in the step log,
/// including forced end-of-day exits.
std::vector<TradeRecord> extract_trades(std::span<const StepLogRecord> log,
                                        double commission);

struct TradeStats {
  int num_trades = 0;
  double winrate_pct = 0.0;
  double mean_positive_pct = 0.0;
  double mean_negative_pct = 0.0;
  double avg_holding_minutes = 0.0;
  bool no_positive = false;  // empty sign subset, value reported as 0
  bool no_negative = false;
};

TradeStats trade_statistics(std::span<const TradeRecord> trades);

struct ReturnStats {
  double annualized_mean_pct = 0.0;
  double annualized_vol_pct = 0.0;
  double max_drawdown_pct = 0.0;
  double sharpe = 0.0;
  bool sharpe_defined = true;  // false on zero volatility
};

/// 252-day annualization; sample (n-1) stdev; drawdown on the compounded
/// equity curve.  Requires at least 2 daily returns.
ReturnStats return_statistics(std::span<const double> daily_returns);

struct ScatterPoint {
  double r_rf = 0.0;
  double r_rif = 0.0;
  int label = 0;
  int action = 0;
  bool matched = false;          // a_t == y_t and a_{t-1} == y_{t-1}
  double commission_bound = 0.0; // phi * O_{t+1}
};

/// Uniform-random policy over the dataset days (cycled) for n_steps steps,
/// logging both reward signals per step.
std::vector<ScatterPoint> reward_scatter(std::span<const TradingDay> days,
                                         const EnvConfig& env_config, int n_steps,
                                         std::uint64_t seed);

struct GridCellResult {
  double expert_commission = 0.0;   // theta
  double trading_commission = 0.0;  // phi
  double validation_return = 0.0;
  TrainResult train_result;
};

struct GridSearchResult {
  double best_theta = 0.0;
  double best_phi = 0.0;
  std::vector<GridCellResult> cells;
};

/// Trains one agent per (theta, phi) cell and picks the argmax validation
/// cumulative return (RF feedback at 1 bp); ties prefer smaller phi, then
/// smaller theta.
GridSearchResult grid_search(std::span<const TradingDay> train_days,
                             std::span<const TradingDay> validation_days,
                             std::span<const double> theta_grid,
                             std::span<const double> phi_grid,
                             const EnvConfig& base_env, const PpoConfig& ppo_config,
                             std::uint64_t seed, int jobs = 1);

/// {0.5, 1, 2, 3, 4, 5, 10, 20} bps as fractions.
std::vector<double> default_commission_grid();

}  // namespace rift
