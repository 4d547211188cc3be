#include "rift/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <stdexcept>

namespace rift {

std::vector<RollingWindow> make_windows(std::span<const TradingDay> days,
                                        int train_months, int val_months,
                                        int test_months) {
  if (days.empty()) throw std::invalid_argument("make_windows: no days");
  auto month_index = [](const TradingDay& d) { return d.year * 12 + (d.month - 1); };

  const int m0 = month_index(days.front());
  const int m_last = month_index(days.back());
  const int span = m_last - m0 + 1;
  const int need = train_months + val_months + test_months;
  if (span < need) {
    throw std::invalid_argument("make_windows: dataset covers " + std::to_string(span) +
                                " months, need at least " + std::to_string(need));
  }

  // first day index at or after a given month
  auto lower_bound_month = [&](int month) {
    int lo = 0, hi = static_cast<int>(days.size());
    while (lo < hi) {
      int mid = (lo + hi) / 2;
      if (month_index(days[mid]) < month) lo = mid + 1;
      else hi = mid;
    }
    return lo;
  };

  std::vector<RollingWindow> windows;
  for (int start = m0; start + need <= m_last + 1; start += test_months) {
    RollingWindow w;
    w.train_begin = lower_bound_month(start);
    w.train_end = lower_bound_month(start + train_months);
    w.val_begin = w.train_end;
    w.val_end = lower_bound_month(start + train_months + val_months);
    w.test_begin = w.val_end;
    w.test_end = lower_bound_month(start + need);
    windows.push_back(w);
  }
  return windows;
}

BacktestResult backtest(std::span<const TradingDay> days, const NetParams& params,
                        const EnvConfig& env_config) {
  BacktestResult result;
  for (const auto& day : days) {
    if (day.incomplete) continue;
    TradingEnv env(day, env_config);
    Vector8d obs = env.reset();
    double pnl = 0.0;
    double base = day.bars[env.first_decision_index()].open;
    int prev_action = 0;
    while (!env.done()) {
      int t = env.current_index();
      int prev_label = t == env.first_decision_index() ? 0 : env.label_at(t - 1);
      StepOutcome out = env.step(greedy_action(params, obs));

      StepLogRecord rec;
      rec.date = day.date_string();
      rec.minute = day.bars[t].ts.minute_of_day;
      rec.action = out.action_taken;
      rec.prev_action = prev_action;
      rec.label = out.label;
      rec.prev_label = prev_label;
      rec.r_rf = out.r_rf;
      rec.r_if = out.r_if;
      rec.r_rif = out.r_rif;
      rec.open_next = day.bars[t + 1].open;
      rec.close_next = day.bars[t + 1].close;
      result.log.push_back(rec);

      pnl += out.r_rf;
      prev_action = out.action_taken;
      obs = out.observation;
    }
    result.daily_returns.push_back(pnl / base);
    result.dates.push_back(day.date_string());
  }
  return result;
}

std::vector<TradeRecord> extract_trades(std::span<const StepLogRecord> log,
                                        double commission) {
  std::vector<TradeRecord> trades;
  std::optional<TradeRecord> open;
  for (const auto& rec : log) {
    if (rec.action == 1 && rec.prev_action == 0) {
      TradeRecord t;
      t.entry_date = rec.date;
      t.entry_minute = rec.minute + 1;  // fills at the next bar's open
      t.entry_price = rec.open_next;
      open = t;
    } else if (rec.action == 0 && rec.prev_action == 1) {
      if (!open) throw std::runtime_error("extract_trades: exit without entry");
      open->exit_minute = rec.minute + 1;
      open->exit_price = rec.open_next;
      open->commission_paid = commission * (open->entry_price + open->exit_price);
      open->ret = (open->exit_price - open->entry_price - open->commission_paid) /
                  open->entry_price;
      open->holding_minutes = open->exit_minute - open->entry_minute;
      trades.push_back(*open);
      open.reset();
    }
  }
  if (open) throw std::runtime_error("extract_trades: log ends with an open position");
  return trades;
}

TradeStats trade_statistics(std::span<const TradeRecord> trades) {
  TradeStats stats;
  stats.num_trades = static_cast<int>(trades.size());
  if (trades.empty()) {
    stats.no_positive = stats.no_negative = true;
    return stats;
  }
  int wins = 0;
  double pos_sum = 0.0, neg_sum = 0.0, hold_sum = 0.0;
  int pos_n = 0, neg_n = 0;
  for (const auto& t : trades) {
    if (t.ret > 0.0) {
      ++wins;
      pos_sum += t.ret;
      ++pos_n;
    } else if (t.ret < 0.0) {
      neg_sum += t.ret;
      ++neg_n;
    }
    hold_sum += t.holding_minutes;
  }
  stats.winrate_pct = 100.0 * wins / static_cast<double>(trades.size());
  stats.no_positive = pos_n == 0;
  stats.no_negative = neg_n == 0;
  stats.mean_positive_pct = pos_n ? 100.0 * pos_sum / pos_n : 0.0;
  stats.mean_negative_pct = neg_n ? 100.0 * neg_sum / neg_n : 0.0;
  stats.avg_holding_minutes = hold_sum / static_cast<double>(trades.size());
  return stats;
}

ReturnStats return_statistics(std::span<const double> daily_returns) {
  if (daily_returns.size() < 2) {
    throw std::invalid_argument("return_statistics: need at least 2 daily returns");
  }
  const auto n = static_cast<double>(daily_returns.size());
  double mean = std::accumulate(daily_returns.begin(), daily_returns.end(), 0.0) / n;
  double ss = 0.0;
  for (double r : daily_returns) ss += (r - mean) * (r - mean);
  double stdev = std::sqrt(ss / (n - 1.0));

  ReturnStats stats;
  stats.annualized_mean_pct = 100.0 * 252.0 * mean;
  stats.annualized_vol_pct = 100.0 * std::sqrt(252.0) * stdev;

  double equity = 1.0, peak = 1.0, mdd = 0.0;
  for (double r : daily_returns) {
    equity *= 1.0 + r;
    peak = std::max(peak, equity);
    mdd = std::max(mdd, (peak - equity) / peak);
  }
  stats.max_drawdown_pct = 100.0 * mdd;

  if (stats.annualized_vol_pct > 0.0) {
    stats.sharpe = stats.annualized_mean_pct / stats.annualized_vol_pct;
  } else {
    stats.sharpe_defined = false;
  }
  return stats;
}

std::vector<ScatterPoint> reward_scatter(std::span<const TradingDay> days,
                                         const EnvConfig& env_config, int n_steps,
                                         std::uint64_t seed) {
  std::vector<const TradingDay*> usable;
  for (const auto& d : days) {
    if (!d.incomplete) usable.push_back(&d);
  }
  if (usable.empty()) throw std::invalid_argument("reward_scatter: no usable days");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coin(0, 1);

  std::vector<ScatterPoint> points;
  points.reserve(n_steps);
  std::size_t day_idx = 0;
  while (static_cast<int>(points.size()) < n_steps) {
    TradingEnv env(*usable[day_idx], env_config);
    day_idx = (day_idx + 1) % usable.size();
    env.reset();
    int prev_action = 0;
    while (!env.done() && static_cast<int>(points.size()) < n_steps) {
      int t = env.current_index();
      int prev_label = t == env.first_decision_index() ? 0 : env.label_at(t - 1);
      double open_next = env.day().bars[t + 1].open;
      StepOutcome out = env.step(coin(rng));

      ScatterPoint p;
      p.r_rf = out.r_rf;
      p.r_rif = out.r_rif;
      p.label = out.label;
      p.action = out.action_taken;
      p.matched = out.action_taken == out.label && prev_action == prev_label;
      p.commission_bound = env_config.trading_commission * open_next;
      points.push_back(p);
      prev_action = out.action_taken;
    }
  }
  return points;
}

std::vector<double> default_commission_grid() {
  return {0.5e-4, 1e-4, 2e-4, 3e-4, 4e-4, 5e-4, 10e-4, 20e-4};
}

GridSearchResult grid_search(std::span<const TradingDay> train_days,
                             std::span<const TradingDay> validation_days,
                             std::span<const double> theta_grid,
                             std::span<const double> phi_grid,
                             const EnvConfig& base_env, const PpoConfig& ppo_config,
                             std::uint64_t seed, int jobs) {
  if (theta_grid.empty() || phi_grid.empty()) {
    throw std::invalid_argument("grid_search: empty grid");
  }

  struct Cell {
    double theta, phi;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  std::uint64_t cell_id = 0;
  for (double theta : theta_grid) {
    for (double phi : phi_grid) {
      // stable per-cell seed derived from the master seed
      std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ull * (cell_id + 1));
      cells.push_back({theta, phi, s});
      ++cell_id;
    }
  }

  auto run_cell = [&](const Cell& cell) {
    EnvConfig env = base_env;
    env.expert_commission = cell.theta;
    env.trading_commission = cell.phi;
    GridCellResult res;
    res.expert_commission = cell.theta;
    res.trading_commission = cell.phi;
    res.train_result = train(train_days, validation_days, env, ppo_config, cell.seed);
    res.validation_return = res.train_result.best_validation_return;
    return res;
  };

  GridSearchResult result;
  result.cells.resize(cells.size());
  if (jobs <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) result.cells[i] = run_cell(cells[i]);
  } else {
    std::vector<std::future<GridCellResult>> futures(cells.size());
    std::size_t next = 0;
    while (next < cells.size()) {
      std::size_t batch_end = std::min(next + static_cast<std::size_t>(jobs), cells.size());
      for (std::size_t i = next; i < batch_end; ++i) {
        futures[i] = std::async(std::launch::async, run_cell, cells[i]);
      }
      for (std::size_t i = next; i < batch_end; ++i) result.cells[i] = futures[i].get();
      next = batch_end;
    }
  }

  const GridCellResult* best = nullptr;
  for (const auto& cell : result.cells) {
    if (!best || cell.validation_return > best->validation_return ||
        (cell.validation_return == best->validation_return &&
         (cell.trading_commission < best->trading_commission ||
          (cell.trading_commission == best->trading_commission &&
           cell.expert_commission < best->expert_commission)))) {
      best = &cell;
    }
  }
  result.best_theta = best->expert_commission;
  result.best_phi = best->trading_commission;
  return result;
}

}  // namespace rift
