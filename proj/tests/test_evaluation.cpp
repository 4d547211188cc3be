#include <doctest.h>

#include <cmath>

#include "rift/evaluation.hpp"

using namespace rift;

namespace {

/// Minimal calendar stub: `per_month` days in each month of [start, start+months).
std::vector<TradingDay> calendar_days(int start_year, int start_month, int months,
                                      int per_month = 2) {
  std::vector<TradingDay> days;
  for (int m = 0; m < months; ++m) {
    int month0 = (start_month - 1) + m;
    for (int d = 0; d < per_month; ++d) {
      TradingDay day;
      day.year = start_year + month0 / 12;
      day.month = month0 % 12 + 1;
      day.day = d + 1;
      days.push_back(day);
    }
  }
  return days;
}

StepLogRecord step(const std::string& date, int minute, int action, int prev_action,
                   double open_next) {
  StepLogRecord r;
  r.date = date;
  r.minute = minute;
  r.action = action;
  r.prev_action = prev_action;
  r.open_next = open_next;
  return r;
}

std::vector<TradingDay> synthetic_days(int n, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.length_days = n;
  spec.seed = seed;
  return generate_synthetic(spec);
}

}  // namespace

TEST_CASE("make_windows tiles 18-month spans into 12/3/3 splits") {
  auto days = calendar_days(2022, 1, 24);  // Jan 2022 .. Dec 2023
  auto windows = make_windows(days);
  REQUIRE(windows.size() == 3);  // starts at months 0, 3, 6

  for (const auto& w : windows) {
    CHECK(w.train_begin < w.train_end);
    CHECK(w.train_end == w.val_begin);
    CHECK(w.val_end == w.test_begin);
    CHECK(w.test_begin < w.test_end);
    CHECK(w.train_end - w.train_begin == 24);  // 12 months * 2 days
    CHECK(w.val_end - w.val_begin == 6);
    CHECK(w.test_end - w.test_begin == 6);
  }
  // windows advance by the 3-month test span; test ranges are disjoint and abut
  CHECK(windows[1].train_begin - windows[0].train_begin == 6);
  CHECK(windows[1].test_begin == windows[0].test_end);
  CHECK(windows[2].test_begin == windows[1].test_end);
}

TEST_CASE("make_windows rejects datasets shorter than one full window") {
  auto days = calendar_days(2022, 1, 14);
  CHECK_THROWS_AS(make_windows(days), std::invalid_argument);
  CHECK_THROWS_AS(make_windows(std::vector<TradingDay>{}), std::invalid_argument);
  // exactly 18 months is fine
  CHECK(make_windows(calendar_days(2022, 1, 18)).size() == 1);
}

TEST_CASE("extract_trades returns nothing for an always-flat log") {
  std::vector<StepLogRecord> log = {
      step("2023-01-03", 632, 0, 0, 100.0),
      step("2023-01-03", 633, 0, 0, 100.5),
  };
  CHECK(extract_trades(log, 1e-4).empty());
}

TEST_CASE("extract_trades reconstructs a hand-checked round trip") {
  std::vector<StepLogRecord> log = {
      step("2023-01-03", 640, 1, 0, 100.0),  // entry fills at 641 open = 100
      step("2023-01-03", 641, 1, 1, 101.0),
      step("2023-01-03", 642, 0, 1, 102.0),  // exit fills at 643 open = 102
  };
  auto trades = extract_trades(log, 0.001);
  REQUIRE(trades.size() == 1);
  const auto& t = trades[0];
  CHECK(t.entry_minute == 641);
  CHECK(t.exit_minute == 643);
  CHECK(t.entry_price == 100.0);
  CHECK(t.exit_price == 102.0);
  CHECK(t.holding_minutes == 2);
  CHECK(t.commission_paid == doctest::Approx(0.001 * 202.0));
  CHECK(t.ret == doctest::Approx((102.0 - 100.0 - 0.202) / 100.0));
}

TEST_CASE("extract_trades handles consecutive round trips and rejects open ends") {
  std::vector<StepLogRecord> log = {
      step("2023-01-03", 640, 1, 0, 100.0),
      step("2023-01-03", 641, 0, 1, 101.0),
      step("2023-01-03", 650, 1, 0, 99.0),
      step("2023-01-03", 651, 0, 1, 98.0),
  };
  auto trades = extract_trades(log, 0.0);
  REQUIRE(trades.size() == 2);
  CHECK(trades[0].ret == doctest::Approx(0.01));
  CHECK(trades[1].ret == doctest::Approx(-1.0 / 99.0));

  log.push_back(step("2023-01-03", 660, 1, 0, 100.0));
  CHECK_THROWS_AS(extract_trades(log, 0.0), std::runtime_error);
}

TEST_CASE("trade_statistics on one winner and one loser") {
  std::vector<TradeRecord> trades(2);
  trades[0].ret = 0.01;
  trades[0].holding_minutes = 10;
  trades[1].ret = -0.01;
  trades[1].holding_minutes = 30;
  auto stats = trade_statistics(trades);
  CHECK(stats.num_trades == 2);
  CHECK(stats.winrate_pct == 50.0);
  CHECK(stats.mean_positive_pct == doctest::Approx(1.0));
  CHECK(stats.mean_negative_pct == doctest::Approx(-1.0));
  CHECK(stats.avg_holding_minutes == 20.0);
  CHECK_FALSE(stats.no_positive);
  CHECK_FALSE(stats.no_negative);
}

TEST_CASE("trade_statistics flags empty sign subsets instead of inventing values") {
  std::vector<TradeRecord> winners(3);
  for (auto& t : winners) t.ret = 0.02;
  auto stats = trade_statistics(winners);
  CHECK(stats.winrate_pct == 100.0);
  CHECK(stats.no_negative);
  CHECK(stats.mean_negative_pct == 0.0);

  auto empty = trade_statistics(std::vector<TradeRecord>{});
  CHECK(empty.num_trades == 0);
  CHECK(empty.no_positive);
  CHECK(empty.no_negative);
}

TEST_CASE("return_statistics on a hand-computed fixture") {
  std::vector<double> r = {0.10, -0.10};
  auto stats = return_statistics(r);
  CHECK(stats.annualized_mean_pct == doctest::Approx(0.0));
  // stdev = sqrt(2*0.1^2/1) = 0.1*sqrt(2)
  CHECK(stats.annualized_vol_pct ==
        doctest::Approx(100.0 * std::sqrt(252.0) * 0.1 * std::sqrt(2.0)));
  // equity 1.10 then 0.99: 10% drawdown from the 1.10 peak
  CHECK(stats.max_drawdown_pct == doctest::Approx(10.0));
  CHECK(stats.sharpe_defined);
  CHECK(stats.sharpe == doctest::Approx(0.0));
}

TEST_CASE("return_statistics marks Sharpe undefined on zero volatility") {
  std::vector<double> r = {0.01, 0.01, 0.01};
  auto stats = return_statistics(r);
  CHECK_FALSE(stats.sharpe_defined);
  CHECK(stats.annualized_mean_pct == doctest::Approx(252.0));
  CHECK(stats.max_drawdown_pct == 0.0);
  CHECK_THROWS_AS(return_statistics(std::vector<double>{0.01}), std::invalid_argument);
}

TEST_CASE("annualized mean is linear in the daily returns") {
  std::vector<double> r = {0.01, -0.005, 0.002, 0.004};
  auto base = return_statistics(r);
  for (auto& v : r) v *= 3.0;
  auto scaled = return_statistics(r);
  CHECK(scaled.annualized_mean_pct == doctest::Approx(3.0 * base.annualized_mean_pct));
  CHECK(scaled.annualized_vol_pct == doctest::Approx(3.0 * base.annualized_vol_pct));
}

TEST_CASE("drawdown ignores gains that only set new highs") {
  auto stats = return_statistics(std::vector<double>{0.05, 0.02, 0.01});
  CHECK(stats.max_drawdown_pct == 0.0);
  auto dip = return_statistics(std::vector<double>{0.05, -0.02, 0.10});
  CHECK(dip.max_drawdown_pct == doctest::Approx(2.0));
}

TEST_CASE("backtest daily returns reconcile with the step log") {
  auto days = synthetic_days(3, 14);
  auto params = init_params(2);
  EnvConfig cfg;
  auto result = backtest(days, params, cfg);
  REQUIRE(result.daily_returns.size() == 3);
  REQUIRE(result.dates.size() == 3);
  // 387 decision steps per complete day
  CHECK(result.log.size() == 3 * 387);
  for (std::size_t d = 0; d < 3; ++d) {
    double pnl = 0.0;
    for (const auto& rec : result.log) {
      if (rec.date == result.dates[d]) pnl += rec.r_rf;
    }
    TradingEnv env(days[d], cfg);
    double base = days[d].bars[env.first_decision_index()].open;
    CHECK(result.daily_returns[d] == doctest::Approx(pnl / base).epsilon(1e-12));
  }
}

TEST_CASE("backtest is deterministic and skips incomplete days") {
  auto days = synthetic_days(2, 15);
  auto params = init_params(4);
  EnvConfig cfg;
  auto a = backtest(days, params, cfg);
  auto b = backtest(days, params, cfg);
  CHECK(a.daily_returns == b.daily_returns);

  days[0].incomplete = true;
  auto partial = backtest(days, params, cfg);
  CHECK(partial.daily_returns.size() == 1);
  CHECK(partial.dates[0] == days[1].date_string());
}

TEST_CASE("reward_scatter puts flat-label steps on the diagonal") {
  auto days = synthetic_days(2, 25);
  EnvConfig cfg;
  cfg.expert_commission = 0.5;  // prohibitive: expert stays flat all day
  auto points = reward_scatter(days, cfg, 500, 77);
  REQUIRE(points.size() == 500);
  for (const auto& p : points) {
    CHECK(p.label == 0);
    CHECK(p.r_rif == p.r_rf);  // r_if vanishes when the expert is flat
  }
}

TEST_CASE("matched scatter steps sit within the commission bound") {
  auto days = synthetic_days(2, 26);
  EnvConfig cfg;
  auto points = reward_scatter(days, cfg, 2000, 5);
  int matched = 0;
  for (const auto& p : points) {
    if (!p.matched) continue;
    ++matched;
    CHECK(p.r_rif <= 0.0);
    CHECK(-p.r_rif <= p.commission_bound + 1e-12);
  }
  CHECK(matched > 0);  // the random policy coincides with the expert sometimes
}

TEST_CASE("grid_search picks the best cell with smaller-phi tie-breaking") {
  auto days = synthetic_days(4, 33);
  std::vector<TradingDay> train_days(days.begin(), days.begin() + 3);
  std::vector<TradingDay> val_days(days.begin() + 3, days.end());
  EnvConfig env;
  PpoConfig ppo;
  ppo.buffer_size = 128;
  ppo.epochs = 1;
  ppo.max_iterations = 2;
  ppo.patience = 100;

  std::vector<double> thetas = {1e-4};
  std::vector<double> phis = {1e-4, 5e-4};
  auto result = grid_search(train_days, val_days, thetas, phis, env, ppo, 7);
  REQUIRE(result.cells.size() == 2);
  const GridCellResult* best = nullptr;
  for (const auto& c : result.cells) {
    if (!best || c.validation_return > best->validation_return ||
        (c.validation_return == best->validation_return &&
         c.trading_commission < best->trading_commission)) {
      best = &c;
    }
  }
  CHECK(result.best_theta == best->expert_commission);
  CHECK(result.best_phi == best->trading_commission);
}

TEST_CASE("grid_search is identical with and without worker threads") {
  auto days = synthetic_days(4, 34);
  std::vector<TradingDay> train_days(days.begin(), days.begin() + 3);
  std::vector<TradingDay> val_days(days.begin() + 3, days.end());
  EnvConfig env;
  PpoConfig ppo;
  ppo.buffer_size = 128;
  ppo.epochs = 1;
  ppo.max_iterations = 1;
  ppo.patience = 100;

  std::vector<double> grid = {1e-4, 3e-4};
  auto serial = grid_search(train_days, val_days, grid, grid, env, ppo, 9, 1);
  auto parallel = grid_search(train_days, val_days, grid, grid, env, ppo, 9, 4);
  REQUIRE(serial.cells.size() == parallel.cells.size());
  for (std::size_t i = 0; i < serial.cells.size(); ++i) {
    CHECK(serial.cells[i].validation_return == parallel.cells[i].validation_return);
  }
  CHECK(serial.best_theta == parallel.best_theta);
  CHECK(serial.best_phi == parallel.best_phi);
}
