#include <doctest.h>

#include <cmath>
#include <random>

#include "rift/trading_env.hpp"

using namespace rift;

namespace {

MinuteBar bar(double open, double close, int minute = 600) {
  MinuteBar b;
  b.ts = Timestamp{2023, 1, 3, minute};
  b.open = open;
  b.close = close;
  b.high = std::max(open, close);
  b.low = std::min(open, close);
  b.volume = 10;
  return b;
}

TradingDay synthetic_day(std::uint64_t seed = 5,
                         SyntheticKind kind = SyntheticKind::RandomWalk) {
  SyntheticSpec spec;
  spec.kind = kind;
  spec.length_days = 1;
  spec.seed = seed;
  return generate_synthetic(spec)[0];
}

/// Snaps all prices of a day to multiples of 1/1024 so that reward arithmetic
/// with power-of-two commissions is exact in binary64.
TradingDay dyadic_day(std::uint64_t seed = 5) {
  TradingDay day = synthetic_day(seed);
  auto snap = [](double v) { return std::round(v * 1024.0) / 1024.0; };
  for (auto& b : day.bars) {
    b.open = snap(b.open);
    b.close = snap(b.close);
    b.high = snap(b.high) + 1.0;
    b.low = snap(b.low) - 1.0;
  }
  return day;
}

EnvConfig dyadic_config() {
  EnvConfig cfg;
  cfg.trading_commission = std::ldexp(1.0, -12);  // ~2.44 bps, exactly dyadic
  cfg.expert_commission = std::ldexp(1.0, -12);
  return cfg;
}

}  // namespace

TEST_CASE("execution_price picks next open on change, previous close otherwise") {
  auto t = bar(100.0, 100.4);
  auto next = bar(101.0, 101.3);
  CHECK(execution_price(true, t, next) == 101.0);
  CHECK(execution_price(false, t, next) == 100.4);
  CHECK(execution_price(true, t, next) - execution_price(false, t, next) ==
        next.open - t.close);
}

TEST_CASE("reinforcement_feedback direct substitution") {
  auto t = bar(99.0, 99.5);
  CHECK(reinforcement_feedback(0, 0, t, bar(100, 101), 0.001) == 0.0);
  // enter: 1*(101-100) - 0.001*100 = 0.9
  CHECK(reinforcement_feedback(1, 0, t, bar(100, 101), 0.001) ==
        doctest::Approx(0.9).epsilon(1e-14));
  // exit: cost only
  CHECK(reinforcement_feedback(0, 1, t, bar(100, 101), 0.001) ==
        doctest::Approx(-0.1).epsilon(1e-14));
}

TEST_CASE("imitation_feedback carries no commission") {
  auto t = bar(99.7, 100.0);
  CHECK(imitation_feedback(0, 0, t, bar(100, 100.5)) == 0.0);
  CHECK(imitation_feedback(0, 1, t, bar(100, 100.5)) == 0.0);
  // hold: close-to-close
  CHECK(imitation_feedback(1, 1, t, bar(100, 100.5)) ==
        doctest::Approx(0.5).epsilon(1e-14));
  // entry: fills at next open
  CHECK(imitation_feedback(1, 0, t, bar(100, 100.5)) ==
        doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("reset starts flat at the first decision minute") {
  auto day = synthetic_day();
  EnvConfig cfg;
  TradingEnv env(day, cfg);
  auto obs = env.reset();
  CHECK(obs[6] == -1.0);  // flat position feature
  CHECK(env.position() == 0);
  CHECK(day.bars[env.current_index()].ts.minute_of_day == 632);  // 10:32

  auto obs2 = TradingEnv(day, cfg).reset();
  CHECK((obs - obs2).cwiseAbs().maxCoeff() == 0.0);  // deterministic reset
}

TEST_CASE("incomplete days are rejected") {
  auto day = synthetic_day();
  day.incomplete = true;
  CHECK_THROWS_AS(TradingEnv(day, EnvConfig{}), std::invalid_argument);

  auto short_day = synthetic_day();
  short_day.bars.resize(80);
  CHECK_THROWS_AS(TradingEnv(short_day, EnvConfig{}), std::invalid_argument);
}

TEST_CASE("reward identity r_rif = r_rf - r_if is exact under a random policy") {
  auto day = synthetic_day(17);
  EnvConfig cfg;
  cfg.trading_commission = 3e-4;
  TradingEnv env(day, cfg);
  env.reset();
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> coin(0, 1);
  while (!env.done()) {
    auto out = env.step(coin(rng));
    CHECK(out.r_rif == out.r_rf - out.r_if);
    if (out.label == 0) CHECK(out.r_rif == out.r_rf);
  }
}

TEST_CASE("perfect imitation leaves only commission terms") {
  auto day = dyadic_day(23);
  auto cfg = dyadic_config();
  TradingEnv env(day, cfg);
  env.reset();
  double sum_rif = 0.0, sum_commission = 0.0;
  while (!env.done()) {
    int t = env.current_index();
    int y = env.label_at(t);
    int y_prev = t == env.first_decision_index() ? 0 : env.label_at(t - 1);
    double open_next = day.bars[t + 1].open;
    auto out = env.step(y);
    double commission =
        cfg.trading_commission * open_next * std::abs(out.action_taken - y_prev);
    if (out.action_taken == y) {
      CHECK(out.r_rif == -commission);  // bit-exact on dyadic data
    }
    sum_rif += out.r_rif;
    sum_commission += commission;
  }
  CHECK(sum_rif == doctest::Approx(-sum_commission).epsilon(1e-12));
}

TEST_CASE("episode ends flat with a forced exit trade") {
  auto day = synthetic_day(31);
  EnvConfig cfg;
  TradingEnv env(day, cfg);
  env.reset();
  StepOutcome last;
  while (!env.done()) last = env.step(1);  // always long
  CHECK(last.done);
  CHECK(last.action_taken == 0);  // override at 16:58
  CHECK(env.position() == 0);
  REQUIRE(last.trade.has_value());
  CHECK(last.trade->forced);
  CHECK_FALSE(last.trade->entry);
  CHECK(day.bars[env.current_index() - 1].ts.minute_of_day == 1018);  // 16:58
  CHECK_THROWS_AS(env.step(0), std::logic_error);
}

TEST_CASE("RF rewards telescope at zero commission") {
  auto day = synthetic_day(41);
  EnvConfig cfg;
  cfg.trading_commission = 0.0;
  TradingEnv env(day, cfg);
  env.reset();
  // hold from entry to forced exit; profit accrues from the entry fill at
  // O_{f+1} up to the close of the last held bar (no accrual on the exit step)
  double sum_rf = 0.0;
  double entry_price = day.bars[env.first_decision_index() + 1].open;
  double last_held_close = day.bars[env.forced_exit_index()].close;
  while (!env.done()) {
    sum_rf += env.step(1).r_rf;
  }
  CHECK(sum_rf == doctest::Approx(last_held_close - entry_price).epsilon(1e-9));
}

TEST_CASE("observations never depend on labels or future bars") {
  auto day = synthetic_day(59);
  EnvConfig cfg_low, cfg_high;
  cfg_low.expert_commission = 0.5e-4;
  cfg_high.expert_commission = 20e-4;
  TradingEnv a(day, cfg_low), b(day, cfg_high);
  auto oa = a.reset();
  auto ob = b.reset();
  CHECK((oa - ob).cwiseAbs().maxCoeff() == 0.0);  // labels differ, observations must not
  for (int i = 0; i < 10; ++i) {
    auto sa = a.step(1);
    auto sb = b.step(1);
    CHECK((sa.observation - sb.observation).cwiseAbs().maxCoeff() == 0.0);
  }
}
