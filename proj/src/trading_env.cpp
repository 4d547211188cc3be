#include "rift/trading_env.hpp"

#include <cmath>
#include <stdexcept>

namespace rift {

double execution_price(bool changed, const MinuteBar& bar_t, const MinuteBar& bar_next) {
  return changed ? bar_next.open : bar_t.close;
}

double reinforcement_feedback(int action, int prev_action, const MinuteBar& bar_t,
                              const MinuteBar& bar_next, double commission) {
  bool changed = action != prev_action;
  double exec = execution_price(changed, bar_t, bar_next);
  double cost = commission * bar_next.open * std::abs(action - prev_action);
  return action * (bar_next.close - exec) - cost;
}

double imitation_feedback(int label, int prev_label, const MinuteBar& bar_t,
                          const MinuteBar& bar_next) {
  bool changed = label != prev_label;
  double exec = execution_price(changed, bar_t, bar_next);
  return label * (bar_next.close - exec);
}

TradingEnv::TradingEnv(const TradingDay& day, const EnvConfig& config)
    : day_(&day), config_(config) {
  if (day.incomplete) {
    throw std::invalid_argument("TradingEnv: day " + day.date_string() +
                                " is flagged incomplete");
  }
  const auto& ind = config_.indicators;
  const int n = static_cast<int>(day.bars.size());
  first_index_ = -1;
  exit_index_ = -1;
  for (int i = 0; i < n; ++i) {
    int minute = day.bars[i].ts.minute_of_day;
    if (first_index_ < 0 && minute >= ind.first_decision_minute) first_index_ = i;
    if (minute <= ind.forced_exit_minute) exit_index_ = i;
  }
  if (first_index_ < 0 || exit_index_ < 0 || first_index_ >= exit_index_ ||
      exit_index_ + 1 >= n) {
    throw std::invalid_argument("TradingEnv: day too short for the episode window");
  }
  if (first_index_ < ind.lookback_bars) {
    throw std::invalid_argument("TradingEnv: insufficient lookback before first decision");
  }

  // Expert labels for the day: close prices up to the forced-exit bar, pinned
  // flat at the exit (the expert liquidates intraday too).
  std::vector<double> closes(exit_index_ + 1);
  for (int i = 0; i <= exit_index_; ++i) closes[i] = day.bars[i].close;
  labels_ = oracle_labels(closes, config_.expert_commission, 0);
  labels_.labels.resize(n, 0);
}

Vector8d TradingEnv::reset() {
  t_ = first_index_;
  prev_action_ = 0;
  done_ = false;
  return build_observation(*day_, t_, 0, config_.indicators);
}

StepOutcome TradingEnv::step(int action) {
  if (done_) throw std::logic_error("TradingEnv::step after done");
  if (action != 0 && action != 1) throw std::invalid_argument("action must be 0 or 1");

  const bool forced = t_ == exit_index_;
  if (forced) action = 0;

  const MinuteBar& bar_t = day_->bars[t_];
  const MinuteBar& bar_next = day_->bars[t_ + 1];
  const int y = labels_.labels[t_];
  // the expert, like the agent, starts the episode flat
  const int y_prev = t_ == first_index_ ? 0 : labels_.labels[t_ - 1];

  StepOutcome out;
  out.action_taken = action;
  out.label = y;

  double phi = config_.trading_commission;
  if (forced && !config_.charge_exit_commission) phi = 0.0;
  out.r_rf = reinforcement_feedback(action, prev_action_, bar_t, bar_next, phi);
  out.r_if = imitation_feedback(y, y_prev, bar_t, bar_next);
  out.r_rif = out.r_rf - out.r_if;

  if (action != prev_action_) {
    TradeEvent ev;
    ev.ts = bar_next.ts;
    ev.entry = action == 1;
    ev.price = bar_next.open;
    ev.commission_paid = phi * bar_next.open;
    ev.forced = forced;
    out.trade = ev;
  }

  prev_action_ = action;
  ++t_;
  done_ = forced;
  out.done = done_;
  if (!done_) {
    out.observation = build_observation(*day_, t_, prev_action_, config_.indicators);
  }
  return out;
}

}  // namespace rift
