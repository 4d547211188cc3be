#pragma once

#include <optional>
#include <vector>

#include "rift/indicators.hpp"
#include "rift/market_data.hpp"
#include "rift/oracle_labeling.hpp"

namespace rift {

enum class RewardMode { RF, RIF };

struct EnvConfig {
  double trading_commission = 0.0001;  // phi, fraction of traded price
  double expert_commission = 0.0001;   // theta, used when labeling the day
  RewardMode reward_mode = RewardMode::RIF;
  bool charge_exit_commission = true;  // the forced 16:58 exit is a real trade
  IndicatorConfig indicators;          // carries decision/exit minutes
};

/// p^exec: open of the next bar when the position changed, else the close of
/// the current bar.
double execution_price(bool changed, const MinuteBar& bar_t, const MinuteBar& bar_next);

/// a_t*(C_{t+1} - p^exec) - phi*O_{t+1}*|a_t - a_{t-1}|, currency per unit.
double reinforcement_feedback(int action, int prev_action, const MinuteBar& bar_t,
                              const MinuteBar& bar_next, double commission);

/// y_t*(C_{t+1} - p^exec_y); no commission term.
double imitation_feedback(int label, int prev_label, const MinuteBar& bar_t,
                          const MinuteBar& bar_next);

struct TradeEvent {
  Timestamp ts;   // bar whose open filled the trade
  bool entry = false;
  double price = 0.0;
  double commission_paid = 0.0;
  bool forced = false;  // end-of-day liquidation
};

struct StepOutcome {
  Vector8d observation = Vector8d::Zero();  // next state (stale after done)
  double r_rf = 0.0;
  double r_if = 0.0;
  double r_rif = 0.0;
  int action_taken = 0;  // after any forced-exit override
  int label = 0;         // y_t used this step
  bool done = false;
  std::optional<TradeEvent> trade;
};

/// One episodic intraday MDP over a single TradingDay.  Decisions run from the
/// first decision minute to the forced exit minute; the final step overrides
/// the action to flat.
class TradingEnv {
 public:
  TradingEnv(const TradingDay& day, const EnvConfig& config);

  Vector8d reset();
  StepOutcome step(int action);

  bool done() const { return done_; }
  int current_index() const { return t_; }
  int position() const { return prev_action_; }
  int first_decision_index() const { return first_index_; }
  int forced_exit_index() const { return exit_index_; }
  const LabelSeries& labels() const { return labels_; }
  const TradingDay& day() const { return *day_; }
  int label_at(int t) const { return labels_.labels[t]; }

 private:
  const TradingDay* day_;
  EnvConfig config_;
  LabelSeries labels_;
  int first_index_ = 0;
  int exit_index_ = 0;
  int t_ = 0;
  int prev_action_ = 0;
  bool done_ = true;
};

}  // namespace rift
