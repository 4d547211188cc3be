#pragma once

#include <Eigen/Core>
#include <span>
#include <stdexcept>

#include "rift/market_data.hpp"

namespace rift {

using Vector8d = Eigen::Matrix<double, 8, 1>;

class InsufficientHistory : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-feature normalization bounds and lookback periods.  All periods must
/// fit inside the 61-bar lookback window.
struct IndicatorConfig {
  int williams_period = 14;
  int rsi_period = 14;
  int cci_period = 20;
  int uo_short = 7, uo_mid = 14, uo_long = 28;
  int adx_period = 14;
  int roc_period = 10;

  // bounds for min-max mapping into [-1, 1]; textbook-bounded indicators are
  // fixed, CCI/ROC bounds are fit on the training window (fit_bounds).
  double williams_lo = -100.0, williams_hi = 0.0;
  double rsi_lo = 0.0, rsi_hi = 100.0;
  double cci_lo = -250.0, cci_hi = 250.0;
  double uo_lo = 0.0, uo_hi = 100.0;
  double adx_lo = 0.0, adx_hi = 100.0;
  double roc_lo = -1.0, roc_hi = 1.0;

  // episode bounds as minute-of-day; the time-remaining feature counts down
  // from first_decision_minute to forced_exit_minute.
  int lookback_bars = 61;
  int first_decision_minute = 10 * 60 + 32;  // 10:32
  int forced_exit_minute = 16 * 60 + 58;     // 16:58
};

// Raw indicator values over a window of bars ending at the decision bar.
// The window must contain at least the configured period of bars; all of
// these throw InsufficientHistory otherwise.
double williams_r(std::span<const MinuteBar> window, int period = 14);
double rsi(std::span<const MinuteBar> window, int period = 14);
double cci(std::span<const MinuteBar> window, int period = 20);
double ultimate_oscillator(std::span<const MinuteBar> window, int short_p = 7,
                           int mid_p = 14, int long_p = 28);
double adx(std::span<const MinuteBar> window, int period = 14);
double roc(std::span<const MinuteBar> window, int period = 10);

/// 2*(clamp(x,lo,hi)-lo)/(hi-lo) - 1.  Throws on degenerate bounds.
double minmax_normalize(double x, double lo, double hi);

/// Builds the 8-dimensional normalized state vector at bar index t of a day
/// (six indicators, position, time remaining).  Only bars [0, t] are read.
Vector8d build_observation(const TradingDay& day, int t, int position,
                           const IndicatorConfig& config);

/// Fits CCI/ROC normalization bounds on the training days only (min/max of
/// the raw values over all decision bars), leaving textbook bounds alone.
void fit_bounds(IndicatorConfig& config, std::span<const TradingDay> train_days);

}  // namespace rift
