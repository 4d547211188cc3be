#include "rift/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace rift {

namespace {

void require(std::span<const MinuteBar> window, std::size_t need, const char* name) {
  if (window.size() < need) {
    throw InsufficientHistory(std::string(name) + " needs " + std::to_string(need) +
                              " bars, got " + std::to_string(window.size()));
  }
}

}  // namespace

double williams_r(std::span<const MinuteBar> window, int period) {
  require(window, static_cast<std::size_t>(period), "williams_r");
  auto tail = window.subspan(window.size() - period);
  double hh = tail[0].high, ll = tail[0].low;
  for (const auto& b : tail) {
    hh = std::max(hh, b.high);
    ll = std::min(ll, b.low);
  }
  double close = tail.back().close;
  if (hh == ll) return -50.0;  // flat window
  return -100.0 * (hh - close) / (hh - ll);
}

double rsi(std::span<const MinuteBar> window, int period) {
  require(window, static_cast<std::size_t>(period) + 1, "rsi");
  // Wilder recurrence seeded with the simple average over the first `period`
  // changes of the window.
  double avg_gain = 0.0, avg_loss = 0.0;
  for (int i = 1; i <= period; ++i) {
    double d = window[i].close - window[i - 1].close;
    if (d > 0) avg_gain += d;
    else avg_loss -= d;
  }
  avg_gain /= period;
  avg_loss /= period;
  for (std::size_t i = period + 1; i < window.size(); ++i) {
    double d = window[i].close - window[i - 1].close;
    avg_gain = (avg_gain * (period - 1) + std::max(d, 0.0)) / period;
    avg_loss = (avg_loss * (period - 1) + std::max(-d, 0.0)) / period;
  }
  if (avg_loss == 0.0 && avg_gain == 0.0) return 50.0;  // flat prices
  if (avg_loss == 0.0) return 100.0;
  return 100.0 - 100.0 / (1.0 + avg_gain / avg_loss);
}

double cci(std::span<const MinuteBar> window, int period) {
  require(window, static_cast<std::size_t>(period), "cci");
  auto tail = window.subspan(window.size() - period);
  std::vector<double> tp(tail.size());
  for (std::size_t i = 0; i < tail.size(); ++i) {
    tp[i] = (tail[i].high + tail[i].low + tail[i].close) / 3.0;
  }
  double sma = 0.0;
  for (double v : tp) sma += v;
  sma /= tp.size();
  double md = 0.0;
  for (double v : tp) md += std::abs(v - sma);
  md /= tp.size();
  if (md == 0.0) return 0.0;
  return (tp.back() - sma) / (0.015 * md);
}

double ultimate_oscillator(std::span<const MinuteBar> window, int short_p,
                           int mid_p, int long_p) {
  require(window, static_cast<std::size_t>(long_p) + 1, "ultimate_oscillator");
  auto ratio = [&](int p) {
    double bp = 0.0, tr = 0.0;
    for (std::size_t i = window.size() - p; i < window.size(); ++i) {
      double prev_close = window[i - 1].close;
      double lo = std::min(window[i].low, prev_close);
      double hi = std::max(window[i].high, prev_close);
      bp += window[i].close - lo;
      tr += hi - lo;
    }
    return tr == 0.0 ? 0.5 : bp / tr;
  };
  return 100.0 * (4.0 * ratio(short_p) + 2.0 * ratio(mid_p) + ratio(long_p)) / 7.0;
}

double adx(std::span<const MinuteBar> window, int period) {
  require(window, 2 * static_cast<std::size_t>(period) + 1, "adx");
  const std::size_t n = window.size() - 1;  // number of deltas
  std::vector<double> tr(n), plus_dm(n), minus_dm(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& cur = window[i + 1];
    const auto& prev = window[i];
    double up = cur.high - prev.high;
    double down = prev.low - cur.low;
    plus_dm[i] = (up > down && up > 0) ? up : 0.0;
    minus_dm[i] = (down > up && down > 0) ? down : 0.0;
    tr[i] = std::max({cur.high - cur.low, std::abs(cur.high - prev.close),
                      std::abs(cur.low - prev.close)});
  }
  // Wilder smoothing of TR and DMs, then of DX.
  double str = 0.0, spdm = 0.0, smdm = 0.0;
  for (int i = 0; i < period; ++i) {
    str += tr[i];
    spdm += plus_dm[i];
    smdm += minus_dm[i];
  }
  std::vector<double> dx;
  auto push_dx = [&] {
    if (str == 0.0) {
      dx.push_back(0.0);
      return;
    }
    double pdi = 100.0 * spdm / str;
    double mdi = 100.0 * smdm / str;
    double denom = pdi + mdi;
    dx.push_back(denom == 0.0 ? 0.0 : 100.0 * std::abs(pdi - mdi) / denom);
  };
  push_dx();
  for (std::size_t i = period; i < n; ++i) {
    str = str - str / period + tr[i];
    spdm = spdm - spdm / period + plus_dm[i];
    smdm = smdm - smdm / period + minus_dm[i];
    push_dx();
  }
  if (dx.size() < static_cast<std::size_t>(period)) {
    throw InsufficientHistory("adx: not enough DX values");
  }
  double adx_val = 0.0;
  for (int i = 0; i < period; ++i) adx_val += dx[i];
  adx_val /= period;
  for (std::size_t i = period; i < dx.size(); ++i) {
    adx_val = (adx_val * (period - 1) + dx[i]) / period;
  }
  return adx_val;
}

double roc(std::span<const MinuteBar> window, int period) {
  require(window, static_cast<std::size_t>(period) + 1, "roc");
  double past = window[window.size() - 1 - period].close;
  return 100.0 * (window.back().close / past - 1.0);
}

double minmax_normalize(double x, double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("degenerate normalization bounds");
  double c = std::clamp(x, lo, hi);
  return 2.0 * (c - lo) / (hi - lo) - 1.0;
}

Vector8d build_observation(const TradingDay& day, int t, int position,
                           const IndicatorConfig& config) {
  if (t < config.lookback_bars || t >= static_cast<int>(day.bars.size())) {
    throw InsufficientHistory("build_observation: t=" + std::to_string(t));
  }
  auto window = std::span<const MinuteBar>(day.bars).subspan(
      t + 1 - config.lookback_bars, config.lookback_bars);

  Vector8d obs;
  obs[0] = minmax_normalize(williams_r(window, config.williams_period),
                            config.williams_lo, config.williams_hi);
  obs[1] = minmax_normalize(rsi(window, config.rsi_period), config.rsi_lo,
                            config.rsi_hi);
  obs[2] = minmax_normalize(cci(window, config.cci_period), config.cci_lo,
                            config.cci_hi);
  obs[3] = minmax_normalize(
      ultimate_oscillator(window, config.uo_short, config.uo_mid, config.uo_long),
      config.uo_lo, config.uo_hi);
  obs[4] = minmax_normalize(adx(window, config.adx_period), config.adx_lo,
                            config.adx_hi);
  obs[5] = minmax_normalize(roc(window, config.roc_period), config.roc_lo,
                            config.roc_hi);
  obs[6] = position != 0 ? 1.0 : -1.0;

  int minute = day.bars[t].ts.minute_of_day;
  double span = config.forced_exit_minute - config.first_decision_minute;
  double remaining = std::clamp(
      static_cast<double>(config.forced_exit_minute - minute), 0.0, span);
  obs[7] = 2.0 * remaining / span - 1.0;
  return obs;
}

void fit_bounds(IndicatorConfig& config, std::span<const TradingDay> train_days) {
  double cci_lo = 0.0, cci_hi = 0.0, roc_lo = 0.0, roc_hi = 0.0;
  bool any = false;
  for (const auto& day : train_days) {
    for (int t = config.lookback_bars; t < static_cast<int>(day.bars.size()); ++t) {
      auto window = std::span<const MinuteBar>(day.bars).subspan(
          t + 1 - config.lookback_bars, config.lookback_bars);
      double c = cci(window, config.cci_period);
      double r = roc(window, config.roc_period);
      if (!any) {
        cci_lo = cci_hi = c;
        roc_lo = roc_hi = r;
        any = true;
      } else {
        cci_lo = std::min(cci_lo, c);
        cci_hi = std::max(cci_hi, c);
        roc_lo = std::min(roc_lo, r);
        roc_hi = std::max(roc_hi, r);
      }
    }
  }
  if (!any) throw std::invalid_argument("fit_bounds: no usable training bars");
  // widen degenerate ranges so minmax_normalize stays well defined
  if (cci_lo == cci_hi) {
    cci_lo -= 1.0;
    cci_hi += 1.0;
  }
  if (roc_lo == roc_hi) {
    roc_lo -= 0.01;
    roc_hi += 0.01;
  }
  config.cci_lo = cci_lo;
  config.cci_hi = cci_hi;
  config.roc_lo = roc_lo;
  config.roc_hi = roc_hi;
}

}  // namespace rift
