#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rift {

/// Calendar date plus minute-of-day, zone-naive exchange-local time.
struct Timestamp {
  int year = 1970;
  int month = 1;
  int day = 1;
  int minute_of_day = 0;  // 0..1439

  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

/// Day-of-week, 0 = Monday .. 6 = Sunday.
int day_of_week(int year, int month, int day);
bool is_weekday(const Timestamp& ts);

/// "2023-01-03T09:30"
std::string format_timestamp(const Timestamp& ts);
Timestamp parse_timestamp(const std::string& text);

struct MinuteBar {
  Timestamp ts;
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
  std::int64_t volume = 0;

  bool valid() const {
    return open > 0.0 && high > 0.0 && low > 0.0 && close > 0.0 &&
           low <= std::min(open, close) && high >= std::max(open, close) &&
           volume >= 0;
  }
};

// Liquid session: 09:30 (inclusive) to 17:00 (exclusive), minutes from midnight.
inline constexpr int kSessionOpenMinute = 9 * 60 + 30;   // 570
inline constexpr int kSessionCloseMinute = 17 * 60;      // 1020
inline constexpr int kSessionBars = kSessionCloseMinute - kSessionOpenMinute;  // 450

struct TradingDay {
  int year = 0;
  int month = 0;
  int day = 0;
  std::vector<MinuteBar> bars;  // strictly increasing one-minute timestamps
  bool incomplete = false;      // flagged when more than the allowed bars are missing

  std::string date_string() const;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t row, const std::string& what)
      : std::runtime_error("row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

/// Parses CSV with header `timestamp,open,high,low,close,volume`.
/// Throws ParseError on malformed rows or non-monotone timestamps.
std::vector<MinuteBar> parse_ohlcv(std::istream& in);
std::vector<MinuteBar> parse_ohlcv_file(const std::string& path);

/// Writes bars back in the normalized CSV form (shortest round-trip floats).
void serialize_ohlcv(std::span<const MinuteBar> bars, std::ostream& out);
std::string serialize_ohlcv(std::span<const MinuteBar> bars);

/// Splits sorted bars into per-date TradingDays, keeping only in-session
/// weekday bars.  Days missing more than `max_missing_bars` session minutes
/// are flagged incomplete (not dropped).
std::vector<TradingDay> segment_days(std::span<const MinuteBar> bars,
                                     int max_missing_bars = 5);

enum class SyntheticKind { RandomWalk, DeterministicTrend, Sinusoid };

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::RandomWalk;
  int length_days = 1;
  double volatility = 0.001;  // per-minute scale (fraction)
  double drift = 0.0;         // per-minute drift (fraction)
  double base_price = 100.0;
  std::uint64_t seed = 0;
  // first session is placed on this date, advancing over weekdays
  int start_year = 2023;
  int start_month = 1;
  int start_day = 2;  // a Monday
};

/// Deterministic synthetic minute-bar days; (spec, seed) fully determine the
/// output, and every bar satisfies the MinuteBar invariants.
std::vector<TradingDay> generate_synthetic(const SyntheticSpec& spec);

}  // namespace rift
