#include "rift/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace rift {

namespace {

// Howard Hinnant's days-from-civil; 1970-01-01 is day 0 (a Thursday).
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double parse_double_field(const std::string& s, std::size_t row, const char* name) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ParseError(row, std::string("bad ") + name + " value '" + s + "'");
  }
  return v;
}

}  // namespace

int day_of_week(int year, int month, int day) {
  // days_from_civil(1970,1,1)=0 was a Thursday (=3 with Monday=0)
  std::int64_t d = days_from_civil(year, month, day) + 3;
  return static_cast<int>(((d % 7) + 7) % 7);
}

bool is_weekday(const Timestamp& ts) {
  return day_of_week(ts.year, ts.month, ts.day) < 5;
}

std::string format_timestamp(const Timestamp& ts) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d", ts.year, ts.month,
                ts.day, ts.minute_of_day / 60, ts.minute_of_day % 60);
  return buf;
}

Timestamp parse_timestamp(const std::string& text) {
  int y, mo, d, h, mi;
  char t;
  if (std::sscanf(text.c_str(), "%d-%d-%d%c%d:%d", &y, &mo, &d, &t, &h, &mi) != 6 ||
      (t != 'T' && t != ' ')) {
    throw std::invalid_argument("bad timestamp '" + text + "'");
  }
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59) {
    throw std::invalid_argument("timestamp out of range '" + text + "'");
  }
  return Timestamp{y, mo, d, h * 60 + mi};
}

std::string TradingDay::date_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
  return buf;
}

std::vector<MinuteBar> parse_ohlcv(std::istream& in) {
  std::vector<MinuteBar> bars;
  std::string line;
  std::size_t row = 0;
  if (!std::getline(in, line)) throw ParseError(0, "empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "timestamp,open,high,low,close,volume") {
    throw ParseError(0, "bad header '" + line + "'");
  }
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != 6) throw ParseError(row, "expected 6 fields, got " +
                                                      std::to_string(fields.size()));
    MinuteBar bar;
    try {
      bar.ts = parse_timestamp(fields[0]);
    } catch (const std::invalid_argument& e) {
      throw ParseError(row, e.what());
    }
    bar.open = parse_double_field(fields[1], row, "open");
    bar.high = parse_double_field(fields[2], row, "high");
    bar.low = parse_double_field(fields[3], row, "low");
    bar.close = parse_double_field(fields[4], row, "close");
    std::int64_t vol = 0;
    auto [p, ec] = std::from_chars(fields[5].data(), fields[5].data() + fields[5].size(), vol);
    if (ec != std::errc{} || p != fields[5].data() + fields[5].size() || vol < 0) {
      throw ParseError(row, "bad volume '" + fields[5] + "'");
    }
    bar.volume = vol;
    if (!bar.valid()) throw ParseError(row, "bar violates OHLC invariants");
    if (!bars.empty() && !(bars.back().ts < bar.ts)) {
      throw ParseError(row, "non-monotone timestamp " + format_timestamp(bar.ts));
    }
    bars.push_back(bar);
  }
  return bars;
}

std::vector<MinuteBar> parse_ohlcv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_ohlcv(in);
}

void serialize_ohlcv(std::span<const MinuteBar> bars, std::ostream& out) {
  out << "timestamp,open,high,low,close,volume\n";
  for (const auto& b : bars) {
    out << format_timestamp(b.ts) << ',' << format_double(b.open) << ','
        << format_double(b.high) << ',' << format_double(b.low) << ','
        << format_double(b.close) << ',' << b.volume << '\n';
  }
}

std::string serialize_ohlcv(std::span<const MinuteBar> bars) {
  std::ostringstream ss;
  serialize_ohlcv(bars, ss);
  return ss.str();
}

std::vector<TradingDay> segment_days(std::span<const MinuteBar> bars,
                                     int max_missing_bars) {
  std::map<std::tuple<int, int, int>, TradingDay> by_date;
  for (const auto& b : bars) {
    if (b.ts.minute_of_day < kSessionOpenMinute ||
        b.ts.minute_of_day >= kSessionCloseMinute) {
      continue;
    }
    if (!is_weekday(b.ts)) continue;
    auto key = std::make_tuple(b.ts.year, b.ts.month, b.ts.day);
    auto& day = by_date[key];
    day.year = b.ts.year;
    day.month = b.ts.month;
    day.day = b.ts.day;
    day.bars.push_back(b);
  }
  std::vector<TradingDay> days;
  days.reserve(by_date.size());
  for (auto& [key, day] : by_date) {
    day.incomplete =
        static_cast<int>(day.bars.size()) < kSessionBars - max_missing_bars;
    days.push_back(std::move(day));
  }
  return days;
}

namespace {

void advance_weekday(int& y, int& m, int& d) {
  auto next = [&] {
    static const int mdays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int md = mdays[m - 1];
    if (m == 2 && ((y % 4 == 0 && y % 100 != 0) || y % 400 == 0)) md = 29;
    if (++d > md) {
      d = 1;
      if (++m > 12) {
        m = 1;
        ++y;
      }
    }
  };
  do {
    next();
  } while (day_of_week(y, m, d) >= 5);
}

}  // namespace

std::vector<TradingDay> generate_synthetic(const SyntheticSpec& spec) {
  if (spec.length_days <= 0) throw std::invalid_argument("length_days must be positive");
  if (spec.volatility <= 0.0) throw std::invalid_argument("volatility must be positive");
  if (spec.base_price <= 0.0) throw std::invalid_argument("base_price must be positive");

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<std::int64_t> volume_dist(100, 2000);

  int y = spec.start_year, m = spec.start_month, d = spec.start_day;
  if (day_of_week(y, m, d) >= 5) advance_weekday(y, m, d);

  std::vector<TradingDay> days;
  days.reserve(spec.length_days);
  double close = spec.base_price;
  std::int64_t k = 0;  // global minute counter for the sinusoid phase
  const double sin_period = 75.0;

  for (int di = 0; di < spec.length_days; ++di) {
    TradingDay day;
    day.year = y;
    day.month = m;
    day.day = d;
    day.bars.reserve(kSessionBars);
    for (int i = 0; i < kSessionBars; ++i, ++k) {
      double next_close = close;
      switch (spec.kind) {
        case SyntheticKind::RandomWalk:
          next_close = close * std::exp(spec.drift + spec.volatility * gauss(rng));
          break;
        case SyntheticKind::DeterministicTrend:
          next_close = close * std::exp(spec.drift > 0 ? spec.drift : 1e-6);
          break;
        case SyntheticKind::Sinusoid: {
          double amp = std::min(spec.volatility * 50.0, 0.5);
          next_close = spec.base_price *
                       std::exp(spec.drift * static_cast<double>(k)) *
                       (1.0 + amp * std::sin(2.0 * M_PI * static_cast<double>(k) / sin_period));
          break;
        }
      }
      MinuteBar bar;
      bar.ts = Timestamp{y, m, d, kSessionOpenMinute + i};
      bar.open = 0.5 * (close + next_close);
      bar.close = next_close;
      double span = std::abs(next_close - close);
      bar.high = std::max(bar.open, bar.close) + 0.1 * span;
      bar.low = std::min(bar.open, bar.close) - 0.1 * span;
      if (bar.low <= 0.0) bar.low = std::min(bar.open, bar.close);
      bar.volume = volume_dist(rng);
      day.bars.push_back(bar);
      close = next_close;
    }
    days.push_back(std::move(day));
    advance_weekday(y, m, d);
  }
  return days;
}

}  // namespace rift
