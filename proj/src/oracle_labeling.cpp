#include "rift/oracle_labeling.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rift {

double position_return(double entry_price, double exit_price, double commission) {
  if (entry_price <= 0.0 || exit_price <= 0.0) {
    throw std::invalid_argument("position_return: non-positive price");
  }
  if (commission < 0.0) throw std::invalid_argument("negative commission");
  double cost_basis = entry_price * (1.0 + commission);
  return (exit_price - cost_basis) / cost_basis;
}

std::vector<Position> extract_positions(std::span<const double> prices,
                                        std::span<const std::uint8_t> labels,
                                        double commission) {
  if (prices.size() != labels.size()) {
    throw std::invalid_argument("extract_positions: length mismatch");
  }
  std::vector<Position> positions;
  const int n = static_cast<int>(prices.size());
  int entry = -1;
  for (int t = 0; t < n; ++t) {
    if (labels[t] == 1 && entry < 0) {
      entry = t;
    } else if (labels[t] == 0 && entry >= 0) {
      Position p;
      p.entry_index = entry;
      p.exit_index = t;
      p.entry_price = prices[entry];
      p.exit_price = prices[t];
      p.ret = position_return(p.entry_price, p.exit_price, commission);
      positions.push_back(p);
      entry = -1;
    }
  }
  if (entry >= 0) {
    Position p;
    p.entry_index = entry;
    p.exit_index = n - 1;
    p.entry_price = prices[entry];
    p.exit_price = prices[n - 1];
    p.ret = position_return(p.entry_price, p.exit_price, commission);
    p.open_at_end = true;
    positions.push_back(p);
  }
  return positions;
}

double cumulative_return(std::span<const double> prices,
                         std::span<const std::uint8_t> labels, double commission) {
  double prod = 1.0;
  for (const auto& p : extract_positions(prices, labels, commission)) {
    if (p.ret <= -1.0) throw std::logic_error("position return <= -100%");
    prod *= 1.0 + p.ret;
  }
  return prod - 1.0;
}

LabelSeries oracle_labels(std::span<const double> prices, double commission,
                          std::uint8_t terminal_label) {
  const int n = static_cast<int>(prices.size());
  if (n < 2) throw std::invalid_argument("oracle_labels: need at least 2 prices");
  if (commission < 0.0) throw std::invalid_argument("negative commission");
  for (double p : prices) {
    if (p <= 0.0) throw std::invalid_argument("non-positive price");
  }

  // Log-return reformulation: holding state 1 over step t -> t+1 accrues
  // log(p_{t+1}/p_t); opening (0 -> 1) charges -log(1+commission) once.
  // Maximizing the summed log values maximizes prod(1+r_i).
  const double open_cost = -std::log1p(commission);
  std::vector<double> step_ret(n - 1);
  for (int t = 0; t + 1 < n; ++t) {
    step_ret[t] = std::log(prices[t + 1] / prices[t]);
  }

  // state values: value[t][s] = best cumulative log return ending at time t in
  // state s (s = 0 flat, s = 1 long)
  std::vector<std::array<double, 2>> value(n);
  value[0] = {0.0, open_cost};  // may open at the very first bar
  for (int t = 1; t < n; ++t) {
    double hold = step_ret[t - 1];
    value[t][0] = std::max(value[t - 1][0], value[t - 1][1] + hold);
    value[t][1] = std::max(value[t - 1][0] + open_cost, value[t - 1][1] + hold);
  }

  LabelSeries out;
  out.commission = commission;
  out.terminal_label = terminal_label;
  out.labels.assign(n, 0);
  out.labels[n - 1] = terminal_label;

  // backward reconstruction; ties prefer state 0 (fewer/shorter positions)
  int state = terminal_label;
  for (int t = n - 2; t >= 0; --t) {
    double from_flat = value[t][0] + (state == 1 ? open_cost : 0.0);
    double from_long = value[t][1] + step_ret[t];
    state = from_flat >= from_long ? 0 : 1;
    out.labels[t] = static_cast<std::uint8_t>(state);
  }
  return out;
}

LabelSeries brute_force_labels(std::span<const double> prices, double commission,
                               std::uint8_t terminal_label) {
  const int n = static_cast<int>(prices.size());
  if (n < 2) throw std::invalid_argument("brute_force_labels: need at least 2 prices");
  if (n > 20) throw std::invalid_argument("brute_force_labels: series too long");

  std::vector<std::uint8_t> labels(n), best(n);
  double best_ret = -std::numeric_limits<double>::infinity();
  std::size_t best_positions = 0;
  labels[n - 1] = terminal_label;

  const std::uint64_t count = 1ull << (n - 1);
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    for (int t = 0; t < n - 1; ++t) {
      labels[t] = static_cast<std::uint8_t>((mask >> t) & 1u);
    }
    double r = cumulative_return(prices, labels, commission);
    std::size_t npos = extract_positions(prices, labels, commission).size();
    bool better = false;
    if (r > best_ret + 1e-15) {
      better = true;
    } else if (std::abs(r - best_ret) <= 1e-15) {
      if (npos < best_positions) {
        better = true;
      } else if (npos == best_positions && labels < best) {
        better = true;
      }
    }
    if (better) {
      best_ret = r;
      best_positions = npos;
      best = labels;
    }
  }

  LabelSeries out;
  out.labels = best;
  out.commission = commission;
  out.terminal_label = terminal_label;
  return out;
}

}  // namespace rift
