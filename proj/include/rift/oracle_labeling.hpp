#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace rift {

/// One long round trip implied by a run of 1-labels.  A run still open at the
/// end of the series is marked-to-market at the final price.
struct Position {
  int entry_index = 0;
  int exit_index = 0;  // index whose price closes the position
  double entry_price = 0.0;
  double exit_price = 0.0;
  double ret = 0.0;  // net of the opening commission
  bool open_at_end = false;
};

struct LabelSeries {
  std::vector<std::uint8_t> labels;  // y_t in {0,1}, one per price
  double commission = 0.0;           // opening commission fraction
  std::uint8_t terminal_label = 0;
};

/// (exit - entry*(1+commission)) / (entry*(1+commission)).
double position_return(double entry_price, double exit_price, double commission);

/// One Position per maximal run of 1s; entry at the first 1-bar's price, exit
/// at the first subsequent 0-bar's price.
std::vector<Position> extract_positions(std::span<const double> prices,
                                        std::span<const std::uint8_t> labels,
                                        double commission);

/// prod(1 + r_i) - 1 over extracted positions.
double cumulative_return(std::span<const double> prices,
                         std::span<const std::uint8_t> labels, double commission);

/// Hindsight-optimal binary labels maximizing the commission-adjusted
/// cumulative return with the final label pinned to terminal_label.
/// Dynamic program over two states (flat/long) in log-return space.
LabelSeries oracle_labels(std::span<const double> prices, double commission,
                          std::uint8_t terminal_label = 0);

/// Exhaustive argmax over all 2^(T-1) label sequences with the final label
/// fixed; ties broken by fewest positions, then lexicographically smallest.
/// Verification oracle only; T must be <= 20.
LabelSeries brute_force_labels(std::span<const double> prices, double commission,
                               std::uint8_t terminal_label = 0);

}  // namespace rift
