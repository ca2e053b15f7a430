#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "pmr/target.hpp"
#include "pmr/waveform.hpp"

namespace pmr {

struct EqualizerDesign {
  std::vector<double> taps;
  int delay = 0;
  double residual_mse = 0.0;

  static EqualizerDesign identity(std::size_t n_taps = 1);
};

/// Least-squares FIR fit of `samples` (channel output for `bipolar`) to the
/// target response of `bipolar`. Scans the delay over +-n_taps/2 around the
/// centre tap and keeps the minimum-MSE delay.
EqualizerDesign design_least_squares(std::span<const double> samples,
                                     std::span<const double> bipolar, const PrTarget& target,
                                     int n_taps);

/// Generates a random training frame through the simulated channel and fits
/// an equalizer to it.
EqualizerDesign design_mmse(const StepParams& params, const NoiseConfig& noise,
                            const PrTarget& target, int n_taps = 21,
                            int training_len = 100000, std::uint64_t seed = 1,
                            int span = kDefaultSpan);

/// z_j = sum_l taps_l r_{first + j + delay - l}, j in [0, count). Samples
/// outside the frame repeat the nearest edge sample.
std::vector<double> apply(const EqualizerDesign& design, std::span<const double> samples,
                          std::size_t first, std::size_t count);

/// Text format: "delay <int>" then one line of space-separated taps.
void save_equalizer(std::ostream& os, const EqualizerDesign& design);
EqualizerDesign load_equalizer(std::istream& is);

}  // namespace pmr
