#pragma once

#include <span>
#include <string>
#include <vector>

namespace pmr {

/// Partial-response target polynomial. Outputs are driven by 0.5 * bipolar
/// symbols, so an all-(+1) input settles at 0.5 * sum(coefficients).
struct PrTarget {
  std::vector<double> coefficients{4.0, 6.0, 4.0, 2.0};
  std::string label = "4642";

  std::size_t length() const { return coefficients.size(); }
  std::size_t memory() const { return coefficients.size() - 1; }
  void validate() const;

  static PrTarget pr4642() { return {}; }
  static PrTarget memoryless(double c0) { return {{c0}, "memoryless"}; }
};

/// d_j = 0.5 * sum_i g_i b_{j-i} for j in [0, bipolar.size()), with b_{<0}
/// taken as `history`.
std::vector<double> target_response(const PrTarget& target, std::span<const double> bipolar,
                                    double history = -1.0);

}  // namespace pmr
