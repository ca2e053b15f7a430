#include "pmr/target.hpp"

#include <algorithm>
#include <stdexcept>

namespace pmr {

void PrTarget::validate() const {
  if (coefficients.empty()) throw std::invalid_argument("PrTarget: empty coefficient list");
  if (std::all_of(coefficients.begin(), coefficients.end(), [](double c) { return c == 0.0; }))
    throw std::invalid_argument("PrTarget: coefficients all zero");
}

std::vector<double> target_response(const PrTarget& target, std::span<const double> bipolar,
                                    double history) {
  target.validate();
  const auto n = static_cast<std::ptrdiff_t>(bipolar.size());
  const auto len = static_cast<std::ptrdiff_t>(target.length());
  std::vector<double> out(bipolar.size(), 0.0);
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::ptrdiff_t i = 0; i < len; ++i)
      acc += target.coefficients[i] * (j - i >= 0 ? bipolar[j - i] : history);
    out[j] = 0.5 * acc;
  }
  return out;
}

}  // namespace pmr
