#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace pmr {

// Bit/bipolar convention shared by every module:
//   code bit 1 <-> bipolar +1 <-> positive LLR.
inline constexpr double kSaturated = 1e30;
inline constexpr double kSaturationThreshold = 1e29;

inline bool is_saturated(double llr) { return std::abs(llr) >= kSaturationThreshold; }

inline double saturate(int sign) { return sign >= 0 ? kSaturated : -kSaturated; }

inline double clamp_llr(double llr) {
  if (llr > kSaturated) return kSaturated;
  if (llr < -kSaturated) return -kSaturated;
  return llr;
}

inline double bipolar(std::uint8_t bit) { return bit ? 1.0 : -1.0; }

inline std::uint8_t hard_bit(double llr) { return llr > 0.0 ? 1 : 0; }

using Bits = std::vector<std::uint8_t>;

/// Signed log-likelihood ratios log(Pr(.|+1)/Pr(.|-1)). Saturated entries
/// hold +-kSaturated and stand for +-infinity.
class LlrVector {
 public:
  LlrVector() = default;
  explicit LlrVector(std::size_t n, double value = 0.0) : values_(n, value) {}
  explicit LlrVector(std::vector<double> values) : values_(std::move(values)) {}

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  std::span<const double> values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }

  void pin(std::size_t i, int sign) { values_[i] = saturate(sign); }
  bool pinned(std::size_t i) const { return is_saturated(values_[i]); }

  std::vector<std::size_t> pinned_positions() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (pinned(i)) out.push_back(i);
    return out;
  }

  Bits hard_decisions() const {
    Bits out(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) out[i] = hard_bit(values_[i]);
    return out;
  }

  friend bool operator==(const LlrVector&, const LlrVector&) = default;

 private:
  std::vector<double> values_;
};

/// Extrinsic part of a soft output: posterior - input, except that saturated
/// inputs pass through unchanged.
inline LlrVector extrinsic(const LlrVector& posterior, const LlrVector& input) {
  LlrVector out(posterior.size());
  for (std::size_t i = 0; i < posterior.size(); ++i) {
    if (is_saturated(input[i]))
      out[i] = input[i];
    else if (is_saturated(posterior[i]))
      out[i] = posterior[i];
    else
      out[i] = clamp_llr(posterior[i] - input[i]);
  }
  return out;
}

}  // namespace pmr
