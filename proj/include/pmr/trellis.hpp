#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pmr/llr.hpp"
#include "pmr/target.hpp"

namespace pmr {

/// Detector state machine for a PR target. A state holds the previous
/// L-1 input bits, most recent in bit 0.
struct TrellisSpec {
  struct Branch {
    std::uint32_t from = 0;
    std::uint32_t to = 0;
    std::uint8_t input = 0;
    double output = 0.0;
  };

  PrTarget target;
  std::uint32_t n_states = 1;
  std::vector<Branch> branches;  // index = 2 * state + input

  const Branch& branch(std::uint32_t state, std::uint8_t input) const {
    return branches[2 * state + input];
  }
  std::uint32_t pad_state(std::uint8_t pad_bit) const { return pad_bit ? n_states - 1 : 0; }
};

inline constexpr std::size_t kMaxTargetLength = 16;

TrellisSpec build_trellis(const PrTarget& target);

enum class Combine {
  kLogSumExp,  // exact
  kMaxLog,     // max-star without the correction term
};

struct DetectorConfig {
  double assumed_sigma2 = 1.0;
  double mismatch_db = 0.0;
  Combine combine = Combine::kLogSumExp;

  double effective_sigma2() const;
  void validate() const;
};

struct DetectorOutput {
  LlrVector app;
  LlrVector extrinsic;
};

/// Forward-backward MAP detection of the n = priors.size() data symbols.
/// `z` carries the n data-aligned samples followed by L-1 samples driven by
/// the known postamble; the preamble and postamble symbols equal `pad_bit`
/// and pin the start and end states.
DetectorOutput bcjr(const TrellisSpec& spec, std::span<const double> z, const LlrVector& priors,
                    const DetectorConfig& cfg, std::uint8_t pad_bit = 0);

}  // namespace pmr
