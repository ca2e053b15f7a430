#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pmr/ldpc.hpp"
#include "pmr/trellis.hpp"

namespace pmr {

enum class ReliabilitySource {
  kDetectorApp,   // APP of the channel detector on the last pass
  kBpPosterior,   // soft output of the final BP pass
};

struct LoopConfig {
  int outer_iters = 10;
  BpConfig bp;
  DetectorConfig detector;
  std::uint8_t pad_bit = 0;

  void validate() const;
};

struct LoopResult {
  DecodeResult decoded;
  LlrVector detector_app;
  LlrVector detector_extrinsic;  // channel-side input of the final BP pass
  std::vector<std::size_t> trace;  // syndrome weight after each outer pass

  const LlrVector& reliability(ReliabilitySource src = ReliabilitySource::kDetectorApp) const {
    return src == ReliabilitySource::kDetectorApp ? detector_app : decoded.soft_llr;
  }
};

/// Iterative detection/decoding: BCJR on z with decoder extrinsic as priors,
/// then BP on the detector extrinsic, until BP yields a codeword or
/// outer_iters passes. Saturated entries of `overrides` replace the
/// channel-side LLR fed to BP on every pass. Stateless.
LoopResult iterative_decode(const TrellisSpec& trellis, std::span<const double> z, const ParityCheckMatrix& h,
               const LoopConfig& cfg, const LlrVector* overrides = nullptr);

/// Copies saturated entries of `overrides` onto `llr`.
void apply_overrides(LlrVector& llr, const LlrVector& overrides);

}  // namespace pmr
