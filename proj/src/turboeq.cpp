#include "pmr/turboeq.hpp"

#include <stdexcept>

namespace pmr {

void LoopConfig::validate() const {
  if (outer_iters < 1) throw std::invalid_argument("LoopConfig: outer_iters must be >= 1");
  bp.validate();
  detector.validate();
}

void apply_overrides(LlrVector& llr, const LlrVector& overrides) {
  if (overrides.size() != llr.size())
    throw std::invalid_argument("apply_overrides: length mismatch");
  for (std::size_t i = 0; i < llr.size(); ++i)
    if (overrides.pinned(i)) llr[i] = overrides[i];
}

LoopResult iterative_decode(const TrellisSpec& trellis, std::span<const double> z, const ParityCheckMatrix& h,
               const LoopConfig& cfg, const LlrVector* overrides) {
  cfg.validate();
  const std::size_t n = h.n();
  if (z.size() != n + trellis.target.memory())
    throw std::invalid_argument("iterative_decode: z length must be n + L - 1");

  LoopResult res;
  LlrVector decoder_extrinsic(n, 0.0);
  for (int pass = 0; pass < cfg.outer_iters; ++pass) {
    auto det = bcjr(trellis, z, decoder_extrinsic, cfg.detector, cfg.pad_bit);
    LlrVector channel = det.extrinsic;
    if (overrides) apply_overrides(channel, *overrides);
    res.decoded = bp_decode(h, channel, cfg.bp);
    res.trace.push_back(h.syndrome_weight(res.decoded.hard_bits));
    decoder_extrinsic = extrinsic(res.decoded.soft_llr, channel);
    res.detector_app = std::move(det.app);
    res.detector_extrinsic = std::move(channel);
    if (res.decoded.is_codeword) break;
  }
  return res;
}

}  // namespace pmr
