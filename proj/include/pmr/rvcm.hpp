#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "pmr/turboeq.hpp"

namespace pmr {

enum class RestartMode {
  kFullLoop,  // rerun detector and decoder
  kBpOnly,    // rerun BP on the baseline's final channel-side LLRs
};

struct RvcmConfig {
  static constexpr std::size_t kAll = std::numeric_limits<std::size_t>::max();

  std::size_t i_max = 10;  // kAll means i_max = n
  ReliabilitySource selection_source = ReliabilitySource::kDetectorApp;
  bool include_baseline = true;
  bool early_exit = true;
  RestartMode restart = RestartMode::kFullLoop;
  int threads = 1;

  std::size_t resolved_i_max(std::size_t n) const { return i_max == kAll ? n : i_max; }
};

struct Candidate {
  DecodeResult decoded;
  std::optional<std::size_t> position;  // empty for the baseline
  int sign = 0;                         // -1 or +1 saturation, 0 for the baseline
  double metric = 0.0;

  bool is_codeword() const { return decoded.is_codeword; }
};

struct CandidateSet {
  Candidate baseline;
  std::vector<Candidate> entries;        // d^-_{p_0}, d^+_{p_0}, d^-_{p_1}, ...
  std::vector<std::size_t> critical;     // p
  LlrVector reliability;                 // snapshot taken before any restart
  std::optional<std::size_t> selected;   // index into entries; empty = baseline
};

struct RvcmResult {
  DecodeResult best;
  double best_metric = 0.0;
  CandidateSet candidates;
};

/// Positions of the i_max smallest |l|, ascending |l|, ties to the lower index.
std::vector<std::size_t> select_critical(std::span<const double> reliability, std::size_t i_max);

/// Squared distance between z and the target-domain reconstruction of the
/// candidate codeword (pad symbols before and after included).
double euclidean_metric(const Bits& candidate, std::span<const double> z, const PrTarget& target,
                        std::uint8_t pad_bit = 0);

RvcmResult rvcm_decode(const TrellisSpec& trellis, std::span<const double> z,
                       const ParityCheckMatrix& h, const LoopConfig& loop_cfg,
                       const RvcmConfig& cfg);

}  // namespace pmr
