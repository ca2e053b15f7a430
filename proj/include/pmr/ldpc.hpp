#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pmr/llr.hpp"

namespace pmr {

class AlistError : public std::runtime_error {
 public:
  AlistError(int line, const std::string& what)
      : std::runtime_error("alist line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Sparse binary parity-check matrix with a precomputed systematic encoder.
/// Rank-deficient matrices are accepted; k = n - rank.
class ParityCheckMatrix {
 public:
  ParityCheckMatrix() = default;
  ParityCheckMatrix(std::size_t n, std::vector<std::vector<std::uint32_t>> rows,
                    std::string label = {}, std::optional<int> claimed_min_distance = {});

  /// n columns and no checks: every word is a codeword.
  static ParityCheckMatrix uncoded(std::size_t n);

  std::size_t n() const { return n_; }
  std::size_t m() const { return rows_.size(); }
  std::size_t rank() const { return pivots_.size(); }
  std::size_t k() const { return n_ - rank(); }
  std::size_t edges() const { return edges_; }

  const std::vector<std::vector<std::uint32_t>>& rows() const { return rows_; }
  const std::vector<std::vector<std::uint32_t>>& cols() const { return cols_; }
  const std::string& label() const { return label_; }
  std::optional<int> claimed_min_distance() const { return claimed_min_distance_; }

  /// Codeword positions carrying the message, in message order.
  const std::vector<std::uint32_t>& info_positions() const { return info_positions_; }

  Bits encode(const Bits& message) const;
  Bits extract_message(const Bits& codeword) const;
  std::vector<Bits> generator() const;

  Bits syndrome(const Bits& word) const;
  std::size_t syndrome_weight(const Bits& word) const;
  bool is_codeword(const Bits& word) const { return syndrome_weight(word) == 0; }

 private:
  struct ParityEquation {
    std::uint32_t position;
    std::vector<std::uint32_t> message_terms;  // indices into the message
  };

  void build_adjacency();
  void reduce();

  std::size_t n_ = 0;
  std::vector<std::vector<std::uint32_t>> rows_;
  std::vector<std::vector<std::uint32_t>> cols_;
  std::size_t edges_ = 0;
  std::string label_;
  std::optional<int> claimed_min_distance_;
  std::vector<std::uint32_t> pivots_;
  std::vector<std::uint32_t> info_positions_;
  std::vector<ParityEquation> parity_;
};

ParityCheckMatrix load_alist(std::istream& is, std::string label = {});
ParityCheckMatrix load_alist(const std::string& path);
void save_alist(std::ostream& os, const ParityCheckMatrix& h);
void save_alist(const std::string& path, const ParityCheckMatrix& h);

Bits encode(const ParityCheckMatrix& h, const Bits& message);

enum class CheckRule {
  kTanh,     // product of tanh(L/2)
  kBoxPlus,  // pairwise exact max-star combination
};

struct BpConfig {
  int max_iters = 100;
  bool early_stop = true;
  double damping = 1.0;
  CheckRule rule = CheckRule::kTanh;

  void validate() const;
};

struct DecodeResult {
  Bits hard_bits;
  LlrVector soft_llr;
  bool is_codeword = false;
  int iterations_used = 0;
};

/// Flooding sum-product decoding in the log domain. Saturated channel LLRs
/// act as hard constraints.
DecodeResult bp_decode(const ParityCheckMatrix& h, const LlrVector& channel_llr,
                       const BpConfig& cfg = {});

}  // namespace pmr
