#include "pmr/ldpc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace pmr {

ParityCheckMatrix::ParityCheckMatrix(std::size_t n, std::vector<std::vector<std::uint32_t>> rows,
                                     std::string label, std::optional<int> claimed_min_distance)
    : n_(n),
      rows_(std::move(rows)),
      label_(std::move(label)),
      claimed_min_distance_(claimed_min_distance) {
  for (auto& row : rows_) {
    std::sort(row.begin(), row.end());
    if (std::adjacent_find(row.begin(), row.end()) != row.end())
      throw std::invalid_argument("ParityCheckMatrix: duplicate entry in row");
    if (!row.empty() && row.back() >= n_)
      throw std::invalid_argument("ParityCheckMatrix: column index out of range");
  }
  build_adjacency();
  reduce();
}

ParityCheckMatrix ParityCheckMatrix::uncoded(std::size_t n) {
  return ParityCheckMatrix(n, {}, "uncoded");
}

void ParityCheckMatrix::build_adjacency() {
  cols_.assign(n_, {});
  edges_ = 0;
  for (std::uint32_t r = 0; r < rows_.size(); ++r) {
    for (auto c : rows_[r]) cols_[c].push_back(r);
    edges_ += rows_[r].size();
  }
}

// Gauss-Jordan over GF(2), pivoting from the last column backwards so that a
// matrix of the form [P | I] yields the leading positions as message bits.
void ParityCheckMatrix::reduce() {
  const std::size_t words = (n_ + 63) / 64;
  std::vector<std::vector<std::uint64_t>> dense(rows_.size(), std::vector<std::uint64_t>(words, 0));
  for (std::size_t r = 0; r < rows_.size(); ++r)
    for (auto c : rows_[r]) dense[r][c / 64] |= std::uint64_t{1} << (c % 64);
  auto bit = [&](std::size_t r, std::size_t c) { return (dense[r][c / 64] >> (c % 64)) & 1u; };

  pivots_.clear();
  std::vector<bool> is_pivot(n_, false);
  std::size_t lead = 0;
  for (std::size_t c = n_; c-- > 0 && lead < dense.size();) {
    std::size_t r = lead;
    while (r < dense.size() && !bit(r, c)) ++r;
    if (r == dense.size()) continue;
    std::swap(dense[r], dense[lead]);
    for (std::size_t o = 0; o < dense.size(); ++o) {
      if (o == lead || !bit(o, c)) continue;
      for (std::size_t w = 0; w < words; ++w) dense[o][w] ^= dense[lead][w];
    }
    pivots_.push_back(static_cast<std::uint32_t>(c));
    is_pivot[c] = true;
    ++lead;
  }

  info_positions_.clear();
  std::vector<std::uint32_t> message_index(n_, 0);
  for (std::uint32_t c = 0; c < n_; ++c) {
    if (is_pivot[c]) continue;
    message_index[c] = static_cast<std::uint32_t>(info_positions_.size());
    info_positions_.push_back(c);
  }
  parity_.clear();
  for (std::size_t r = 0; r < pivots_.size(); ++r) {
    ParityEquation eq{pivots_[r], {}};
    for (auto c : info_positions_)
      if (bit(r, c)) eq.message_terms.push_back(message_index[c]);
    parity_.push_back(std::move(eq));
  }
}

Bits ParityCheckMatrix::encode(const Bits& message) const {
  if (message.size() != k())
    throw std::invalid_argument("encode: message length " + std::to_string(message.size()) +
                                " != k = " + std::to_string(k()));
  Bits c(n_, 0);
  for (std::size_t i = 0; i < info_positions_.size(); ++i) c[info_positions_[i]] = message[i] & 1u;
  for (const auto& eq : parity_) {
    std::uint8_t acc = 0;
    for (auto t : eq.message_terms) acc ^= message[t] & 1u;
    c[eq.position] = acc;
  }
  return c;
}

Bits ParityCheckMatrix::extract_message(const Bits& codeword) const {
  Bits m(info_positions_.size());
  for (std::size_t i = 0; i < info_positions_.size(); ++i) m[i] = codeword[info_positions_[i]];
  return m;
}

std::vector<Bits> ParityCheckMatrix::generator() const {
  std::vector<Bits> g;
  g.reserve(k());
  Bits unit(k(), 0);
  for (std::size_t i = 0; i < k(); ++i) {
    unit[i] = 1;
    g.push_back(encode(unit));
    unit[i] = 0;
  }
  return g;
}

Bits ParityCheckMatrix::syndrome(const Bits& word) const {
  if (word.size() != n_) throw std::invalid_argument("syndrome: word length != n");
  Bits s(rows_.size(), 0);
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    std::uint8_t acc = 0;
    for (auto c : rows_[r]) acc ^= word[c] & 1u;
    s[r] = acc;
  }
  return s;
}

std::size_t ParityCheckMatrix::syndrome_weight(const Bits& word) const {
  const auto s = syndrome(word);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), 1));
}

Bits encode(const ParityCheckMatrix& h, const Bits& message) { return h.encode(message); }

// ---------------------------------------------------------------------------
// alist

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& is) : is_(is) {}

  std::vector<long> next(const std::string& section) {
    std::string line;
    while (std::getline(is_, line)) {
      ++line_no_;
      std::istringstream ss(line);
      std::vector<long> values;
      std::string tok;
      while (ss >> tok) {
        try {
          std::size_t used = 0;
          values.push_back(std::stol(tok, &used));
          if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
          throw AlistError(line_no_, "non-integer token '" + tok + "' in " + section);
        }
      }
      if (!values.empty()) return values;
    }
    throw AlistError(line_no_ + 1, "truncated file: missing " + section);
  }

  int line() const { return line_no_; }

 private:
  std::istream& is_;
  int line_no_ = 0;
};

std::vector<std::vector<std::uint32_t>> read_lists(LineReader& in, std::size_t count,
                                                   const std::vector<long>& weights,
                                                   long max_weight, long index_limit,
                                                   const std::string& section) {
  std::vector<std::vector<std::uint32_t>> lists(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto vals = in.next(section + " " + std::to_string(i + 1));
    if (static_cast<long>(vals.size()) > std::max<long>(max_weight, weights[i]))
      throw AlistError(in.line(), section + " " + std::to_string(i + 1) + ": too many entries");
    for (long v : vals) {
      if (v == 0) continue;
      if (v < 0 || v > index_limit)
        throw AlistError(in.line(), section + " " + std::to_string(i + 1) + ": index " +
                                        std::to_string(v) + " out of range");
      lists[i].push_back(static_cast<std::uint32_t>(v - 1));
    }
    auto sorted = lists[i];
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw AlistError(in.line(), section + " " + std::to_string(i + 1) + ": duplicate entry");
    if (static_cast<long>(lists[i].size()) != weights[i])
      throw AlistError(in.line(), section + " " + std::to_string(i + 1) + ": expected " +
                                      std::to_string(weights[i]) + " entries, found " +
                                      std::to_string(lists[i].size()));
  }
  return lists;
}

}  // namespace

ParityCheckMatrix load_alist(std::istream& is, std::string label) {
  LineReader in(is);
  auto dims = in.next("dimensions line");
  if (dims.size() != 2 || dims[0] <= 0 || dims[1] < 0)
    throw AlistError(in.line(), "dimensions line must be 'n m'");
  const long n = dims[0], m = dims[1];
  auto maxw = in.next("max weight line");
  if (maxw.size() != 2 || maxw[0] < 0 || maxw[1] < 0)
    throw AlistError(in.line(), "max weight line must hold two counts");

  std::vector<long> col_w, row_w;
  if (n > 0) {
    col_w = in.next("column weights");
    if (static_cast<long>(col_w.size()) != n)
      throw AlistError(in.line(), "expected " + std::to_string(n) + " column weights");
  }
  if (m > 0) {
    row_w = in.next("row weights");
    if (static_cast<long>(row_w.size()) != m)
      throw AlistError(in.line(), "expected " + std::to_string(m) + " row weights");
  }
  for (long w : col_w)
    if (w < 0 || w > maxw[0]) throw AlistError(in.line(), "column weight exceeds declared max");
  for (long w : row_w)
    if (w < 0 || w > maxw[1]) throw AlistError(in.line(), "row weight exceeds declared max");

  // Rows or columns of weight zero have an empty line only when the file
  // zero-pads; require at least one token per list line.
  auto cols = read_lists(in, static_cast<std::size_t>(n), col_w, maxw[0], m, "column list");
  auto rows = read_lists(in, static_cast<std::size_t>(m), row_w, maxw[1], n, "row list");

  std::vector<std::vector<std::uint32_t>> from_cols(static_cast<std::size_t>(m));
  for (std::uint32_t c = 0; c < cols.size(); ++c)
    for (auto r : cols[c]) from_cols[r].push_back(c);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto a = rows[r], b = from_cols[r];
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b)
      throw AlistError(in.line(), "row list " + std::to_string(r + 1) +
                                      " disagrees with column lists");
  }
  return ParityCheckMatrix(static_cast<std::size_t>(n), std::move(rows), std::move(label));
}

ParityCheckMatrix load_alist(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open alist file: " + path);
  auto slash = path.find_last_of('/');
  return load_alist(f, slash == std::string::npos ? path : path.substr(slash + 1));
}

void save_alist(std::ostream& os, const ParityCheckMatrix& h) {
  std::size_t max_col = 0, max_row = 0;
  for (const auto& c : h.cols()) max_col = std::max(max_col, c.size());
  for (const auto& r : h.rows()) max_row = std::max(max_row, r.size());
  os << h.n() << ' ' << h.m() << '\n' << max_col << ' ' << max_row << '\n';
  auto join = [&os](const auto& seq) {
    bool first = true;
    for (auto v : seq) {
      os << (first ? "" : " ") << v;
      first = false;
    }
    os << '\n';
  };
  std::vector<std::size_t> w;
  for (const auto& c : h.cols()) w.push_back(c.size());
  if (h.n() > 0) join(w);
  w.clear();
  for (const auto& r : h.rows()) w.push_back(r.size());
  if (h.m() > 0) join(w);
  auto padded = [](const std::vector<std::uint32_t>& list, std::size_t width) {
    std::vector<std::uint32_t> out;
    for (auto v : list) out.push_back(v + 1);
    out.resize(std::max<std::size_t>(width, 1), 0);
    return out;
  };
  for (const auto& c : h.cols()) join(padded(c, max_col));
  for (const auto& r : h.rows()) join(padded(r, max_row));
}

void save_alist(const std::string& path, const ParityCheckMatrix& h) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write alist file: " + path);
  save_alist(f, h);
}

// ---------------------------------------------------------------------------
// belief propagation

void BpConfig::validate() const {
  if (max_iters < 1) throw std::invalid_argument("BpConfig: max_iters must be >= 1");
  if (!(damping > 0.0 && damping <= 1.0))
    throw std::invalid_argument("BpConfig: damping must be in (0, 1]");
}

namespace {

// Parity combination of two LLRs under the bit-1-positive convention.
double box_plus(double a, double b) {
  // Standard-convention box-plus applied to -a, -b, then negated back.
  const double sa = -a, sb = -b;
  const double sign = (sa < 0) != (sb < 0) ? -1.0 : 1.0;
  double v = sign * std::min(std::abs(sa), std::abs(sb)) + std::log1p(std::exp(-std::abs(sa + sb))) -
             std::log1p(std::exp(-std::abs(sa - sb)));
  return -v;
}

const double kTanhCap = std::nextafter(1.0, 0.0);

void check_update_tanh(const std::vector<double>& in, std::vector<double>& out,
                       std::vector<double>& fwd, std::vector<double>& bwd) {
  const std::size_t d = in.size();
  std::size_t unsaturated = 0;
  std::vector<double> t(d);
  for (std::size_t i = 0; i < d; ++i) {
    if (is_saturated(in[i])) {
      t[i] = in[i] > 0 ? -1.0 : 1.0;
    } else {
      t[i] = -std::tanh(0.5 * in[i]);
      ++unsaturated;
    }
  }
  fwd[0] = 1.0;
  for (std::size_t i = 1; i < d; ++i) fwd[i] = fwd[i - 1] * t[i - 1];
  bwd[d - 1] = 1.0;
  for (std::size_t i = d - 1; i-- > 0;) bwd[i] = bwd[i + 1] * t[i + 1];
  for (std::size_t i = 0; i < d; ++i) {
    const double prod = fwd[i] * bwd[i];
    const std::size_t others = unsaturated - (is_saturated(in[i]) ? 0 : 1);
    if (others == 0) {
      out[i] = prod > 0 ? -kSaturated : kSaturated;
    } else {
      out[i] = -2.0 * std::atanh(std::clamp(prod, -kTanhCap, kTanhCap));
    }
  }
}

void check_update_boxplus(const std::vector<double>& in, std::vector<double>& out,
                          std::vector<double>& fwd, std::vector<double>& bwd) {
  const std::size_t d = in.size();
  fwd[0] = in[0];
  for (std::size_t i = 1; i < d; ++i) fwd[i] = box_plus(fwd[i - 1], in[i]);
  bwd[d - 1] = in[d - 1];
  for (std::size_t i = d - 1; i-- > 0;) bwd[i] = box_plus(bwd[i + 1], in[i]);
  for (std::size_t i = 0; i < d; ++i) {
    double v;
    if (i == 0)
      v = bwd[1];
    else if (i == d - 1)
      v = fwd[d - 2];
    else
      v = box_plus(fwd[i - 1], bwd[i + 1]);
    out[i] = clamp_llr(v);
  }
}

}  // namespace

DecodeResult bp_decode(const ParityCheckMatrix& h, const LlrVector& channel_llr,
                       const BpConfig& cfg) {
  cfg.validate();
  if (channel_llr.size() != h.n()) throw std::invalid_argument("bp_decode: LLR length != n");
  const auto& rows = h.rows();
  const auto& cols = h.cols();
  const std::size_t n = h.n();

  // Edge storage is row-major; col_edges maps each variable to its edges.
  std::vector<std::size_t> row_start(rows.size() + 1, 0);
  for (std::size_t r = 0; r < rows.size(); ++r) row_start[r + 1] = row_start[r] + rows[r].size();
  std::vector<std::vector<std::size_t>> col_edges(n);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t j = 0; j < rows[r].size(); ++j) col_edges[rows[r][j]].push_back(row_start[r] + j);

  const std::size_t n_edges = row_start.back();
  std::vector<double> v2c(n_edges), c2v(n_edges, 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t j = 0; j < rows[r].size(); ++j) v2c[row_start[r] + j] = channel_llr[rows[r][j]];

  std::size_t max_deg = 1;
  for (const auto& r : rows) max_deg = std::max(max_deg, r.size());
  for (const auto& c : cols) max_deg = std::max(max_deg, c.size() + 1);
  std::vector<double> in(max_deg), out(max_deg), fwd(max_deg), bwd(max_deg);

  DecodeResult res;
  res.soft_llr = LlrVector(n);
  res.hard_bits.assign(n, 0);

  for (int it = 1; it <= cfg.max_iters; ++it) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const std::size_t d = rows[r].size();
      if (d == 0) continue;
      if (d == 1) {
        // A weight-1 check forces its bit to zero.
        const double msg = -kSaturated;
        c2v[row_start[r]] = cfg.damping * msg + (1.0 - cfg.damping) * c2v[row_start[r]];
        continue;
      }
      in.resize(d);
      out.resize(d);
      fwd.resize(d);
      bwd.resize(d);
      for (std::size_t j = 0; j < d; ++j) in[j] = v2c[row_start[r] + j];
      if (cfg.rule == CheckRule::kTanh)
        check_update_tanh(in, out, fwd, bwd);
      else
        check_update_boxplus(in, out, fwd, bwd);
      for (std::size_t j = 0; j < d; ++j) {
        auto& m = c2v[row_start[r] + j];
        m = it == 1 || cfg.damping == 1.0 ? out[j] : cfg.damping * out[j] + (1.0 - cfg.damping) * m;
      }
    }

    for (std::size_t v = 0; v < n; ++v) {
      const auto& edges = col_edges[v];
      const std::size_t d = edges.size();
      const double ch = channel_llr[v];
      // prefix/suffix sums keep each outgoing message exact even when a
      // single incoming message is saturated.
      fwd.resize(d + 1);
      bwd.resize(d + 1);
      fwd[0] = 0.0;
      for (std::size_t j = 0; j < d; ++j) fwd[j + 1] = fwd[j] + c2v[edges[j]];
      bwd[d] = 0.0;
      for (std::size_t j = d; j-- > 0;) bwd[j] = bwd[j + 1] + c2v[edges[j]];
      res.soft_llr[v] = clamp_llr(ch + fwd[d]);
      for (std::size_t j = 0; j < d; ++j) v2c[edges[j]] = clamp_llr(ch + fwd[j] + bwd[j + 1]);
      res.hard_bits[v] = hard_bit(res.soft_llr[v]);
    }
    res.iterations_used = it;
    if (cfg.early_stop && h.is_codeword(res.hard_bits)) break;
  }
  res.is_codeword = h.is_codeword(res.hard_bits);
  return res;
}

}  // namespace pmr
