#include "pmr/codes.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

namespace pmr::codes {

namespace {

class GaloisField {
 public:
  explicit GaloisField(int m) : m_(m), order_((1 << m) - 1) {
    static constexpr unsigned kPrimitive[] = {0, 0, 0x7, 0xB, 0x13, 0x25, 0x43, 0x83, 0x11D};
    if (m < 2 || m > 8) throw std::invalid_argument("GaloisField: degree out of range");
    exp_.resize(2 * order_);
    log_.assign(order_ + 1, -1);
    unsigned x = 1;
    for (int i = 0; i < order_; ++i) {
      exp_[i] = x;
      log_[x] = i;
      x <<= 1;
      if (x & (1u << m)) x ^= kPrimitive[m];
    }
    for (int i = order_; i < 2 * order_; ++i) exp_[i] = exp_[i - order_];
  }

  int order() const { return order_; }
  unsigned alpha(long i) const { return exp_[((i % order_) + order_) % order_]; }
  int log(unsigned x) const { return log_[x]; }

 private:
  int m_;
  int order_;
  std::vector<unsigned> exp_;
  std::vector<int> log_;
};

ParityCheckMatrix circulant(const std::vector<std::uint8_t>& first_row, std::string label,
                            std::optional<int> dmin = {}) {
  const auto n = static_cast<std::uint32_t>(first_row.size());
  std::vector<std::vector<std::uint32_t>> rows(n);
  for (std::uint32_t r = 0; r < n; ++r)
    for (std::uint32_t c = 0; c < n; ++c)
      if (first_row[c]) rows[r].push_back((c + r) % n);
  return ParityCheckMatrix(n, std::move(rows), std::move(label), dmin);
}

std::vector<std::vector<int>> cyclotomic_cosets(int n) {
  std::vector<std::vector<int>> cosets;
  std::vector<bool> seen(n, false);
  for (int a = 0; a < n; ++a) {
    if (seen[a]) continue;
    std::vector<int> c;
    for (int b = a; !seen[b]; b = 2 * b % n) {
      seen[b] = true;
      c.push_back(b);
    }
    cosets.push_back(std::move(c));
  }
  return cosets;
}

// u(alpha^j) for a binary polynomial with the given support.
unsigned evaluate(const GaloisField& gf, const std::vector<int>& support, long j) {
  unsigned v = 0;
  for (int i : support) v ^= gf.alpha(static_cast<long>(i) * j);
  return v;
}

}  // namespace

ParityCheckMatrix hamming74() {
  return ParityCheckMatrix(7, {{0, 1, 3, 4}, {0, 2, 3, 5}, {1, 2, 3, 6}}, "hamming_7_4", 3);
}

ParityCheckMatrix tree7() {
  return ParityCheckMatrix(7, {{0, 1, 2}, {2, 3, 4}, {4, 5, 6}}, "tree_7");
}

ParityCheckMatrix euclidean_geometry(int s) {
  const GaloisField gf(2 * s);
  const int n = gf.order();
  const int q = 1 << s;
  // GF(2^s) inside GF(4^s): 0 and alpha^(j (2^s + 1)).
  std::vector<std::uint8_t> row(n, 0);
  for (int j = -1; j < q - 1; ++j) {
    const unsigned beta = j < 0 ? 0u : gf.alpha(static_cast<long>(j) * (q + 1));
    const unsigned beta_alpha = beta == 0 ? 0u : gf.alpha(gf.log(beta) + 1);
    const unsigned point = 1u ^ beta_alpha;
    if (point == 0) throw std::logic_error("euclidean_geometry: line passes through origin");
    row[gf.log(point)] = 1;
  }
  const int k_expected = s == 2 ? 7 : (s == 4 ? 175 : -1);
  auto h = circulant(row, "eg_" + std::to_string(n),
                     std::optional<int>(q + 1));
  if (k_expected > 0 && static_cast<int>(h.k()) != k_expected)
    throw std::logic_error("euclidean_geometry: unexpected dimension");
  return h;
}

int bch_bound(const std::vector<std::uint8_t>& first_row, int m) {
  const GaloisField gf(m);
  const int n = gf.order();
  std::vector<int> support;
  for (int i = 0; i < n; ++i)
    if (first_row[i]) support.push_back(i);
  // c is orthogonal to every shift of u iff c(alpha^j) = 0 whenever
  // u(alpha^-j) != 0.
  std::vector<bool> zero(n);
  for (int j = 0; j < n; ++j) zero[j] = evaluate(gf, support, -j) != 0;
  int best = 0;
  for (int step = 1; step < n; ++step) {
    if (std::gcd(step, n) != 1) continue;
    for (int start = 0; start < n; ++start) {
      int run = 0;
      while (run < n && zero[(start + static_cast<long>(run) * step) % n]) ++run;
      best = std::max(best, run);
    }
  }
  return best + 1;
}

ParityCheckMatrix idempotent_cyclic(int m, int k) {
  const GaloisField gf(m);
  const int n = gf.order();
  const int want_rank = n - k;
  const auto cosets = cyclotomic_cosets(n);

  auto rank_of = [&](const std::vector<int>& support) {
    int r = 0;
    for (const auto& c : cosets)
      if (evaluate(gf, support, c[0])) r += static_cast<int>(c.size());
    return r;
  };

  std::vector<std::uint8_t> best_row;
  int best_bound = -1;
  std::size_t best_weight = 0;
  for (std::size_t a = 1; a < cosets.size(); ++a) {
    for (std::size_t b = a; b < cosets.size(); ++b) {
      for (int with_zero = 0; with_zero < 2; ++with_zero) {
        std::vector<int> support(cosets[a]);
        if (b != a) support.insert(support.end(), cosets[b].begin(), cosets[b].end());
        if (with_zero) support.push_back(0);
        if (rank_of(support) != want_rank) continue;
        std::vector<std::uint8_t> row(n, 0);
        for (int i : support) row[i] = 1;
        const int bound = bch_bound(row, m);
        if (best_row.empty() || support.size() < best_weight ||
            (support.size() == best_weight && bound > best_bound)) {
          best_row = row;
          best_bound = bound;
          best_weight = support.size();
        }
      }
    }
  }
  if (best_row.empty()) throw std::runtime_error("idempotent_cyclic: no idempotent of that rank");
  return circulant(best_row, "cyclic_" + std::to_string(n) + "_" + std::to_string(k), best_bound);
}

ParityCheckMatrix quasi_cyclic_1248() {
  constexpr int kBlock = 96, kRowsB = 4, kColsB = 13;
  std::mt19937_64 rng(0x5eed1248);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    // shift[i][j] < 0 marks a zero block.
    std::vector<std::vector<int>> shift(kRowsB, std::vector<int>(kColsB, 0));
    for (int i = 0; i < kRowsB; ++i) shift[i][i] = -1;
    bool ok = true;
    for (int j = 0; j < kColsB && ok; ++j) {
      for (int i = 0; i < kRowsB && ok; ++i) {
        if (shift[i][j] < 0) continue;
        int tries = 0;
        for (;; ++tries) {
          if (tries > 2000) {
            ok = false;
            break;
          }
          shift[i][j] = static_cast<int>(rng() % kBlock);
          bool cycle4 = false;
          for (int i2 = 0; i2 < i && !cycle4; ++i2) {
            if (shift[i2][j] < 0) continue;
            for (int j2 = 0; j2 < j; ++j2) {
              if (shift[i][j2] < 0 || shift[i2][j2] < 0) continue;
              const int d = shift[i][j] - shift[i][j2] + shift[i2][j2] - shift[i2][j];
              if (((d % kBlock) + kBlock) % kBlock == 0) {
                cycle4 = true;
                break;
              }
            }
          }
          if (!cycle4) break;
        }
      }
    }
    if (!ok) continue;
    std::vector<std::vector<std::uint32_t>> rows(kRowsB * kBlock);
    for (int i = 0; i < kRowsB; ++i)
      for (int r = 0; r < kBlock; ++r)
        for (int j = 0; j < kColsB; ++j)
          if (shift[i][j] >= 0)
            rows[i * kBlock + r].push_back(
                static_cast<std::uint32_t>(j * kBlock + (r + shift[i][j]) % kBlock));
    ParityCheckMatrix h(kColsB * kBlock, std::move(rows), "qc_1248_864");
    if (h.k() == 864) return h;
  }
  throw std::runtime_error("quasi_cyclic_1248: no full-rank draw found");
}

std::vector<ShippedCode> shipped() {
  std::vector<ShippedCode> out;
  out.push_back({"hamming_7_4.alist", hamming74()});
  out.push_back({"tree_7.alist", tree7()});
  out.push_back({"eg_15_7.alist", euclidean_geometry(2)});
  out.push_back({"cyclic_127_84.alist", idempotent_cyclic(7, 84)});
  out.push_back({"eg_255_175.alist", euclidean_geometry(4)});
  out.push_back({"qc_1248_864.alist", quasi_cyclic_1248()});
  return out;
}

}  // namespace pmr::codes
