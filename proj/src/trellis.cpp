#include "pmr/trellis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pmr {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double combine(double a, double b, Combine mode) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  if (mode == Combine::kMaxLog) return hi;
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace

TrellisSpec build_trellis(const PrTarget& target) {
  target.validate();
  if (target.length() > kMaxTargetLength)
    throw std::invalid_argument("build_trellis: target longer than 16 taps");
  TrellisSpec spec;
  spec.target = target;
  const std::size_t mem = target.memory();
  spec.n_states = 1u << mem;
  const std::uint32_t mask = spec.n_states - 1;
  spec.branches.resize(2 * spec.n_states);
  for (std::uint32_t s = 0; s < spec.n_states; ++s) {
    for (std::uint8_t a = 0; a < 2; ++a) {
      double y = target.coefficients[0] * bipolar(a);
      for (std::size_t i = 1; i <= mem; ++i)
        y += target.coefficients[i] * bipolar((s >> (i - 1)) & 1u);
      auto& br = spec.branches[2 * s + a];
      br.from = s;
      br.input = a;
      br.to = mem == 0 ? 0 : ((s << 1) | a) & mask;
      br.output = 0.5 * y;
    }
  }
  return spec;
}

double DetectorConfig::effective_sigma2() const {
  return assumed_sigma2 * std::pow(10.0, mismatch_db / 10.0);
}

void DetectorConfig::validate() const {
  if (!(assumed_sigma2 > 0.0) || !std::isfinite(assumed_sigma2))
    throw std::invalid_argument("DetectorConfig: assumed_sigma2 must be > 0");
  if (!std::isfinite(mismatch_db)) throw std::invalid_argument("DetectorConfig: bad mismatch_db");
}

DetectorOutput bcjr(const TrellisSpec& spec, std::span<const double> z, const LlrVector& priors,
                    const DetectorConfig& cfg, std::uint8_t pad_bit) {
  cfg.validate();
  const std::size_t n = priors.size();
  const std::size_t mem = spec.target.memory();
  const std::size_t steps = n + mem;
  if (z.size() != steps) throw std::invalid_argument("bcjr: z must hold n + L - 1 samples");
  for (double v : z)
    if (!std::isfinite(v)) throw std::invalid_argument("bcjr: non-finite sample");

  const double inv_two_var = 1.0 / (2.0 * cfg.effective_sigma2());
  const std::uint32_t ns = spec.n_states;

  // Log branch metric; kNegInf marks a branch excluded by a pad symbol or a
  // saturated prior.
  auto gamma = [&](std::size_t k, const TrellisSpec::Branch& br) {
    double prior = 0.0;
    if (k >= n) {
      if (br.input != pad_bit) return kNegInf;
    } else {
      const double l = priors[k];
      if (is_saturated(l)) {
        if (hard_bit(l) != br.input) return kNegInf;
      } else {
        prior = 0.5 * bipolar(br.input) * l;
      }
    }
    const double e = z[k] - br.output;
    return prior - e * e * inv_two_var;
  };

  std::vector<double> alpha((steps + 1) * ns, kNegInf);
  std::vector<double> beta((steps + 1) * ns, kNegInf);
  alpha[spec.pad_state(pad_bit)] = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    double* next = &alpha[(k + 1) * ns];
    const double* cur = &alpha[k * ns];
    for (const auto& br : spec.branches) {
      if (cur[br.from] == kNegInf) continue;
      const double g = gamma(k, br);
      if (g == kNegInf) continue;
      next[br.to] = combine(next[br.to], cur[br.from] + g, cfg.combine);
    }
    const double top = *std::max_element(next, next + ns);
    if (top != kNegInf)
      for (std::uint32_t s = 0; s < ns; ++s) next[s] -= top;
  }
  beta[steps * ns + spec.pad_state(pad_bit)] = 0.0;
  for (std::size_t k = steps; k-- > 0;) {
    double* cur = &beta[k * ns];
    const double* next = &beta[(k + 1) * ns];
    for (const auto& br : spec.branches) {
      if (next[br.to] == kNegInf) continue;
      const double g = gamma(k, br);
      if (g == kNegInf) continue;
      cur[br.from] = combine(cur[br.from], next[br.to] + g, cfg.combine);
    }
    const double top = *std::max_element(cur, cur + ns);
    if (top != kNegInf)
      for (std::uint32_t s = 0; s < ns; ++s) cur[s] -= top;
  }

  DetectorOutput out{LlrVector(n), LlrVector(n)};
  for (std::size_t k = 0; k < n; ++k) {
    double num = kNegInf, den = kNegInf;
    for (const auto& br : spec.branches) {
      const double a = alpha[k * ns + br.from];
      const double b = beta[(k + 1) * ns + br.to];
      if (a == kNegInf || b == kNegInf) continue;
      const double g = gamma(k, br);
      if (g == kNegInf) continue;
      if (br.input)
        num = combine(num, a + g + b, cfg.combine);
      else
        den = combine(den, a + g + b, cfg.combine);
    }
    double llr;
    if (num == kNegInf && den == kNegInf)
      llr = 0.0;
    else if (den == kNegInf)
      llr = kSaturated;
    else if (num == kNegInf)
      llr = -kSaturated;
    else
      llr = clamp_llr(num - den);
    out.app[k] = llr;
  }
  out.extrinsic = extrinsic(out.app, priors);
  return out;
}

}  // namespace pmr
