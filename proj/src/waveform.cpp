#include "pmr/waveform.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

namespace pmr {

namespace {

// Coefficients of P_m with d^m/du^m tanh(u) = P_m(tanh u), via
// P_{m+1}(T) = P_m'(T) (1 - T^2).
using Poly = std::vector<double>;

std::array<Poly, kMaxTaylorOrder + 1> make_tanh_derivative_polys() {
  std::array<Poly, kMaxTaylorOrder + 1> polys;
  polys[0] = {0.0, 1.0};
  for (int m = 0; m < kMaxTaylorOrder; ++m) {
    const Poly& p = polys[m];
    Poly dp(p.size() > 1 ? p.size() - 1 : 1, 0.0);
    for (std::size_t i = 1; i < p.size(); ++i) dp[i - 1] = static_cast<double>(i) * p[i];
    Poly next(dp.size() + 2, 0.0);
    for (std::size_t i = 0; i < dp.size(); ++i) {
      next[i] += dp[i];
      next[i + 2] -= dp[i];
    }
    polys[m + 1] = std::move(next);
  }
  return polys;
}

const std::array<Poly, kMaxTaylorOrder + 1>& tanh_derivative_polys() {
  static const auto polys = make_tanh_derivative_polys();
  return polys;
}

double horner(const Poly& p, double x) {
  double acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double slope(const StepParams& params) { return std::log(3.0) / params.pw50; }

// tanh(ln3 * u / 2) = (3^u - 1) / (3^u + 1). Evaluating through pow keeps
// u = 1 (t = pw50 / 2) exact at 1/2; expm1 covers small |u|.
double half_tanh(double u) {
  const double a = std::abs(u);
  if (a > 80.0) return std::copysign(1.0, u);
  const double e = a < 0.5 ? std::expm1(a * std::log(3.0)) : std::pow(3.0, a) - 1.0;
  return std::copysign(e / (e + 2.0), u);
}

double factorial(int m) {
  double f = 1.0;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

// Superposition x_j = 0.5 sum_{|d|<=span} b_{clamp(j-d)} kernel(d).
std::vector<double> superpose(std::span<const double> bipolar, int span,
                              const std::vector<double>& kernel) {
  if (bipolar.empty()) throw std::invalid_argument("synthesize: empty frame");
  if (span < 1) throw std::invalid_argument("synthesize: span must be >= 1");
  const auto n = static_cast<std::ptrdiff_t>(bipolar.size());
  std::vector<double> out(bipolar.size(), 0.0);
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::ptrdiff_t d = -span; d <= span; ++d) {
      std::ptrdiff_t k = std::clamp<std::ptrdiff_t>(j - d, 0, n - 1);
      acc += bipolar[k] * kernel[d + span];
    }
    out[j] = 0.5 * acc;
  }
  return out;
}

}  // namespace

void StepParams::validate() const {
  if (!(amplitude > 0.0)) throw std::invalid_argument("StepParams: amplitude must be > 0");
  if (!(pw50 > 0.0)) throw std::invalid_argument("StepParams: pw50 must be > 0");
}

void NoiseConfig::validate() const {
  if (!(sigma_e >= 0.0)) throw std::invalid_argument("NoiseConfig: sigma_e must be >= 0");
  if (!(sigma_m >= 0.0)) throw std::invalid_argument("NoiseConfig: sigma_m must be >= 0");
  if (!(jitter_max >= 0.0 && jitter_max < 0.5))
    throw std::invalid_argument("NoiseConfig: jitter_max must be in [0, 0.5)");
  if (taylor_order < 1 || taylor_order > kMaxTaylorOrder)
    throw std::invalid_argument("NoiseConfig: taylor_order out of range");
}

BipolarFrame BipolarFrame::from_codeword(Bits user_bits, Bits code_bits) {
  BipolarFrame f{std::move(user_bits), std::move(code_bits), {}};
  f.bipolar.reserve(f.code_bits.size());
  for (auto c : f.code_bits) f.bipolar.push_back(2.0 * c - 1.0);
  return f;
}

bool BipolarFrame::valid() const {
  if (bipolar.size() != code_bits.size()) return false;
  for (std::size_t i = 0; i < bipolar.size(); ++i)
    if (bipolar[i] != 2.0 * code_bits[i] - 1.0) return false;
  return true;
}

double step_response(double t, const StepParams& params) {
  return params.amplitude * half_tanh(2.0 * t / params.pw50);
}

double step_derivative(double t, int order, const StepParams& params) {
  if (order < 1 || order > kMaxTaylorOrder)
    throw std::out_of_range("step_derivative: order out of range");
  const double c = slope(params);
  return params.amplitude * std::pow(c, order) *
         horner(tanh_derivative_polys()[order], half_tanh(2.0 * t / params.pw50));
}

double dibit_response(double t, const StepParams& params) {
  return step_response(t, params) - step_response(t - 1.0, params);
}

double dibit_derivative(double t, int order, const StepParams& params) {
  return step_derivative(t, order, params) - step_derivative(t - 1.0, order, params);
}

double truncation_tail_bound(const StepParams& params, int span) {
  // p is even about t = 0.5, so the tails at d > span and d < -span are
  // p(span+1), p(span+2), ... and p(span+2), p(span+3), ...
  double tail = 0.0;
  for (int d = span + 1; d < span + 200; ++d)
    tail += std::abs(dibit_response(d, params)) + std::abs(dibit_response(d + 1, params));
  return 0.5 * tail;
}

std::vector<double> synthesize_noiseless(std::span<const double> bipolar,
                                         const StepParams& params, int span) {
  params.validate();
  std::vector<double> kernel(2 * span + 1);
  for (int d = -span; d <= span; ++d) kernel[d + span] = dibit_response(d, params);
  return superpose(bipolar, span, kernel);
}

std::vector<double> signal_derivative(std::span<const double> bipolar,
                                      const StepParams& params, int order, int span) {
  params.validate();
  std::vector<double> kernel(2 * span + 1);
  for (int d = -span; d <= span; ++d) kernel[d + span] = dibit_derivative(d, order, params);
  return superpose(bipolar, span, kernel);
}

ReadbackFrame apply_noise(std::span<const double> x, std::span<const double> bipolar,
                          const NoiseConfig& cfg, const StepParams& params, int span) {
  cfg.validate();
  params.validate();
  if (x.size() != bipolar.size())
    throw std::invalid_argument("apply_noise: signal and symbol lengths differ");
  const std::size_t n = x.size();

  ReadbackFrame frame;
  frame.noiseless.assign(x.begin(), x.end());
  frame.media_noise.assign(n, 0.0);
  frame.jitter_noise.assign(n, 0.0);
  frame.electronic_noise.assign(n, 0.0);
  frame.tail_bound = truncation_tail_bound(params, span);

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(-cfg.jitter_max, cfg.jitter_max);

  std::vector<double> offsets(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double ge = normal(rng);
    const double gm = normal(rng);
    const double delta = cfg.jitter_max > 0.0 ? uniform(rng) : 0.0;
    frame.electronic_noise[i] = cfg.sigma_e * ge;
    const double level = x[i] / params.amplitude;
    frame.media_noise[i] = cfg.sigma_m * gm * std::sqrt(std::max(0.0, 1.0 - level * level));
    offsets[i] = delta;
  }

  if (cfg.jitter_max > 0.0) {
    for (int m = 1; m <= cfg.taylor_order; ++m) {
      const auto deriv = signal_derivative(bipolar, params, m, span);
      const double inv_fact = 1.0 / factorial(m);
      for (std::size_t i = 0; i < n; ++i)
        frame.jitter_noise[i] += std::pow(offsets[i], m) * inv_fact * deriv[i];
    }
  }

  frame.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    frame.samples[i] =
        x[i] + frame.media_noise[i] + frame.jitter_noise[i] + frame.electronic_noise[i];
  return frame;
}

ReadbackFrame read_channel(std::span<const double> bipolar, const NoiseConfig& cfg,
                           const StepParams& params, int span) {
  const auto x = synthesize_noiseless(bipolar, params, span);
  return apply_noise(x, bipolar, cfg, params, span);
}

NoiseSigmas snr_to_sigma(double snr_db, double media_fraction) {
  if (!(media_fraction >= 0.0 && media_fraction <= 1.0))
    throw std::invalid_argument("snr_to_sigma: media_fraction must be in [0, 1]");
  const double total = std::pow(10.0, -snr_db / 10.0) / 2.0;
  return {std::sqrt((1.0 - media_fraction) * total), std::sqrt(media_fraction * total)};
}

double sigma_to_snr(double sigma_e, double sigma_m) {
  return 10.0 * std::log10(1.0 / (2.0 * (sigma_e * sigma_e + sigma_m * sigma_m)));
}

}  // namespace pmr
