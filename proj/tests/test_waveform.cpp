#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "pmr/waveform.hpp"

using namespace pmr;

namespace {

// Transition form: x_j = 0.5 A (b_first + b_last) + 0.5 sum_m (b_m - b_{m-1}) s(j - m),
// untruncated, with the same repeated-symbol extension at both ends.
std::vector<double> synthesize_by_transitions(const std::vector<double>& b, const StepParams& p) {
  const auto n = static_cast<long>(b.size());
  std::vector<double> x(b.size());
  for (long j = 0; j < n; ++j) {
    double acc = 0.5 * p.amplitude * (b.front() + b.back());
    for (long m = 1; m < n; ++m)
      acc += 0.5 * (b[m] - b[m - 1]) * step_response(static_cast<double>(j - m), p);
    x[j] = acc;
  }
  return x;
}

std::vector<double> random_bipolar(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> b(n);
  for (auto& v : b) v = rng() & 1 ? 1.0 : -1.0;
  return b;
}

}  // namespace

TEST_CASE("step response values") {
  const StepParams p;
  CHECK(step_response(0.0, p) == 0.0);
  CHECK(step_response(p.pw50 / 2, p) == 0.5);
  for (double a : {0.3, 1.7, 2.0})
    for (double w : {0.9, 1.4, 2.3}) {
      const StepParams q{a, w};
      CHECK(step_response(w / 2, q) == a / 2);
      CHECK(step_response(-w / 2, q) == -a / 2);
    }
  // high-precision reference: tanh(ln(3) * 0.5 / 1.4)
  CHECK(step_response(0.5, p) == doctest::Approx(0.37339429682855974).epsilon(1e-14));
  // tanh rounds to exactly 1 in double precision beyond |t| ~ 19
  for (double t = -15.0; t <= 15.0; t += 0.37) {
    CHECK(std::abs(step_response(t, p)) < p.amplitude);
    CHECK(step_response(-t, p) == -step_response(t, p));
    if (t != 0.0) CHECK((step_response(t, p) > 0) == (t > 0));
    CHECK(step_response(t + 0.01, p) > step_response(t, p));
  }
}

TEST_CASE("half-amplitude identity holds for other amplitudes and widths") {
  for (double a : {0.5, 1.0, 2.5})
    for (double w : {0.8, 1.4, 2.0}) {
      const StepParams p{a, w};
      CHECK(std::abs(step_response(w / 2, p) - a / 2) <= 4e-16 * a);
    }
}

TEST_CASE("step derivatives") {
  const StepParams p;
  CHECK(step_derivative(0.0, 1, p) == doctest::Approx(std::log(3.0) / 1.4).epsilon(1e-14));
  CHECK(std::abs(step_derivative(0.0, 2, p)) < 1e-15);
  CHECK(std::abs(step_derivative(0.0, 4, p)) < 1e-15);
  // high-precision reference for s'''(0.7)
  CHECK(step_derivative(0.7, 3, p) == doctest::Approx(-0.18120931488847130).epsilon(1e-12));

  // central finite differences of the step response
  const double h = 1e-3;
  auto s = [&](double t) { return step_response(t, p); };
  const double t = 0.7;
  const double fd3 = (s(t + 2 * h) - 2 * s(t + h) + 2 * s(t - h) - s(t - 2 * h)) / (2 * h * h * h);
  CHECK(std::abs(fd3 - step_derivative(t, 3, p)) <= 1e-6 * std::abs(fd3) + 1e-6);
  const double fd1 = (s(t + h) - s(t - h)) / (2 * h);
  CHECK(fd1 == doctest::Approx(step_derivative(t, 1, p)).epsilon(1e-6));

  CHECK_THROWS_AS(step_derivative(0.0, 0, p), std::out_of_range);
  CHECK_THROWS_AS(step_derivative(0.0, kMaxTaylorOrder + 1, p), std::out_of_range);
}

TEST_CASE("jitter Taylor expansion reproduces shifted step response") {
  const StepParams p;
  double worst = 0.0;
  for (double t = -6.0; t <= 6.0; t += 0.01) {
    for (double d = -0.1; d <= 0.1 + 1e-12; d += 0.005) {
      double approx = step_response(t, p);
      double pow = 1.0, fact = 1.0;
      for (int m = 1; m <= 6; ++m) {
        pow *= d;
        fact *= m;
        approx += pow / fact * step_derivative(t, m, p);
      }
      worst = std::max(worst, std::abs(approx - step_response(t + d, p)));
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("dibit response") {
  const StepParams p;
  CHECK(std::abs(dibit_response(20.0, p)) < 1e-9);
  CHECK(std::abs(dibit_response(-20.0, p)) < 1e-9);
  CHECK(dibit_response(0.5, p) == doctest::Approx(0.74678859365711948).epsilon(1e-14));
  for (double u = 0.0; u < 8.0; u += 0.173)
    CHECK(dibit_response(0.5 + u, p) == doctest::Approx(dibit_response(0.5 - u, p)).epsilon(1e-13));
}

TEST_CASE("synthesize: constant sequence is flat") {
  const StepParams p;
  std::vector<double> b(60, 1.0);
  const auto x = synthesize_noiseless(b, p);
  for (std::size_t j = 0; j + 1 < x.size(); ++j) CHECK(std::abs(x[j] - x[j + 1]) < 1e-9);
  CHECK(x[30] == doctest::Approx(p.amplitude).epsilon(1e-9));
}

TEST_CASE("synthesize: single transition traces the step response") {
  const StepParams p;
  const long m = 40;
  std::vector<double> b(80, -1.0);
  for (long k = m; k < 80; ++k) b[k] = 1.0;
  const auto x = synthesize_noiseless(b, p);
  const double tol = 10 * truncation_tail_bound(p, kDefaultSpan);
  for (long j = 20; j < 60; ++j) CHECK(std::abs(x[j] - step_response(j - m, p)) <= tol);
}

TEST_CASE("synthesize: dibit and transition forms agree") {
  const StepParams p;
  const double bound = truncation_tail_bound(p, kDefaultSpan);
  CHECK(bound < 1e-9);
  CHECK(bound > 0.0);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto b = random_bipolar(120, seed);
    const auto x = synthesize_noiseless(b, p);
    const auto y = synthesize_by_transitions(b, p);
    for (std::size_t j = 0; j < x.size(); ++j) CHECK(std::abs(x[j] - y[j]) <= 10 * bound);
  }
}

TEST_CASE("synthesize: sign symmetry and errors") {
  const StepParams p;
  auto b = random_bipolar(50, 7);
  const auto x = synthesize_noiseless(b, p);
  for (auto& v : b) v = -v;
  const auto y = synthesize_noiseless(b, p);
  for (std::size_t j = 0; j < x.size(); ++j) CHECK(y[j] == -x[j]);
  CHECK_THROWS(synthesize_noiseless(std::vector<double>{}, p));
  CHECK_THROWS(synthesize_noiseless(b, p, 0));
}

TEST_CASE("noise: identity, decomposition, saturation, reproducibility") {
  const StepParams p;
  const auto b = random_bipolar(400, 3);
  const auto x = synthesize_noiseless(b, p);

  NoiseConfig quiet;
  const auto clean = apply_noise(x, b, quiet, p);
  CHECK(clean.samples == x);

  NoiseConfig cfg{0.1, 0.2, 0.08, 6, 99};
  const auto f = apply_noise(x, b, cfg, p);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(f.samples[i] ==
          x[i] + f.media_noise[i] + f.jitter_noise[i] + f.electronic_noise[i]);
  }
  const auto g = apply_noise(x, b, cfg, p);
  CHECK(g.samples == f.samples);
  CHECK(g.jitter_noise == f.jitter_noise);

  // exact saturation level
  std::vector<double> sat{1.0, -1.0, 0.5, 1.0};
  const auto h = apply_noise(sat, std::vector<double>{1, -1, 1, 1}, NoiseConfig{0.0, 0.5, 0.0, 6, 5}, p);
  CHECK(h.media_noise[0] == 0.0);
  CHECK(h.media_noise[1] == 0.0);
  CHECK(h.media_noise[3] == 0.0);
  CHECK(h.media_noise[2] != 0.0);
}

TEST_CASE("noise: electronic variance") {
  const StepParams p;
  const std::size_t n = 1000000;
  std::vector<double> b(n, 1.0), x(n, 1.0);
  NoiseConfig cfg{0.1, 0.0, 0.0, 6, 2024};
  const auto f = apply_noise(x, b, cfg, p, 1);
  double s2 = 0.0;
  for (double e : f.electronic_noise) s2 += e * e;
  s2 /= static_cast<double>(n);
  CHECK(std::abs(s2 - 0.01) < 0.01 * 0.01);
}

TEST_CASE("noise config validation") {
  CHECK_THROWS(NoiseConfig{-1.0, 0.0, 0.0, 6, 0}.validate());
  CHECK_THROWS(NoiseConfig{0.0, -0.1, 0.0, 6, 0}.validate());
  CHECK_THROWS(NoiseConfig{0.0, 0.0, 0.5, 6, 0}.validate());
  CHECK_THROWS(NoiseConfig{0.0, 0.0, 0.1, 0, 0}.validate());
  CHECK_THROWS(StepParams{0.0, 1.4}.validate());
  CHECK_THROWS(StepParams{1.0, -1.0}.validate());
}

TEST_CASE("snr to sigma") {
  auto s = snr_to_sigma(0.0, 0.0);
  CHECK(s.sigma_e * s.sigma_e == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s.sigma_m == 0.0);
  s = snr_to_sigma(10.0, 0.5);
  CHECK(s.sigma_e * s.sigma_e == doctest::Approx(0.025).epsilon(1e-14));
  CHECK(s.sigma_m * s.sigma_m == doctest::Approx(0.025).epsilon(1e-14));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.01, 2.0);
  for (int i = 0; i < 100; ++i) {
    const double se = u(rng), sm = u(rng);
    const double snr = sigma_to_snr(se, sm);
    const auto back = snr_to_sigma(snr, sm * sm / (se * se + sm * sm));
    CHECK(std::abs(back.sigma_e * back.sigma_e + back.sigma_m * back.sigma_m -
                   (se * se + sm * sm)) <= 1e-12 * (se * se + sm * sm));
  }
  CHECK_THROWS(snr_to_sigma(5.0, 1.5));
}

TEST_CASE("bipolar frame mapping") {
  auto f = BipolarFrame::from_codeword({1, 0}, {1, 0, 0, 1});
  CHECK(f.bipolar == std::vector<double>{1, -1, -1, 1});
  CHECK(f.valid());
  f.bipolar[0] = -1;
  CHECK_FALSE(f.valid());
}
