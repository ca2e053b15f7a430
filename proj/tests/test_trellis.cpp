#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "oracles.hpp"
#include "pmr/equalize.hpp"
#include "pmr/trellis.hpp"

using namespace pmr;

namespace {

struct Block {
  std::vector<double> z;
  LlrVector priors;
};

Block random_block(const PrTarget& target, std::size_t n, double sigma2, std::mt19937_64& rng,
                   bool with_priors) {
  std::normal_distribution<double> g;
  std::vector<double> u(n + target.memory(), -1.0);
  for (std::size_t k = 0; k < n; ++k) u[k] = rng() & 1 ? 1.0 : -1.0;
  auto z = target_response(target, u, -1.0);
  for (auto& v : z) v += std::sqrt(sigma2) * g(rng);
  LlrVector priors(n);
  if (with_priors)
    for (std::size_t k = 0; k < n; ++k) priors[k] = (rng() % 3 == 0) ? 0.0 : 1.5 * g(rng);
  return {z, priors};
}

}  // namespace

TEST_CASE("trellis structure for (4,6,4,2)") {
  const auto spec = build_trellis(PrTarget::pr4642());
  CHECK(spec.n_states == 8);
  CHECK(spec.branches.size() == 16);
  std::map<std::uint32_t, int> in, out;
  for (const auto& br : spec.branches) {
    ++out[br.from];
    ++in[br.to];
  }
  for (std::uint32_t s = 0; s < 8; ++s) {
    CHECK(in[s] == 2);
    CHECK(out[s] == 2);
  }
  // all-(+1) history with +1 input
  CHECK(spec.branch(7, 1).output == 8.0);
  CHECK(spec.branch(0, 0).output == -8.0);
  // input +1 after three -1: 0.5 (4 - 6 - 4 - 2)
  CHECK(spec.branch(0, 1).output == -4.0);
}

TEST_CASE("steady state of the equalized noiseless channel matches the trellis level") {
  const StepParams p;
  const auto design = design_mmse(p, NoiseConfig{}, PrTarget::pr4642(), 21, 100000, 3);
  std::vector<double> ones(200, 1.0);
  const auto frame = read_channel(ones, NoiseConfig{}, p);
  const auto z = apply(design, frame.samples, 50, 100);
  const auto spec = build_trellis(PrTarget::pr4642());
  for (double v : z) CHECK(v == doctest::Approx(spec.branch(7, 1).output).epsilon(0.02));
}

TEST_CASE("memoryless target") {
  const auto spec = build_trellis(PrTarget::memoryless(3.0));
  CHECK(spec.n_states == 1);
  CHECK(spec.branch(0, 1).output == 1.5);
  CHECK(spec.branch(0, 0).output == -1.5);

  const double sigma2 = 0.7;
  std::vector<double> z{0.3, -1.1, 2.0, 0.0};
  const auto out = bcjr(spec, z, LlrVector(4), DetectorConfig{sigma2, 0.0});
  for (std::size_t i = 0; i < z.size(); ++i)
    CHECK(out.app[i] == doctest::Approx(2.0 * 1.5 * z[i] / sigma2).epsilon(1e-12));
}

TEST_CASE("target length guard") {
  PrTarget big{std::vector<double>(17, 1.0), "big"};
  CHECK_THROWS(build_trellis(big));
  CHECK_THROWS(build_trellis(PrTarget{{0.0, 0.0}, "zero"}));
}

TEST_CASE("bcjr equals exhaustive posterior enumeration") {
  const auto target = PrTarget::pr4642();
  const auto spec = build_trellis(target);
  std::mt19937_64 rng(2718);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 10;
    const double sigma2 = 0.5 + (trial % 7);
    auto blk = random_block(target, n, sigma2, rng, trial % 2 == 1);
    const auto out = bcjr(spec, blk.z, blk.priors, DetectorConfig{sigma2, 0.0});
    std::vector<double> pri(blk.priors.values().begin(), blk.priors.values().end());
    const auto ref = oracle::pr_posterior(target.coefficients, blk.z, pri, sigma2);
    for (std::size_t k = 0; k < n; ++k) {
      worst = std::max(worst, std::abs(out.app[k] - ref[k]));
      CHECK(out.extrinsic[k] == doctest::Approx(out.app[k] - pri[k]).epsilon(1e-12));
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("mismatch scales the assumed variance") {
  const auto target = PrTarget::pr4642();
  const auto spec = build_trellis(target);
  std::mt19937_64 rng(8);
  auto blk = random_block(target, 8, 2.0, rng, false);
  DetectorConfig cfg{2.0, 3.0};
  const auto out = bcjr(spec, blk.z, blk.priors, cfg);
  const auto ref = oracle::pr_posterior(target.coefficients, blk.z, std::vector<double>(8, 0.0),
                                        2.0 * std::pow(10.0, 0.3));
  for (std::size_t k = 0; k < 8; ++k) CHECK(out.app[k] == doctest::Approx(ref[k]).epsilon(1e-9));

  const auto matched = bcjr(spec, blk.z, blk.priors, DetectorConfig{2.0, 0.0});
  CHECK(matched.app != out.app);
  for (double db = -6.0; db <= 6.0; db += 0.5) {
    const auto o = bcjr(spec, blk.z, blk.priors, DetectorConfig{2.0, db});
    for (double v : o.app.values()) CHECK(std::isfinite(v));
  }
}

TEST_CASE("max-log combine approximates the exact recursion") {
  const auto target = PrTarget::pr4642();
  const auto spec = build_trellis(target);
  std::mt19937_64 rng(12);
  auto blk = random_block(target, 30, 0.5, rng, false);
  const auto exact = bcjr(spec, blk.z, blk.priors, DetectorConfig{0.5, 0.0, Combine::kLogSumExp});
  const auto approx = bcjr(spec, blk.z, blk.priors, DetectorConfig{0.5, 0.0, Combine::kMaxLog});
  int agree = 0;
  for (std::size_t k = 0; k < 30; ++k) agree += hard_bit(exact.app[k]) == hard_bit(approx.app[k]);
  CHECK(agree >= 28);
}

TEST_CASE("saturated priors dominate") {
  const auto target = PrTarget::pr4642();
  const auto spec = build_trellis(target);
  std::vector<double> z(10 + 3, -8.0);  // strongly all -1
  LlrVector priors(10);
  priors.pin(4, +1);
  priors.pin(6, -1);
  const auto out = bcjr(spec, z, priors, DetectorConfig{0.1, 0.0});
  CHECK(out.app[4] > 0);
  CHECK(is_saturated(out.app[4]));
  CHECK(out.app[6] < 0);
  CHECK(is_saturated(out.extrinsic[4]));
  for (double v : out.app.values()) CHECK(!std::isnan(v));
  // neighbours remain finite
  CHECK(!is_saturated(out.app[3]));
}

TEST_CASE("negating z, priors and pads negates the posterior") {
  const auto target = PrTarget::pr4642();
  const auto spec = build_trellis(target);
  std::mt19937_64 rng(77);
  for (int t = 0; t < 10; ++t) {
    auto blk = random_block(target, 12, 1.0, rng, true);
    auto nz = blk.z;
    for (auto& v : nz) v = -v;
    LlrVector np(12);
    for (std::size_t k = 0; k < 12; ++k) np[k] = -blk.priors[k];
    const auto a = bcjr(spec, blk.z, blk.priors, DetectorConfig{1.0, 0.0}, 0);
    const auto b = bcjr(spec, nz, np, DetectorConfig{1.0, 0.0}, 1);
    for (std::size_t k = 0; k < 12; ++k) CHECK(b.app[k] == doctest::Approx(-a.app[k]).epsilon(1e-12));
  }
}

TEST_CASE("bcjr input validation") {
  const auto spec = build_trellis(PrTarget::pr4642());
  std::vector<double> z(13, 0.0);
  CHECK_THROWS(bcjr(spec, z, LlrVector(9), DetectorConfig{}));
  z[5] = std::nan("");
  CHECK_THROWS(bcjr(spec, z, LlrVector(10), DetectorConfig{}));
  z[5] = INFINITY;
  CHECK_THROWS(bcjr(spec, z, LlrVector(10), DetectorConfig{}));
  CHECK_THROWS(bcjr(spec, std::vector<double>(13, 0.0), LlrVector(10), DetectorConfig{0.0, 0.0}));
}
