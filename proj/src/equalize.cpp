#include "pmr/equalize.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace pmr {

EqualizerDesign EqualizerDesign::identity(std::size_t n_taps) {
  EqualizerDesign d;
  d.taps.assign(n_taps, 0.0);
  d.taps[(n_taps - 1) / 2] = 1.0;
  d.delay = static_cast<int>((n_taps - 1) / 2);
  return d;
}

EqualizerDesign design_least_squares(std::span<const double> samples,
                                     std::span<const double> bipolar, const PrTarget& target,
                                     int n_taps) {
  target.validate();
  if (n_taps < static_cast<int>(target.length()))
    throw std::invalid_argument("design: n_taps must be >= target length");
  if (samples.size() != bipolar.size())
    throw std::invalid_argument("design: sample and symbol lengths differ");

  const auto desired = target_response(target, bipolar, bipolar.empty() ? -1.0 : bipolar[0]);
  const int centre = (n_taps - 1) / 2;
  const int d_lo = std::max(0, centre - n_taps / 2);
  const int d_hi = centre + n_taps / 2;

  // Regressor index t runs where r_{t-l} and d_{t-D} exist for every tap and
  // every scanned delay.
  const auto total = static_cast<std::ptrdiff_t>(samples.size());
  const std::ptrdiff_t t0 = std::max<std::ptrdiff_t>(n_taps - 1, d_hi) + 8;
  const std::ptrdiff_t t1 = total - 8;
  if (t1 - t0 < 10 * n_taps) throw std::invalid_argument("design: training frame too short");

  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n_taps, n_taps);
  Eigen::VectorXd v(n_taps);
  for (std::ptrdiff_t t = t0; t < t1; ++t) {
    for (int l = 0; l < n_taps; ++l) v[l] = samples[t - l];
    r.selfadjointView<Eigen::Lower>().rankUpdate(v);
  }
  r = r.selfadjointView<Eigen::Lower>();

  Eigen::LLT<Eigen::MatrixXd> llt(r);
  const double scale = r.diagonal().cwiseAbs().maxCoeff();
  if (llt.info() != Eigen::Success || !(scale > 0.0) ||
      llt.matrixL().toDenseMatrix().diagonal().minCoeff() <= 1e-12 * std::sqrt(scale))
    throw std::runtime_error("design: singular normal equations");

  const double count = static_cast<double>(t1 - t0);
  struct Fit {
    int delay;
    double mse;
    Eigen::VectorXd taps;
  };
  std::vector<Fit> fits;
  double min_mse = std::numeric_limits<double>::infinity();
  double mean_energy = 0.0;
  for (int delay = d_lo; delay <= d_hi; ++delay) {
    Eigen::VectorXd q = Eigen::VectorXd::Zero(n_taps);
    double energy = 0.0;
    for (std::ptrdiff_t t = t0; t < t1; ++t) {
      const double d = desired[t - delay];
      energy += d * d;
      for (int l = 0; l < n_taps; ++l) q[l] += samples[t - l] * d;
    }
    Eigen::VectorXd w = llt.solve(q);
    const double mse = std::max(0.0, (energy - w.dot(q)) / count);
    min_mse = std::min(min_mse, mse);
    mean_energy = std::max(mean_energy, energy / count);
    fits.push_back({delay, mse, std::move(w)});
  }

  // Delays whose MSE is within kDelayTie of the minimum count as ties; the
  // one nearest the centre tap wins.
  constexpr double kDelayTie = 5e-3;
  const double cutoff = min_mse * (1.0 + kDelayTie) + 1e-12 * mean_energy;
  const Fit* pick = nullptr;
  for (const auto& f : fits) {
    if (f.mse > cutoff) continue;
    if (!pick || std::abs(f.delay - centre) < std::abs(pick->delay - centre)) pick = &f;
  }
  EqualizerDesign best;
  best.delay = pick->delay;
  best.residual_mse = pick->mse;
  best.taps.assign(pick->taps.data(), pick->taps.data() + n_taps);
  return best;
}

EqualizerDesign design_mmse(const StepParams& params, const NoiseConfig& noise,
                            const PrTarget& target, int n_taps, int training_len,
                            std::uint64_t seed, int span) {
  if (n_taps < static_cast<int>(target.length()))
    throw std::invalid_argument("design_mmse: n_taps must be >= target length");
  if (training_len < 10 * n_taps)
    throw std::invalid_argument("design_mmse: training_len must be >= 10 * n_taps");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::vector<double> bipolar(static_cast<std::size_t>(training_len));
  for (auto& b : bipolar) b = coin(rng) ? 1.0 : -1.0;
  NoiseConfig cfg = noise;
  cfg.seed = rng();
  const auto frame = read_channel(bipolar, cfg, params, span);
  return design_least_squares(frame.samples, bipolar, target, n_taps);
}

std::vector<double> apply(const EqualizerDesign& design, std::span<const double> samples,
                          std::size_t first, std::size_t count) {
  if (design.taps.empty()) throw std::invalid_argument("apply: empty equalizer");
  if (samples.size() < design.taps.size())
    throw std::invalid_argument("apply: frame shorter than equalizer");
  if (first + count > samples.size())
    throw std::invalid_argument("apply: requested range exceeds frame length");
  const auto n = static_cast<std::ptrdiff_t>(samples.size());
  const auto taps = static_cast<std::ptrdiff_t>(design.taps.size());
  std::vector<double> z(count, 0.0);
  for (std::size_t j = 0; j < count; ++j) {
    const auto base = static_cast<std::ptrdiff_t>(first + j) + design.delay;
    double acc = 0.0;
    for (std::ptrdiff_t l = 0; l < taps; ++l)
      acc += design.taps[l] * samples[std::clamp<std::ptrdiff_t>(base - l, 0, n - 1)];
    z[j] = acc;
  }
  return z;
}

void save_equalizer(std::ostream& os, const EqualizerDesign& design) {
  os << "delay " << design.delay << '\n';
  os << std::setprecision(17);
  for (std::size_t i = 0; i < design.taps.size(); ++i)
    os << (i ? " " : "") << design.taps[i];
  os << '\n';
}

EqualizerDesign load_equalizer(std::istream& is) {
  EqualizerDesign d;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("equalizer: missing delay line");
  std::istringstream head(line);
  std::string key;
  if (!(head >> key >> d.delay) || key != "delay")
    throw std::runtime_error("equalizer: line 1 must be 'delay <int>'");
  if (!std::getline(is, line)) throw std::runtime_error("equalizer: missing taps line");
  std::istringstream body(line);
  double tap;
  while (body >> tap) d.taps.push_back(tap);
  if (!body.eof()) throw std::runtime_error("equalizer: malformed tap value");
  if (d.taps.empty()) throw std::runtime_error("equalizer: no taps");
  return d;
}

}  // namespace pmr
