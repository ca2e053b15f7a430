#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pmr/llr.hpp"

namespace pmr {

inline constexpr int kMaxTaylorOrder = 12;
inline constexpr int kDefaultSpan = 15;

struct StepParams {
  double amplitude = 1.0;
  double pw50 = 1.4;  // in symbol periods

  void validate() const;
};

struct NoiseConfig {
  double sigma_e = 0.0;
  double sigma_m = 0.0;
  double jitter_max = 0.0;  // fraction of T
  int taylor_order = 6;
  std::uint64_t seed = 0;

  void validate() const;
};

/// User bits, codeword bits and the write sequence b = 2c - 1.
struct BipolarFrame {
  Bits user_bits;
  Bits code_bits;
  std::vector<double> bipolar;

  static BipolarFrame from_codeword(Bits user_bits, Bits code_bits);
  bool valid() const;
};

struct ReadbackFrame {
  std::vector<double> samples;
  std::vector<double> noiseless;
  std::vector<double> media_noise;
  std::vector<double> jitter_noise;
  std::vector<double> electronic_noise;
  double tail_bound = 0.0;  // dibit truncation error bound on noiseless
};

double step_response(double t, const StepParams& params);

/// d^order s / dt^order, evaluated as a polynomial in tanh.
double step_derivative(double t, int order, const StepParams& params);

double dibit_response(double t, const StepParams& params);
double dibit_derivative(double t, int order, const StepParams& params);

/// Upper bound on |x_j - x_j(untruncated)| when p is cut to |t| <= span.
double truncation_tail_bound(const StepParams& params, int span);

/// x_j = sum_k 0.5 b_k p(j - k), |j - k| <= span. The sequence is extended
/// past both ends with its first/last symbol (repeated-symbol pads).
std::vector<double> synthesize_noiseless(std::span<const double> bipolar,
                                         const StepParams& params,
                                         int span = kDefaultSpan);

/// order-th time derivative of the readback at the symbol instants, built by
/// the same superposition as synthesize_noiseless.
std::vector<double> signal_derivative(std::span<const double> bipolar,
                                      const StepParams& params, int order,
                                      int span = kDefaultSpan);

/// Adds electronic, media and jitter noise to the noiseless readback x of the
/// given write sequence. Deterministic in cfg.seed.
ReadbackFrame apply_noise(std::span<const double> x, std::span<const double> bipolar,
                          const NoiseConfig& cfg, const StepParams& params,
                          int span = kDefaultSpan);

ReadbackFrame read_channel(std::span<const double> bipolar, const NoiseConfig& cfg,
                           const StepParams& params, int span = kDefaultSpan);

struct NoiseSigmas {
  double sigma_e = 0.0;
  double sigma_m = 0.0;
};

/// Inverts SNR = 10 log10(1 / (2 (sigma_e^2 + sigma_m^2))), splitting the
/// total variance by media_fraction.
NoiseSigmas snr_to_sigma(double snr_db, double media_fraction);
double sigma_to_snr(double sigma_e, double sigma_m);

}  // namespace pmr
