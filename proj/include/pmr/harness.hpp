#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pmr/equalize.hpp"
#include "pmr/rvcm.hpp"
#include "pmr/waveform.hpp"

namespace pmr {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ChannelModel {
  kRecording,  // tanh step response, equalized to the PR target
  kAwgn,       // memoryless +-1 levels plus Gaussian noise
};

enum class DecoderKind { kBp, kRvcm };

struct ExperimentConfig {
  std::string code = "data/codes/cyclic_127_84.alist";  // or "uncoded:<n>"
  ChannelModel channel = ChannelModel::kRecording;
  StepParams step;
  PrTarget target;
  int span = kDefaultSpan;
  double media_fraction = 0.0;
  double jitter_max = 0.0;
  int taylor_order = 6;
  int eq_taps = 21;
  int eq_training_len = 100000;
  std::vector<double> snr_db{10.0};
  std::vector<double> mismatch_db{0.0};
  std::vector<DecoderKind> decoders{DecoderKind::kBp};
  LoopConfig loop;
  RvcmConfig rvcm;
  long max_frames = 10000;
  long max_frame_errors = 100;
  std::uint64_t seed = 1;
  int threads = 1;
  bool record_time = true;
  std::string output;

  void validate() const;
};

/// Recognised keys, in documentation order.
const std::vector<std::string>& config_keys();
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);
/// Flat key=value text; '#' starts a comment.
ExperimentConfig parse_config(std::istream& is, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path);

std::string to_string(DecoderKind d);

struct BerRecord {
  double snr_db = 0.0;
  double mismatch_db = 0.0;
  DecoderKind decoder = DecoderKind::kBp;
  std::size_t i_max = 0;
  long frames = 0;
  long bit_errors = 0;
  long frame_errors = 0;
  std::size_t message_bits = 0;  // k
  double seconds = 0.0;
  std::string error;

  double ber() const;
  double fer() const;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval for `successes` out of `trials`.
Interval wilson_interval(long successes, long trials, double z = 1.959963984540054);

inline constexpr const char* kCsvHeader =
    "snr_db,mismatch_db,decoder,i_max,frames,bit_errors,frame_errors,ber,fer,seconds";
std::string csv_row(const BerRecord& rec);

/// Everything needed to push frames through channel and decoder at one
/// operating point. Immutable after construction.
class Pipeline {
 public:
  Pipeline(const ExperimentConfig& cfg, double snr_db, double mismatch_db);
  Pipeline(const ExperimentConfig& cfg, std::shared_ptr<const ParityCheckMatrix> code,
           double snr_db, double mismatch_db);

  struct Frame {
    Bits message;
    Bits codeword;
    std::vector<double> z;
  };

  /// Message, codeword and equalized samples for frame `index`.
  Frame make_frame(std::uint64_t index) const;
  std::uint64_t frame_seed(std::uint64_t index) const;

  DecodeResult decode(const Frame& f, DecoderKind kind) const;
  RvcmResult decode_rvcm(const Frame& f) const;

  const ParityCheckMatrix& code() const { return *code_; }
  const TrellisSpec& trellis() const { return trellis_; }
  const LoopConfig& loop() const { return loop_; }
  const RvcmConfig& rvcm() const { return rvcm_; }
  const std::optional<EqualizerDesign>& equalizer() const { return equalizer_; }
  const NoiseConfig& noise() const { return noise_; }

 private:
  void init(double snr_db, double mismatch_db);

  ExperimentConfig cfg_;
  std::shared_ptr<const ParityCheckMatrix> code_;
  TrellisSpec trellis_;
  NoiseConfig noise_;
  double snr_db_ = 0.0;
  double mismatch_db_ = 0.0;
  LoopConfig loop_;
  RvcmConfig rvcm_;
  std::optional<EqualizerDesign> equalizer_;
};

std::shared_ptr<const ParityCheckMatrix> load_code(const std::string& spec);

/// Equalizer trained on the recording channel at `snr_db`; the design seed
/// is derived from cfg.seed and the SNR.
EqualizerDesign design_equalizer(const ExperimentConfig& cfg, double snr_db);

BerRecord run_point(const ExperimentConfig& cfg, double snr_db, double mismatch_db,
                    DecoderKind decoder);
BerRecord run_point(const Pipeline& pipeline, const ExperimentConfig& cfg, DecoderKind decoder);

/// Cartesian sweep over snr_db x mismatch_db x decoders. When `csv` is given
/// the header and each record are written and flushed as they complete.
std::vector<BerRecord> run_sweep(const ExperimentConfig& cfg, std::ostream* csv = nullptr);

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace pmr
