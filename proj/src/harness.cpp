#include "pmr/harness.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

namespace pmr {

// ---------------------------------------------------------------------------
// configuration

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " expects a number, got '" + v + "'");
  }
}

long to_long(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    long d = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " expects an integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("config: " + key + " expects a boolean, got '" + v + "'");
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split(v, ',')) out.push_back(to_double(key, item));
  if (out.empty()) throw ConfigError("config: " + key + " is empty");
  return out;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "code",          "channel",        "amplitude",       "pw50",
      "target",        "span",           "media_fraction",  "jitter_max",
      "taylor_order",  "eq_taps",        "eq_training_len", "snr_db",
      "mismatch_db",   "decoders",       "outer_iters",     "bp_max_iters",
      "bp_early_stop", "damping",        "check_rule",      "combine",
      "i_max",         "selection_source", "include_baseline", "early_exit",
      "restart",       "rvcm_threads",   "max_frames",      "max_frame_errors",
      "seed",          "threads",        "record_time",     "output"};
  return keys;
}

void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "code") {
    cfg.code = v;
  } else if (key == "channel") {
    if (v == "recording" || v == "pr")
      cfg.channel = ChannelModel::kRecording;
    else if (v == "awgn")
      cfg.channel = ChannelModel::kAwgn;
    else
      throw ConfigError("config: channel must be recording|awgn");
  } else if (key == "amplitude") {
    cfg.step.amplitude = to_double(key, v);
  } else if (key == "pw50") {
    cfg.step.pw50 = to_double(key, v);
  } else if (key == "target") {
    cfg.target.coefficients = to_doubles(key, v);
    cfg.target.label = v;
  } else if (key == "span") {
    cfg.span = static_cast<int>(to_long(key, v));
  } else if (key == "media_fraction") {
    cfg.media_fraction = to_double(key, v);
  } else if (key == "jitter_max") {
    cfg.jitter_max = to_double(key, v);
  } else if (key == "taylor_order") {
    cfg.taylor_order = static_cast<int>(to_long(key, v));
  } else if (key == "eq_taps") {
    cfg.eq_taps = static_cast<int>(to_long(key, v));
  } else if (key == "eq_training_len") {
    cfg.eq_training_len = static_cast<int>(to_long(key, v));
  } else if (key == "snr_db") {
    cfg.snr_db = to_doubles(key, v);
  } else if (key == "mismatch_db") {
    cfg.mismatch_db = to_doubles(key, v);
  } else if (key == "decoders") {
    cfg.decoders.clear();
    for (const auto& d : split(v, ',')) {
      if (d == "bp")
        cfg.decoders.push_back(DecoderKind::kBp);
      else if (d == "rvcm")
        cfg.decoders.push_back(DecoderKind::kRvcm);
      else
        throw ConfigError("config: unknown decoder '" + d + "'");
    }
  } else if (key == "outer_iters") {
    cfg.loop.outer_iters = static_cast<int>(to_long(key, v));
  } else if (key == "bp_max_iters") {
    cfg.loop.bp.max_iters = static_cast<int>(to_long(key, v));
  } else if (key == "bp_early_stop") {
    cfg.loop.bp.early_stop = to_bool(key, v);
  } else if (key == "damping") {
    cfg.loop.bp.damping = to_double(key, v);
  } else if (key == "check_rule") {
    if (v == "tanh")
      cfg.loop.bp.rule = CheckRule::kTanh;
    else if (v == "boxplus")
      cfg.loop.bp.rule = CheckRule::kBoxPlus;
    else
      throw ConfigError("config: check_rule must be tanh|boxplus");
  } else if (key == "combine") {
    if (v == "exact")
      cfg.loop.detector.combine = Combine::kLogSumExp;
    else if (v == "max")
      cfg.loop.detector.combine = Combine::kMaxLog;
    else
      throw ConfigError("config: combine must be exact|max");
  } else if (key == "i_max") {
    cfg.rvcm.i_max = (v == "n" || v == "all") ? RvcmConfig::kAll
                                              : static_cast<std::size_t>(to_long(key, v));
  } else if (key == "selection_source") {
    if (v == "app")
      cfg.rvcm.selection_source = ReliabilitySource::kDetectorApp;
    else if (v == "bp")
      cfg.rvcm.selection_source = ReliabilitySource::kBpPosterior;
    else
      throw ConfigError("config: selection_source must be app|bp");
  } else if (key == "include_baseline") {
    cfg.rvcm.include_baseline = to_bool(key, v);
  } else if (key == "early_exit") {
    cfg.rvcm.early_exit = to_bool(key, v);
  } else if (key == "restart") {
    if (v == "loop")
      cfg.rvcm.restart = RestartMode::kFullLoop;
    else if (v == "bp")
      cfg.rvcm.restart = RestartMode::kBpOnly;
    else
      throw ConfigError("config: restart must be loop|bp");
  } else if (key == "rvcm_threads") {
    cfg.rvcm.threads = static_cast<int>(to_long(key, v));
  } else if (key == "max_frames") {
    cfg.max_frames = to_long(key, v);
  } else if (key == "max_frame_errors") {
    cfg.max_frame_errors = to_long(key, v);
  } else if (key == "seed") {
    try {
      cfg.seed = std::stoull(v);
    } catch (const std::exception&) {
      throw ConfigError("config: seed expects an unsigned integer");
    }
  } else if (key == "threads") {
    cfg.threads = static_cast<int>(to_long(key, v));
  } else if (key == "record_time") {
    cfg.record_time = to_bool(key, v);
  } else if (key == "output") {
    cfg.output = v;
  } else {
    throw ConfigError("config: unknown key '" + key + "'");
  }
}

ExperimentConfig parse_config(std::istream& is, ExperimentConfig cfg) {
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    set_config_value(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  const ExperimentConfig defaults;
  auto cfg = parse_config(f);
  // a code path given in the file is relative to the file itself
  const std::filesystem::path code(cfg.code);
  if (cfg.code != defaults.code && cfg.code.rfind("uncoded:", 0) != 0 && code.is_relative())
    cfg.code = (std::filesystem::path(path).parent_path() / code).lexically_normal().string();
  return cfg;
}

void ExperimentConfig::validate() const {
  try {
    step.validate();
    target.validate();
    loop.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (snr_db.empty()) throw ConfigError("config: snr_db list is empty");
  if (mismatch_db.empty()) throw ConfigError("config: mismatch_db list is empty");
  if (decoders.empty()) throw ConfigError("config: decoders list is empty");
  if (max_frames < 1) throw ConfigError("config: max_frames must be >= 1");
  if (max_frame_errors < 1) throw ConfigError("config: max_frame_errors must be >= 1");
  if (!(media_fraction >= 0.0 && media_fraction <= 1.0))
    throw ConfigError("config: media_fraction must be in [0, 1]");
  if (!(jitter_max >= 0.0 && jitter_max < 0.5))
    throw ConfigError("config: jitter_max must be in [0, 0.5)");
  if (taylor_order < 1 || taylor_order > kMaxTaylorOrder)
    throw ConfigError("config: taylor_order out of range");
  if (span < 1) throw ConfigError("config: span must be >= 1");
  if (threads < 1) throw ConfigError("config: threads must be >= 1");
  if (channel == ChannelModel::kRecording && eq_taps < static_cast<int>(target.length()))
    throw ConfigError("config: eq_taps must be >= target length");
}

std::string to_string(DecoderKind d) { return d == DecoderKind::kBp ? "bp" : "rvcm"; }

// ---------------------------------------------------------------------------
// statistics and records

double BerRecord::ber() const {
  const double bits = static_cast<double>(frames) * static_cast<double>(message_bits);
  return bits > 0 ? static_cast<double>(bit_errors) / bits : 0.0;
}

double BerRecord::fer() const {
  return frames > 0 ? static_cast<double>(frame_errors) / static_cast<double>(frames) : 0.0;
}

Interval wilson_interval(long successes, long trials, double z) {
  if (trials <= 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

std::string csv_row(const BerRecord& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%s,%zu,%ld,%ld,%ld,%.17g,%.17g,%.6f", r.snr_db,
                r.mismatch_db, to_string(r.decoder).c_str(), r.i_max, r.frames, r.bit_errors,
                r.frame_errors, r.ber(), r.fer(), r.seconds);
  return buf;
}

// ---------------------------------------------------------------------------
// pipeline

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finaliser over a ^ rotated b
  std::uint64_t z = a ^ (std::rotl(b, 29) + 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::shared_ptr<const ParityCheckMatrix> load_code(const std::string& spec) {
  constexpr std::string_view kUncoded = "uncoded:";
  if (spec.rfind(kUncoded, 0) == 0) {
    long n = 0;
    try {
      n = std::stol(spec.substr(kUncoded.size()));
    } catch (const std::exception&) {
      throw ConfigError("config: bad uncoded length in '" + spec + "'");
    }
    if (n < 1) throw ConfigError("config: uncoded length must be >= 1");
    return std::make_shared<const ParityCheckMatrix>(ParityCheckMatrix::uncoded(n));
  }
  return std::make_shared<const ParityCheckMatrix>(load_alist(spec));
}

EqualizerDesign design_equalizer(const ExperimentConfig& cfg, double snr_db) {
  const auto sig = snr_to_sigma(snr_db, cfg.media_fraction);
  NoiseConfig noise;
  noise.sigma_e = sig.sigma_e;
  noise.sigma_m = sig.sigma_m;
  noise.jitter_max = cfg.jitter_max;
  noise.taylor_order = cfg.taylor_order;
  const std::uint64_t seed = mix_seed(cfg.seed, std::bit_cast<std::uint64_t>(snr_db));
  return design_mmse(cfg.step, noise, cfg.target, cfg.eq_taps, cfg.eq_training_len, seed, cfg.span);
}

Pipeline::Pipeline(const ExperimentConfig& cfg, double snr_db, double mismatch_db)
    : Pipeline(cfg, load_code(cfg.code), snr_db, mismatch_db) {}

Pipeline::Pipeline(const ExperimentConfig& cfg, std::shared_ptr<const ParityCheckMatrix> code,
                   double snr_db, double mismatch_db)
    : cfg_(cfg), code_(std::move(code)) {
  cfg_.validate();
  init(snr_db, mismatch_db);
}

void Pipeline::init(double snr_db, double mismatch_db) {
  snr_db_ = snr_db;
  mismatch_db_ = mismatch_db;
  const auto sig = snr_to_sigma(snr_db, cfg_.media_fraction);
  noise_.sigma_e = sig.sigma_e;
  noise_.sigma_m = sig.sigma_m;
  noise_.jitter_max = cfg_.jitter_max;
  noise_.taylor_order = cfg_.taylor_order;
  noise_.seed = 0;
  loop_ = cfg_.loop;
  rvcm_ = cfg_.rvcm;
  loop_.detector.mismatch_db = mismatch_db;

  if (cfg_.channel == ChannelModel::kAwgn) {
    trellis_ = build_trellis(PrTarget::memoryless(2.0 * cfg_.step.amplitude));
    loop_.detector.assumed_sigma2 = sig.sigma_e * sig.sigma_e + sig.sigma_m * sig.sigma_m;
  } else {
    trellis_ = build_trellis(cfg_.target);
    equalizer_ = design_equalizer(cfg_, snr_db);
    loop_.detector.assumed_sigma2 = std::max(equalizer_->residual_mse, 1e-12);
  }
}

std::uint64_t Pipeline::frame_seed(std::uint64_t index) const {
  std::uint64_t s = mix_seed(cfg_.seed, std::bit_cast<std::uint64_t>(snr_db_));
  s = mix_seed(s, std::bit_cast<std::uint64_t>(mismatch_db_));
  return mix_seed(s, index);
}

Pipeline::Frame Pipeline::make_frame(std::uint64_t index) const {
  std::mt19937_64 rng(frame_seed(index));
  Frame f;
  f.message.resize(code_->k());
  for (auto& b : f.message) b = static_cast<std::uint8_t>(rng() >> 63);
  f.codeword = code_->encode(f.message);
  const std::size_t n = code_->n();
  const double pad = bipolar(loop_.pad_bit);

  if (cfg_.channel == ChannelModel::kAwgn) {
    const double sigma = std::sqrt(noise_.sigma_e * noise_.sigma_e + noise_.sigma_m * noise_.sigma_m);
    const double level = 0.5 * trellis_.target.coefficients[0];
    std::normal_distribution<double> normal(0.0, 1.0);
    f.z.resize(n);
    for (std::size_t i = 0; i < n; ++i) f.z[i] = level * bipolar(f.codeword[i]) + sigma * normal(rng);
    return f;
  }

  const auto pads = static_cast<std::size_t>(std::max(cfg_.span, cfg_.eq_taps));
  std::vector<double> symbols(pads, pad);
  for (auto c : f.codeword) symbols.push_back(bipolar(c));
  symbols.insert(symbols.end(), pads, pad);
  NoiseConfig noise = noise_;
  noise.seed = rng();
  const auto readback = read_channel(symbols, noise, cfg_.step, cfg_.span);
  f.z = apply(*equalizer_, readback.samples, pads, n + trellis_.target.memory());
  return f;
}

RvcmResult Pipeline::decode_rvcm(const Frame& f) const {
  return rvcm_decode(trellis_, f.z, *code_, loop_, rvcm_);
}

DecodeResult Pipeline::decode(const Frame& f, DecoderKind kind) const {
  if (kind == DecoderKind::kRvcm) return decode_rvcm(f).best;
  return iterative_decode(trellis_, f.z, *code_, loop_).decoded;
}

// ---------------------------------------------------------------------------
// Monte Carlo

BerRecord run_point(const Pipeline& pipeline, const ExperimentConfig& cfg, DecoderKind decoder) {
  BerRecord rec;
  rec.decoder = decoder;
  rec.message_bits = pipeline.code().k();
  rec.i_max = decoder == DecoderKind::kRvcm ? pipeline.rvcm().resolved_i_max(pipeline.code().n()) : 0;
  const auto start = std::chrono::steady_clock::now();

  struct Outcome {
    long bit_errors = 0;
    bool frame_error = false;
    std::string error;
  };
  const auto workers = static_cast<std::size_t>(std::max(1, cfg.threads));
  const std::size_t batch = 16 * workers;
  std::vector<Outcome> outcomes;
  long next = 0;
  bool done = false;
  while (!done && next < cfg.max_frames) {
    const std::size_t count =
        static_cast<std::size_t>(std::min<long>(static_cast<long>(batch), cfg.max_frames - next));
    outcomes.assign(count, {});
    auto work = [&](std::size_t w) {
      for (std::size_t i = w; i < count; i += workers) {
        try {
          const auto frame = pipeline.make_frame(static_cast<std::uint64_t>(next) + i);
          const auto dec = pipeline.decode(frame, decoder);
          const auto msg = pipeline.code().extract_message(dec.hard_bits);
          long errs = 0;
          for (std::size_t b = 0; b < msg.size(); ++b) errs += msg[b] != frame.message[b];
          outcomes[i].bit_errors = errs;
          outcomes[i].frame_error = errs > 0;
        } catch (const std::exception& e) {
          outcomes[i].error = e.what();
        }
      }
    };
    if (workers == 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
      for (auto& t : pool) t.join();
    }
    // Merge in frame order so the stop rule is independent of scheduling.
    for (const auto& o : outcomes) {
      if (!o.error.empty()) {
        rec.error = o.error;
        done = true;
        break;
      }
      ++rec.frames;
      rec.bit_errors += o.bit_errors;
      rec.frame_errors += o.frame_error ? 1 : 0;
      if (rec.frame_errors >= cfg.max_frame_errors) {
        done = true;
        break;
      }
    }
    next += static_cast<long>(count);
  }
  if (cfg.record_time)
    rec.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

BerRecord run_point(const ExperimentConfig& cfg, double snr_db, double mismatch_db,
                    DecoderKind decoder) {
  const Pipeline pipeline(cfg, snr_db, mismatch_db);
  auto rec = run_point(pipeline, cfg, decoder);
  rec.snr_db = snr_db;
  rec.mismatch_db = mismatch_db;
  return rec;
}

std::vector<BerRecord> run_sweep(const ExperimentConfig& cfg, std::ostream* csv) {
  cfg.validate();
  const auto code = load_code(cfg.code);
  if (csv) *csv << kCsvHeader << '\n' << std::flush;
  std::vector<BerRecord> records;
  for (double snr : cfg.snr_db) {
    for (double mm : cfg.mismatch_db) {
      std::optional<Pipeline> pipeline;
      std::string setup_error;
      try {
        pipeline.emplace(cfg, code, snr, mm);
      } catch (const std::exception& e) {
        setup_error = e.what();
      }
      for (auto dec : cfg.decoders) {
        BerRecord rec;
        if (pipeline) {
          rec = run_point(*pipeline, cfg, dec);
        } else {
          rec.decoder = dec;
          rec.error = setup_error;
        }
        rec.snr_db = snr;
        rec.mismatch_db = mm;
        records.push_back(rec);
        if (csv) *csv << csv_row(rec) << '\n' << std::flush;
      }
    }
  }
  return records;
}

}  // namespace pmr
