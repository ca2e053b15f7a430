// pmrsim: command-line driver for the recording-channel simulator.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pmr/codes.hpp"
#include "pmr/harness.hpp"

namespace {

using pmr::ConfigError;
using pmr::ExperimentConfig;

constexpr int kConfigExit = 1;
constexpr int kRuntimeExit = 2;

struct Overrides {
  std::string config_path;
  std::map<std::string, std::string> values;
};

// Every config key is also a flag of the same name.
void add_config_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "key=value config file");
  for (const auto& key : pmr::config_keys())
    cmd->add_option_function<std::string>(
        "--" + key, [&o, key](const std::string& v) { o.values[key] = v; }, "config key " + key);
}

ExperimentConfig resolve(const Overrides& o) {
  ExperimentConfig cfg = o.config_path.empty() ? ExperimentConfig{} : pmr::load_config(o.config_path);
  for (const auto& [k, v] : o.values) pmr::set_config_value(cfg, k, v);
  cfg.validate();
  return cfg;
}

// Output goes to cfg.output when set, stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty()) return;
    file_.open(path);
    if (!file_) throw std::runtime_error("cannot open " + path + " for writing");
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

int report_records(const std::vector<pmr::BerRecord>& recs) {
  for (const auto& r : recs)
    if (!r.error.empty()) {
      std::cerr << "pmrsim: point snr_db=" << r.snr_db << " failed: " << r.error << "\n";
      return kRuntimeExit;
    }
  return 0;
}

int cmd_simulate(const Overrides& o) {
  auto cfg = resolve(o);
  cfg.snr_db.resize(1);
  cfg.mismatch_db.resize(1);
  Sink sink(cfg.output);
  return report_records(pmr::run_sweep(cfg, &sink.stream()));
}

int cmd_sweep(const Overrides& o) {
  const auto cfg = resolve(o);
  Sink sink(cfg.output);
  return report_records(pmr::run_sweep(cfg, &sink.stream()));
}

int cmd_design_equalizer(const Overrides& o) {
  const auto cfg = resolve(o);
  if (cfg.channel == pmr::ChannelModel::kAwgn)
    throw ConfigError("design-equalizer needs channel=recording");
  const auto design = pmr::design_equalizer(cfg, cfg.snr_db.front());
  Sink sink(cfg.output);
  pmr::save_equalizer(sink.stream(), design);
  return 0;
}

void trace_row(std::ostream& os, const pmr::Candidate& c, bool selected) {
  char metric[32];
  std::snprintf(metric, sizeof metric, "%.17g", c.metric);
  if (c.position)
    os << *c.position;
  os << ',' << c.sign << ',' << (c.is_codeword() ? 1 : 0) << ',' << metric << ','
     << (selected ? 1 : 0) << '\n';
}

int cmd_decode_trace(const Overrides& o, std::uint64_t frame_index) {
  auto cfg = resolve(o);
  // the trace needs the full candidate list
  cfg.rvcm.early_exit = false;
  const pmr::Pipeline pipe(cfg, cfg.snr_db.front(), cfg.mismatch_db.front());
  const auto frame = pipe.make_frame(frame_index);
  const auto res = pipe.decode_rvcm(frame);
  const auto& set = res.candidates;

  Sink sink(cfg.output);
  auto& os = sink.stream();
  os << "position,sign,is_codeword,metric,selected\n";
  trace_row(os, set.baseline, !set.selected.has_value());
  for (std::size_t i = 0; i < set.entries.size(); ++i)
    trace_row(os, set.entries[i], set.selected == i);
  return 0;
}

int cmd_gen_code(const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  for (const auto& code : pmr::codes::shipped()) {
    const auto path = std::filesystem::path(out_dir) / code.file_name;
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    pmr::save_alist(os, code.h);
    os << "# " << code.h.label() << ": n=" << code.h.n() << " k=" << code.h.k()
       << " checks=" << code.h.m();
    if (auto d = code.h.claimed_min_distance()) os << " d>=" << *d;
    os << "\n# generated by pmrsim gen-code\n";
    std::cout << path.string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perpendicular magnetic recording channel simulator"};
  app.require_subcommand(1);

  Overrides sim_o, sweep_o, eq_o, trace_o;
  auto* sim = app.add_subcommand("simulate", "one operating point (first snr_db and mismatch_db)");
  add_config_flags(sim, sim_o);
  auto* sweep = app.add_subcommand("sweep", "snr_db x mismatch_db x decoders grid");
  add_config_flags(sweep, sweep_o);
  auto* eq = app.add_subcommand("design-equalizer", "write the equalizer for the first snr_db");
  add_config_flags(eq, eq_o);
  auto* trace = app.add_subcommand("decode-trace", "RVCM candidate list for one frame as CSV");
  add_config_flags(trace, trace_o);
  std::uint64_t frame_index = 0;
  trace->add_option("--frame", frame_index, "frame index");
  auto* gen = app.add_subcommand("gen-code", "write the shipped parity-check matrices");
  std::string out_dir = "data/codes";
  gen->add_option("--out-dir", out_dir, "destination directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigExit;
  }

  try {
    if (*sim) return cmd_simulate(sim_o);
    if (*sweep) return cmd_sweep(sweep_o);
    if (*eq) return cmd_design_equalizer(eq_o);
    if (*trace) return cmd_decode_trace(trace_o, frame_index);
    if (*gen) return cmd_gen_code(out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "pmrsim: config error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const std::exception& e) {
    std::cerr << "pmrsim: " << e.what() << "\n";
    return kRuntimeExit;
  }
  return 0;
}
