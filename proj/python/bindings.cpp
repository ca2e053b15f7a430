#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "pmr/codes.hpp"
#include "pmr/harness.hpp"

namespace py = pybind11;
using namespace pmr;

namespace {

LlrVector to_llr(const std::vector<double>& v) { return LlrVector(v); }
std::vector<double> from_llr(const LlrVector& v) { return {v.values().begin(), v.values().end()}; }

py::dict decode_dict(const DecodeResult& r) {
  py::dict d;
  d["hard_bits"] = r.hard_bits;
  d["soft_llr"] = from_llr(r.soft_llr);
  d["is_codeword"] = r.is_codeword;
  d["iterations"] = r.iterations_used;
  return d;
}

py::dict record_dict(const BerRecord& r) {
  py::dict d;
  d["snr_db"] = r.snr_db;
  d["mismatch_db"] = r.mismatch_db;
  d["decoder"] = to_string(r.decoder);
  d["i_max"] = r.i_max;
  d["frames"] = r.frames;
  d["bit_errors"] = r.bit_errors;
  d["frame_errors"] = r.frame_errors;
  d["ber"] = r.ber();
  d["fer"] = r.fer();
  d["seconds"] = r.seconds;
  d["error"] = r.error;
  return d;
}

ExperimentConfig make_config(const py::dict& kv) {
  ExperimentConfig cfg;
  for (const auto& [k, v] : kv) pmr::set_config_value(cfg, py::str(k), py::str(v));
  cfg.validate();
  return cfg;
}

DecoderKind decoder_kind(const std::string& s) {
  if (s == "bp") return DecoderKind::kBp;
  if (s == "rvcm") return DecoderKind::kRvcm;
  throw py::value_error("decoder must be 'bp' or 'rvcm'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Perpendicular magnetic recording channel, detector and decoders";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<AlistError>(m, "AlistError", PyExc_ValueError);

  // channel
  py::class_<StepParams>(m, "StepParams")
      .def(py::init([](double amplitude, double pw50) { return StepParams{amplitude, pw50}; }),
           py::arg("amplitude") = 1.0, py::arg("pw50") = 1.4)
      .def_readwrite("amplitude", &StepParams::amplitude)
      .def_readwrite("pw50", &StepParams::pw50);

  py::class_<NoiseConfig>(m, "NoiseConfig")
      .def(py::init([](double sigma_e, double sigma_m, double jitter_max, int taylor_order,
                       std::uint64_t seed) {
             NoiseConfig c{sigma_e, sigma_m, jitter_max, taylor_order, seed};
             c.validate();
             return c;
           }),
           py::arg("sigma_e") = 0.0, py::arg("sigma_m") = 0.0, py::arg("jitter_max") = 0.0,
           py::arg("taylor_order") = 6, py::arg("seed") = 0)
      .def_readwrite("sigma_e", &NoiseConfig::sigma_e)
      .def_readwrite("sigma_m", &NoiseConfig::sigma_m)
      .def_readwrite("jitter_max", &NoiseConfig::jitter_max)
      .def_readwrite("taylor_order", &NoiseConfig::taylor_order)
      .def_readwrite("seed", &NoiseConfig::seed);

  m.def("step_response", &step_response, py::arg("t"), py::arg("params") = StepParams{});
  m.def("dibit_response", &dibit_response, py::arg("t"), py::arg("params") = StepParams{});
  m.def(
      "read_channel",
      [](const std::vector<double>& bipolar, const NoiseConfig& cfg, const StepParams& p, int span) {
        const auto f = read_channel(bipolar, cfg, p, span);
        py::dict d;
        d["samples"] = f.samples;
        d["noiseless"] = f.noiseless;
        d["media_noise"] = f.media_noise;
        d["jitter_noise"] = f.jitter_noise;
        d["electronic_noise"] = f.electronic_noise;
        return d;
      },
      py::arg("bipolar"), py::arg("noise") = NoiseConfig{}, py::arg("params") = StepParams{},
      py::arg("span") = kDefaultSpan);
  m.def(
      "snr_to_sigma",
      [](double snr, double mf) {
        const auto s = snr_to_sigma(snr, mf);
        return py::make_tuple(s.sigma_e, s.sigma_m);
      },
      py::arg("snr_db"), py::arg("media_fraction") = 0.0);
  m.def("sigma_to_snr", &sigma_to_snr, py::arg("sigma_e"), py::arg("sigma_m"));

  // target and equalizer
  py::class_<PrTarget>(m, "PrTarget")
      .def(py::init([](std::vector<double> c) {
             PrTarget t{std::move(c), ""};
             t.validate();
             return t;
           }),
           py::arg("coefficients"))
      .def_static("pr4642", &PrTarget::pr4642)
      .def_static("memoryless", &PrTarget::memoryless, py::arg("c0"))
      .def_readonly("coefficients", &PrTarget::coefficients)
      .def_property_readonly("memory", &PrTarget::memory);
  m.def(
      "target_response",
      [](const PrTarget& t, const std::vector<double>& b, double history) {
        return target_response(t, b, history);
      },
      py::arg("target"), py::arg("bipolar"), py::arg("history") = -1.0);

  py::class_<EqualizerDesign>(m, "EqualizerDesign")
      .def_readonly("taps", &EqualizerDesign::taps)
      .def_readonly("delay", &EqualizerDesign::delay)
      .def_readonly("residual_mse", &EqualizerDesign::residual_mse)
      .def(
          "apply",
          [](const EqualizerDesign& d, const std::vector<double>& r, std::size_t first,
             std::size_t count) { return apply(d, r, first, count); },
          py::arg("samples"), py::arg("first"), py::arg("count"))
      .def("__str__", [](const EqualizerDesign& d) {
        std::ostringstream os;
        save_equalizer(os, d);
        return os.str();
      });
  m.def("design_mmse", &design_mmse, py::arg("params"), py::arg("noise"), py::arg("target"),
        py::arg("n_taps") = 21, py::arg("training_len") = 100000, py::arg("seed") = 1,
        py::arg("span") = kDefaultSpan);

  // detector
  py::class_<TrellisSpec>(m, "Trellis")
      .def(py::init(&build_trellis), py::arg("target"))
      .def_readonly("n_states", &TrellisSpec::n_states)
      .def_readonly("target", &TrellisSpec::target);
  m.def(
      "bcjr",
      [](const TrellisSpec& t, const std::vector<double>& z, const std::vector<double>& priors,
         double sigma2, double mismatch_db, bool max_log) {
        DetectorConfig cfg;
        cfg.assumed_sigma2 = sigma2;
        cfg.mismatch_db = mismatch_db;
        cfg.combine = max_log ? Combine::kMaxLog : Combine::kLogSumExp;
        const auto out = bcjr(t, z, to_llr(priors), cfg);
        return py::make_tuple(from_llr(out.app), from_llr(out.extrinsic));
      },
      py::arg("trellis"), py::arg("z"), py::arg("priors"), py::arg("sigma2") = 1.0,
      py::arg("mismatch_db") = 0.0, py::arg("max_log") = false);

  // codes
  py::class_<ParityCheckMatrix>(m, "ParityCheckMatrix")
      .def(py::init<std::size_t, std::vector<std::vector<std::uint32_t>>, std::string>(),
           py::arg("n"), py::arg("rows"), py::arg("label") = "")
      .def_static("load", py::overload_cast<const std::string&>(&load_alist), py::arg("path"))
      .def_property_readonly("n", &ParityCheckMatrix::n)
      .def_property_readonly("m", &ParityCheckMatrix::m)
      .def_property_readonly("k", &ParityCheckMatrix::k)
      .def_property_readonly("rows", &ParityCheckMatrix::rows)
      .def_property_readonly("label", &ParityCheckMatrix::label)
      .def("encode", &ParityCheckMatrix::encode, py::arg("message"))
      .def("extract_message", &ParityCheckMatrix::extract_message, py::arg("codeword"))
      .def("syndrome_weight", &ParityCheckMatrix::syndrome_weight, py::arg("word"))
      .def("is_codeword", &ParityCheckMatrix::is_codeword, py::arg("word"));
  m.def("shipped_codes", [] {
    py::dict d;
    for (auto& c : codes::shipped()) d[py::str(c.file_name)] = c.h;
    return d;
  });

  // decoders
  m.def(
      "bp_decode",
      [](const ParityCheckMatrix& h, const std::vector<double>& llr, int max_iters, bool early_stop) {
        BpConfig cfg;
        cfg.max_iters = max_iters;
        cfg.early_stop = early_stop;
        return decode_dict(bp_decode(h, to_llr(llr), cfg));
      },
      py::arg("h"), py::arg("llr"), py::arg("max_iters") = 100, py::arg("early_stop") = true);

  auto loop_cfg = [](double sigma2, int outer) {
    LoopConfig c;
    c.detector.assumed_sigma2 = sigma2;
    c.outer_iters = outer;
    return c;
  };
  m.def(
      "iterative_decode",
      [loop_cfg](const TrellisSpec& t, const std::vector<double>& z, const ParityCheckMatrix& h,
                 double sigma2, int outer_iters) {
        const auto r = iterative_decode(t, z, h, loop_cfg(sigma2, outer_iters));
        auto d = decode_dict(r.decoded);
        d["trace"] = r.trace;
        d["detector_app"] = from_llr(r.detector_app);
        return d;
      },
      py::arg("trellis"), py::arg("z"), py::arg("h"), py::arg("sigma2") = 1.0,
      py::arg("outer_iters") = 10);
  m.def(
      "rvcm_decode",
      [loop_cfg](const TrellisSpec& t, const std::vector<double>& z, const ParityCheckMatrix& h,
                 double sigma2, int outer_iters, std::optional<std::size_t> i_max,
                 bool early_exit) {
        RvcmConfig cfg;
        cfg.i_max = i_max.value_or(RvcmConfig::kAll);
        cfg.early_exit = early_exit;
        const auto r = rvcm_decode(t, z, h, loop_cfg(sigma2, outer_iters), cfg);
        auto d = decode_dict(r.best);
        d["metric"] = r.best_metric;
        d["critical"] = r.candidates.critical;
        py::list cands;
        for (const auto& c : r.candidates.entries)
          cands.append(py::make_tuple(c.position.value_or(0), c.sign, c.is_codeword(), c.metric));
        d["candidates"] = cands;
        d["selected"] = r.candidates.selected;
        return d;
      },
      py::arg("trellis"), py::arg("z"), py::arg("h"), py::arg("sigma2") = 1.0,
      py::arg("outer_iters") = 10, py::arg("i_max") = 10, py::arg("early_exit") = true);
  m.def(
      "euclidean_metric",
      [](const Bits& c, const std::vector<double>& z, const PrTarget& t, std::uint8_t pad) {
        return euclidean_metric(c, z, t, pad);
      },
      py::arg("candidate"), py::arg("z"), py::arg("target"), py::arg("pad_bit") = 0);

  // harness
  m.def("config_keys", &config_keys);
  m.def(
      "run_point",
      [](const py::dict& kv, double snr, double mm, const std::string& decoder) {
        py::gil_scoped_release release;
        ExperimentConfig cfg;
        {
          py::gil_scoped_acquire acquire;
          cfg = make_config(kv);
        }
        const auto rec = run_point(cfg, snr, mm, decoder_kind(decoder));
        py::gil_scoped_acquire acquire;
        return record_dict(rec);
      },
      py::arg("config"), py::arg("snr_db"), py::arg("mismatch_db") = 0.0,
      py::arg("decoder") = "bp");
  m.def(
      "run_sweep",
      [](const py::dict& kv) {
        const auto cfg = make_config(kv);
        std::ostringstream os;
        {
          py::gil_scoped_release release;
          run_sweep(cfg, &os);
        }
        return os.str();
      },
      py::arg("config"), "Runs the sweep and returns the CSV text.");
  m.def(
      "wilson_interval",
      [](long k, long n, double z) {
        const auto i = wilson_interval(k, n, z);
        return py::make_tuple(i.lo, i.hi);
      },
      py::arg("successes"), py::arg("trials"), py::arg("z") = 1.959963984540054);
  m.attr("CSV_HEADER") = kCsvHeader;
}
