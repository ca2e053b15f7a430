#include "pmr/rvcm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace pmr {

std::vector<std::size_t> select_critical(std::span<const double> reliability, std::size_t i_max) {
  if (i_max > reliability.size())
    throw std::invalid_argument("select_critical: i_max exceeds vector length");
  std::vector<std::size_t> order(reliability.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(reliability[a]) < std::abs(reliability[b]);
  });
  order.resize(i_max);
  return order;
}

double euclidean_metric(const Bits& candidate, std::span<const double> z, const PrTarget& target,
                        std::uint8_t pad_bit) {
  const std::size_t tail = target.memory();
  if (z.size() != candidate.size() + tail)
    throw std::invalid_argument("euclidean_metric: z must hold n + L - 1 samples");
  std::vector<double> symbols;
  symbols.reserve(z.size());
  for (auto b : candidate) symbols.push_back(bipolar(b));
  symbols.insert(symbols.end(), tail, bipolar(pad_bit));
  const auto ref = target_response(target, symbols, bipolar(pad_bit));
  double acc = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    const double e = z[j] - ref[j];
    acc += e * e;
  }
  return acc;
}

namespace {

// Codewords first, then smaller metric.
bool better(const Candidate& a, const Candidate& b) {
  if (a.is_codeword() != b.is_codeword()) return a.is_codeword();
  return a.metric < b.metric;
}

}  // namespace

RvcmResult rvcm_decode(const TrellisSpec& trellis, std::span<const double> z,
                       const ParityCheckMatrix& h, const LoopConfig& loop_cfg,
                       const RvcmConfig& cfg) {
  const std::size_t n = h.n();
  const std::size_t i_max = cfg.resolved_i_max(n);
  if (i_max > n) throw std::invalid_argument("rvcm_decode: i_max exceeds n");
  const auto& target = trellis.target;

  RvcmResult out;
  auto& set = out.candidates;
  const LoopResult base = iterative_decode(trellis, z, h, loop_cfg);
  set.baseline.decoded = base.decoded;
  set.baseline.metric = euclidean_metric(base.decoded.hard_bits, z, target, loop_cfg.pad_bit);
  set.reliability = base.reliability(cfg.selection_source);

  const bool skip = cfg.early_exit && base.decoded.is_codeword;
  if (!skip && i_max > 0) {
    set.critical = select_critical(set.reliability.values(), i_max);
    set.entries.resize(2 * i_max);

    auto restart = [&](std::size_t slot) {
      const std::size_t pos = set.critical[slot / 2];
      const int sign = slot % 2 == 0 ? -1 : +1;
      LlrVector pins(n, 0.0);
      pins.pin(pos, sign);
      Candidate c;
      c.position = pos;
      c.sign = sign;
      if (cfg.restart == RestartMode::kFullLoop) {
        c.decoded = iterative_decode(trellis, z, h, loop_cfg, &pins).decoded;
      } else {
        LlrVector channel = base.detector_extrinsic;
        apply_overrides(channel, pins);
        c.decoded = bp_decode(h, channel, loop_cfg.bp);
      }
      c.metric = euclidean_metric(c.decoded.hard_bits, z, target, loop_cfg.pad_bit);
      set.entries[slot] = std::move(c);
    };

    const std::size_t jobs = set.entries.size();
    const auto workers = static_cast<std::size_t>(std::max(1, cfg.threads));
    if (workers == 1 || jobs < 2) {
      for (std::size_t s = 0; s < jobs; ++s) restart(s);
    } else {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < std::min(workers, jobs); ++w)
        pool.emplace_back([&, w] {
          for (std::size_t s = w; s < jobs; s += workers) restart(s);
        });
      for (auto& t : pool) t.join();
    }
  }

  const Candidate* best = nullptr;
  if (set.entries.empty() && !cfg.include_baseline && !skip)
    throw std::invalid_argument("rvcm_decode: empty candidate set");
  if (cfg.include_baseline || set.entries.empty()) best = &set.baseline;
  for (std::size_t i = 0; i < set.entries.size(); ++i) {
    if (!best || better(set.entries[i], *best)) {
      best = &set.entries[i];
      set.selected = i;
    }
  }
  out.best = best->decoded;
  out.best_metric = best->metric;
  return out;
}

}  // namespace pmr
