#include "qdspdc/simkit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "qdspdc/errors.hpp"

#ifdef QDSPDC_HAVE_OPENMP
#include <omp.h>
#endif

namespace qdspdc {

namespace {

std::vector<double> cumulative(const double* v, std::size_t n, double& total) {
  std::vector<double> cdf(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = v[i];
    if (!(x >= 0.0) || !std::isfinite(x)) throw ValidationError("sampler: density is negative or not finite");
    acc += x;
    cdf[i] = acc;
  }
  total = acc;
  return cdf;
}

std::size_t upper(const std::vector<double>& cdf, double x) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

}  // namespace

GridSampler1D::GridSampler1D(const TimeGrid& grid, const Eigen::VectorXd& density) : grid_(grid) {
  require(static_cast<std::size_t>(density.size()) == grid.n && grid.n > 0, "sampler: density does not match grid");
  cdf_ = cumulative(density.data(), grid.n, total_);
  if (!(total_ > 0.0)) throw ValidationError("sampler: density has no weight");
  total_ *= grid.dt;
}

std::size_t GridSampler1D::locate(double x) const { return upper(cdf_, x); }

PairSampler::PairSampler(const CoincidenceDensity& split, const Eigen::MatrixXd& same_port) : grid_(split.grid()) {
  const std::size_t n = grid_.n;
  require(static_cast<std::size_t>(same_port.rows()) == n && static_cast<std::size_t>(same_port.cols()) == n,
          "pair sampler: densities do not share a grid");
  double ts = 0.0, tq = 0.0;
  split_cdf_ = cumulative(split.values().data(), n * n, ts);
  same_cdf_ = cumulative(same_port.data(), n * n, tq);
  if (!(ts + tq > 0.0)) throw ValidationError("pair sampler: malformed density (no weight)");
  // two ports share the same-port density
  p_split_ = ts / (ts + 2.0 * tq);
  if (ts == 0.0) split_cdf_ = same_cdf_;
  if (tq == 0.0) same_cdf_ = split_cdf_;
}

std::size_t PairSampler::locate(const std::vector<double>& cdf, double x) { return upper(cdf, x); }

TimeGrid simulation_grid(const ExperimentConfig& cfg) {
  const double w = cfg.spdc_filter_shape == FilterShape::kNone
                       ? cfg.spdc_pump_duration
                       : std::max(cfg.spdc_pump_duration, transform_limit(cfg.spdc_filter_fwhm, cfg.spdc_filter_shape));
  const double start = std::min(0.0, cfg.spdc_delay) - 6.0 * w - 200.0;
  const double stop = std::max(10.0 * cfg.t1, cfg.spdc_delay + 6.0 * w) + 200.0;
  return TimeGrid::covering(start, stop, cfg.grid_dt);
}

TemporalAmplitude spdc_wavepacket(const ExperimentConfig& cfg, const TimeGrid& grid) {
  const auto pulse = gaussian_pulse(cfg.spdc_pump_duration, grid, 0.0);
  return apply_filter(pulse, cfg.spdc_filter()).state;
}

namespace {

ExperimentConfig validated(const ExperimentConfig& c) {
  c.validate();
  return c;
}

Eigen::VectorXd abs2(const VectorXc& v) { return v.cwiseAbs2(); }

PairSampler make_pair_sampler(const ExperimentConfig& cfg, const TimeGrid& grid, const TemporalAmplitude& spdc) {
  const auto qd = qd_coherence(cfg.t1, cfg.t2, grid);
  const auto s = TwoTimeCoherence::pure(spdc);
  const auto split = coincidence_density(qd, s, cfg.polarization, 0.0, cfg.reflectivity);
  const auto same = same_port_density(qd, s, cfg.polarization, 0.0, cfg.reflectivity);
  return {split, same};
}

}  // namespace

SimulationModel::SimulationModel(const ExperimentConfig& c)
    : cfg(validated(c)),
      grid(simulation_grid(cfg)),
      spdc_pulse(shift(spdc_wavepacket(cfg, grid), cfg.spdc_delay)),
      qd_only(grid, qd_coherence(cfg.t1, cfg.t2, grid).intensity()),
      spdc_only(grid, abs2(spdc_pulse.samples())),
      pair(make_pair_sampler(cfg, grid, spdc_pulse)) {}

namespace {

using Engine = std::mt19937_64;

Engine stream_engine(std::uint64_t seed, std::uint64_t block, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32), stream};
  return Engine(seq);
}

constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();

// Bernoulli(p) per period, visited by geometric skips.
struct PeriodStream {
  PeriodStream(std::uint64_t seed, std::uint64_t block, std::uint32_t id, double p, std::uint64_t first,
               std::uint64_t last)
      : rng(stream_engine(seed, block, id)), last(last) {
    if (p > 0.0) {
      geo.emplace(std::min(p, 1.0));
      next = first + (*geo)(rng);
      if (next >= last) next = kNever;
    }
  }
  void advance() {
    next = next + 1 + (*geo)(rng);
    if (next >= last) next = kNever;
  }
  Engine rng;
  std::optional<std::geometric_distribution<std::uint64_t>> geo;
  std::uint64_t next = kNever;
  std::uint64_t last;
};

struct Click {
  std::uint8_t channel;
  double t;  // ps within the period
};

class BlockGenerator {
 public:
  BlockGenerator(const SimulationModel& m) : m_(m), cfg_(m.cfg) {
    sigma_ = cfg_.jitter_fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    p_bg_ = cfg_.background_rate * static_cast<double>(cfg_.rep_period) * 1e-12;
    total_ = cfg_.periods();
  }

  void generate(std::uint64_t block, std::vector<TagRecord>& out) const {
    out.clear();
    const std::uint64_t first = block * kPeriodsPerBlock;
    const std::uint64_t last = std::min(total_, first + kPeriodsPerBlock);
    const std::uint64_t seed = cfg_.seed;
    PeriodStream herald(seed, block, 0, cfg_.herald_prob_per_pulse, first, last);
    PeriodStream qd(seed, block, 1, cfg_.unheralded_qd ? cfg_.qd_click_prob : 0.0, first, last);
    std::array<PeriodStream, 3> bg{PeriodStream(seed, block, 2, p_bg_, first, last),
                                   PeriodStream(seed, block, 3, p_bg_, first, last),
                                   PeriodStream(seed, block, 4, p_bg_, first, last)};
    const auto dec = static_cast<std::uint64_t>(cfg_.sync_decimation);
    std::uint64_t sync = ((first + dec - 1) / dec) * dec;
    if (sync >= last) sync = kNever;

    std::normal_distribution<double> jitter(0.0, sigma_);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<Click> clicks;
    while (true) {
      std::uint64_t k = std::min({herald.next, qd.next, bg[0].next, bg[1].next, bg[2].next, sync});
      if (k == kNever) break;
      clicks.clear();
      const bool heralded = herald.next == k;
      if (heralded) {
        heralded_period(herald.rng, jitter, uni, clicks);
        herald.advance();
      }
      if (qd.next == k) {
        // inside a heralded period the QD was already drawn
        if (!heralded) single_photon(qd.rng, jitter, uni, m_.qd_only, 1.0 - cfg_.reflectivity, clicks);
        qd.advance();
      }
      for (std::uint8_t ch = 0; ch < 3; ++ch) {
        if (bg[ch].next != k) continue;
        clicks.push_back({ch, uni(bg[ch].rng) * static_cast<double>(cfg_.rep_period)});
        bg[ch].advance();
      }
      emit(k, clicks, sync == k, out);
      if (sync == k) {
        sync += dec;
        if (sync >= last) sync = kNever;
      }
    }
  }

 private:
  template <class Normal, class Uniform>
  void heralded_period(Engine& rng, Normal& jitter, Uniform& uni, std::vector<Click>& clicks) const {
    clicks.push_back({kHerald, cfg_.herald_offset + jitter(rng)});
    const bool s = uni(rng) < cfg_.spdc_survival;
    const bool q = uni(rng) < cfg_.qd_click_prob;
    const double off = cfg_.emission_offset;
    if (s && q) {
      const PairSample p = m_.pair.sample(rng);
      if (p.same_port) {
        clicks.push_back({static_cast<std::uint8_t>(p.port), off + p.t1 + jitter(rng)});
      } else {
        clicks.push_back({kD1, off + p.t1 + jitter(rng)});
        clicks.push_back({kD2, off + p.t2 + jitter(rng)});
      }
    } else if (s) {
      single_photon(rng, jitter, uni, m_.spdc_only, cfg_.reflectivity, clicks);
    } else if (q) {
      single_photon(rng, jitter, uni, m_.qd_only, 1.0 - cfg_.reflectivity, clicks);
    }
  }

  template <class Normal, class Uniform>
  void single_photon(Engine& rng, Normal& jitter, Uniform& uni, const GridSampler1D& s, double p_d1,
                     std::vector<Click>& clicks) const {
    const double t = s.sample(rng);
    const std::uint8_t ch = uni(rng) < p_d1 ? kD1 : kD2;
    clicks.push_back({ch, cfg_.emission_offset + t + jitter(rng)});
  }

  void emit(std::uint64_t k, std::vector<Click>& clicks, bool sync, std::vector<TagRecord>& out) const {
    const auto rep = cfg_.rep_period;
    const auto bin = cfg_.bin;
    const std::int64_t base = static_cast<std::int64_t>(k) * rep;
    std::array<double, 3> earliest{INFINITY, INFINITY, INFINITY};
    for (const auto& c : clicks) earliest[c.channel] = std::min(earliest[c.channel], c.t);
    TagRecord recs[4];
    int n = 0;
    if (sync) recs[n++] = {kSync, (base / bin) * bin};
    for (std::uint8_t ch = 0; ch < 3; ++ch) {
      if (!std::isfinite(earliest[ch])) continue;
      const double t = std::clamp(earliest[ch], 0.0, static_cast<double>(rep) - 1e-6);
      const auto abs = base + static_cast<std::int64_t>(std::floor(t));
      recs[n++] = {ch, (abs / bin) * bin};
    }
    std::sort(recs, recs + n, [](const TagRecord& a, const TagRecord& b) {
      return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.channel < b.channel;
    });
    out.insert(out.end(), recs, recs + n);
  }

  const SimulationModel& m_;
  const ExperimentConfig& cfg_;
  double sigma_ = 0.0, p_bg_ = 0.0;
  std::uint64_t total_ = 0;
};

}  // namespace

void simulate_run(const SimulationModel& model, TagSink& sink, const SimulationOptions& opt) {
  const auto& cfg = model.cfg;
  sink.begin({cfg.rep_period, cfg.bin});
  const BlockGenerator gen(model);
  const std::uint64_t nblocks = (cfg.periods() + kPeriodsPerBlock - 1) / kPeriodsPerBlock;
  const std::uint64_t round = std::max<std::uint64_t>(1, opt.blocks_per_round);
  std::vector<std::vector<TagRecord>> bufs(round);
  for (std::uint64_t b0 = 0; b0 < nblocks; b0 += round) {
    const auto nb = static_cast<long>(std::min(round, nblocks - b0));
    if (opt.threads == 1) {
      for (long i = 0; i < nb; ++i) gen.generate(b0 + static_cast<std::uint64_t>(i), bufs[static_cast<std::size_t>(i)]);
    } else {
#ifdef QDSPDC_HAVE_OPENMP
      const int nt = opt.threads > 0 ? opt.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
#endif
      for (long i = 0; i < nb; ++i) gen.generate(b0 + static_cast<std::uint64_t>(i), bufs[static_cast<std::size_t>(i)]);
    }
    for (long i = 0; i < nb; ++i) {
      const auto& v = bufs[static_cast<std::size_t>(i)];
      if (!v.empty()) sink.consume(v.data(), v.size());
    }
  }
  sink.end();
}

void simulate_run(const ExperimentConfig& cfg, TagSink& sink, const SimulationOptions& opt) {
  const SimulationModel model(cfg);
  simulate_run(model, sink, opt);
}

std::vector<TagRecord> simulate_to_vector(const ExperimentConfig& cfg, const SimulationOptions& opt) {
  VectorSink sink;
  simulate_run(cfg, sink, opt);
  return std::move(sink.records);
}

}  // namespace qdspdc
