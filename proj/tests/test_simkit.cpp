#include <doctest.h>

#include <algorithm>
#include <random>

#include "qdspdc/errors.hpp"
#include "qdspdc/simkit.hpp"
#include "qdspdc/tagproc.hpp"

using namespace qdspdc;

namespace {

ExperimentConfig small(double duration, Polarization pol = Polarization::kOrthogonal) {
  ExperimentConfig c;
  c.duration = duration;
  c.polarization = pol;
  c.seed = 11;
  return c;
}

std::uint64_t count(const std::vector<TagRecord>& v, std::uint8_t ch) {
  return static_cast<std::uint64_t>(std::count_if(v.begin(), v.end(), [&](const TagRecord& r) { return r.channel == ch; }));
}

bool within(double observed, double expected, double sigma, double k = 4.0) {
  return std::abs(observed - expected) <= k * sigma;
}

}  // namespace

TEST_CASE("simulation is reproducible and independent of the work split") {
  const auto cfg = small(0.15);
  SimulationOptions serial;
  serial.threads = 1;
  SimulationOptions omp;
  omp.threads = 0;
  omp.blocks_per_round = 3;
  const auto a = simulate_to_vector(cfg, serial);
  const auto b = simulate_to_vector(cfg, omp);
  REQUIRE(!a.empty());
  CHECK(a == b);
  auto other = cfg;
  other.seed = 12;
  CHECK(simulate_to_vector(other) != a);
}

TEST_CASE("simulated stream is time ordered and bin quantized") {
  const auto cfg = small(0.05);
  const auto v = simulate_to_vector(cfg);
  bool sorted = true, quantized = true;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0 && v[i].timestamp < v[i - 1].timestamp) sorted = false;
    if (v[i].timestamp % cfg.bin != 0) quantized = false;
  }
  CHECK(sorted);
  CHECK(quantized);
  CHECK(count(v, kSync) == (cfg.periods() + cfg.sync_decimation - 1) / cfg.sync_decimation);
}

TEST_CASE("herald counts scale with the duration") {
  for (double d : {0.05, 0.1}) {
    const auto cfg = small(d);
    const auto v = simulate_to_vector(cfg);
    const double n = static_cast<double>(cfg.periods());
    const double p = cfg.herald_prob_per_pulse;
    CHECK(within(static_cast<double>(count(v, kHerald)), n * p, std::sqrt(n * p * (1 - p))));
  }
}

TEST_CASE("doubles and triples follow the per-period probabilities") {
  auto cfg = small(0.6);
  cfg.unheralded_qd = false;
  const SimulationModel model(cfg);
  RunAccumulator acc;
  simulate_run(model, acc);
  const auto& st = acc.stats();
  const double h = static_cast<double>(st.heralds);
  const double s = cfg.spdc_survival, q = cfg.qd_click_prob;
  const double p_triple = s * q * model.pair.split_probability();
  CHECK(model.pair.split_probability() == doctest::Approx(0.5).epsilon(0.02));
  CHECK(within(static_cast<double>(st.triples), h * p_triple, std::sqrt(h * p_triple)));
  const double p_double = s + q - s * q - p_triple;
  const double doubles = static_cast<double>(st.doubles_d1 + st.doubles_d2);
  CHECK(within(doubles, h * p_double, std::sqrt(h * p_double)));
}

TEST_CASE("parallel polarization suppresses splitting") {
  const SimulationModel perp(small(0.01));
  const SimulationModel par(small(0.01, Polarization::kParallel));
  CHECK(par.pair.split_probability() < perp.pair.split_probability());
  CHECK(par.pair.split_probability() > 0.2);
}

TEST_CASE("without QD photons there is no central peak") {
  auto cfg = small(0.3);
  cfg.qd_click_prob = 0.0;
  cfg.spdc_survival = 0.2;
  RunAccumulator acc;
  simulate_run(cfg, acc);
  CHECK(acc.stats().triples == 0);
  CHECK(acc.pseudo().peaks.central() == 0.0);
  CHECK(acc.pseudo().peaks.side_mean() > 0.0);
}

TEST_CASE("grid sampler reproduces its density (Kolmogorov-Smirnov)") {
  const auto cfg = small(1.0);
  const auto grid = simulation_grid(cfg);
  const Eigen::VectorXd dens = qd_coherence(cfg.t1, cfg.t2, grid).intensity();
  const GridSampler1D sampler(grid, dens);
  std::mt19937_64 rng(5);
  const int n = 200000;
  std::vector<double> x(n);
  for (auto& v : x) v = sampler.sample(rng);
  std::sort(x.begin(), x.end());
  // piecewise-linear CDF of the cell-uniform density
  std::vector<double> cdf(grid.n + 1, 0.0);
  for (std::size_t i = 0; i < grid.n; ++i) cdf[i + 1] = cdf[i] + dens(static_cast<Eigen::Index>(i));
  auto model_cdf = [&](double t) {
    const double u = (t - (grid.t0 - 0.5 * grid.dt)) / grid.dt;
    if (u <= 0) return 0.0;
    if (u >= static_cast<double>(grid.n)) return 1.0;
    const auto i = static_cast<std::size_t>(u);
    return (cdf[i] + (u - static_cast<double>(i)) * (cdf[i + 1] - cdf[i])) / cdf.back();
  };
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f = model_cdf(x[static_cast<std::size_t>(i)]);
    d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(f - static_cast<double>(i + 1) / n)});
  }
  CHECK(d < 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("sampler rejects malformed densities") {
  const auto grid = TimeGrid::covering(0.0, 10.0, 1.0);
  CHECK_THROWS_AS(GridSampler1D(grid, Eigen::VectorXd::Zero(10)), ValidationError);
  Eigen::VectorXd neg = Eigen::VectorXd::Ones(10);
  neg(3) = -1.0;
  CHECK_THROWS_AS(GridSampler1D(grid, neg), ValidationError);
  CHECK_THROWS_AS(GridSampler1D(grid, Eigen::VectorXd::Ones(9)), ValidationError);
}
