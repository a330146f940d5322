#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "qdspdc/config.hpp"
#include "qdspdc/errors.hpp"
#include "qdspdc/fit.hpp"
#include "qdspdc/hom.hpp"

using namespace qdspdc;

namespace {

// Tr(rho_a rho_b) from the spectral decomposition of rho_a.
double trace_product_by_eigen(const TwoTimeCoherence& a, const TwoTimeCoherence& b) {
  const double dt = a.grid().dt;
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(a.values() * dt);
  const MatrixXc rb = b.values() * dt;
  double s = 0.0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const VectorXc u = es.eigenvectors().col(k);
    s += es.eigenvalues()(k) * (u.adjoint() * rb * u)(0, 0).real();
  }
  return s;
}

Eigen::Index nearest(const TauDensity& d, double tau) {
  return static_cast<Eigen::Index>(std::lround((tau - d.tau0) / d.dtau));
}

}  // namespace

TEST_CASE("distinguishable photons split half the time") {
  const auto grid = TimeGrid::covering(-300.0, 300.0, 2.0);
  const auto a = TwoTimeCoherence::pure(gaussian_pulse(20.0, grid));
  const auto c = coincidence_density(a, a, Polarization::kOrthogonal);
  CHECK(c.total() == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(c.tau_marginal().total() == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("identical pure photons never split") {
  const auto grid = TimeGrid::covering(-300.0, 300.0, 2.0);
  const auto a = TwoTimeCoherence::pure(gaussian_pulse(20.0, grid));
  CHECK(coincidence_density(a, a, Polarization::kParallel).total() < 1e-9);
  CHECK(coalescence_probability(a, a) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("delayed photons are distinguishable") {
  const auto grid = TimeGrid::covering(-600.0, 600.0, 2.0);
  const auto a = TwoTimeCoherence::pure(gaussian_pulse(20.0, grid));
  const auto c = coincidence_density(a, a, Polarization::kParallel, 300.0);
  CHECK(c.total() == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("probability is conserved between split and bunched outcomes") {
  const auto grid = TimeGrid::covering(0.0, 3000.0, 6.0);
  const auto qd = qd_coherence(328.0, 216.0, grid);
  const auto spdc = TwoTimeCoherence::pure(gaussian_pulse(60.0, grid, 400.0));
  for (auto pol : {Polarization::kParallel, Polarization::kOrthogonal}) {
    const double split = coincidence_density(qd, spdc, pol).total();
    const double same = same_port_density(qd, spdc, pol).sum() * grid.dt * grid.dt;
    CHECK(split + 2.0 * same == doctest::Approx(1.0).epsilon(1e-6));
  }
  const double p = coalescence_probability(qd, spdc);
  CHECK(coincidence_density(qd, spdc, Polarization::kParallel).total() == doctest::Approx(0.5 * (1.0 - p)).epsilon(1e-6));
}

TEST_CASE("coalescence equals Tr(rho_a rho_b) from an eigendecomposition") {
  const auto grid = TimeGrid::covering(0.0, 3000.0, 8.0);
  const auto qd = qd_coherence(328.0, 216.0, grid);
  const auto spdc = TwoTimeCoherence::pure(gaussian_pulse(80.0, grid, 300.0));
  CHECK(coalescence_probability(qd, spdc) == doctest::Approx(trace_product_by_eigen(qd, spdc)).epsilon(1e-8));
  CHECK(coalescence_probability(qd, qd) == doctest::Approx(trace_product_by_eigen(qd, qd)).epsilon(1e-8));
}

TEST_CASE("two independent QD photons coalesce with probability T2/(2 T1)") {
  const auto grid = TimeGrid::covering(0.0, 4000.0, 2.0);
  const auto qd = qd_coherence(328.0, 216.0, grid);
  CHECK(coalescence_probability(qd, qd) == doctest::Approx(216.0 / 656.0).epsilon(3e-3));
}

TEST_CASE("maximum coalescence: identical lifetime-limited photons and dephasing") {
  const double lw = 1.2;
  const double t1 = lifetime_from_linewidth(lw);
  const auto grid = TimeGrid::covering(-500.0, 14.0 * t1, 2.0);
  const auto psi = qd_pure_amplitude(lw, grid);
  const auto m = max_theoretical_coalescence(lw, SpectralFilter::none(), psi);
  CHECK(m.value == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(std::abs(m.delay) < 4.0);
  const auto d = max_theoretical_coalescence(lw, SpectralFilter::none(), psi, Dephasing{t1, 0.5 * t1});
  // <psi|rho|psi> = 1 / (1/2 + T1/T2) for an exponential against its dephased twin
  CHECK(d.value == doctest::Approx(1.0 / (0.5 + 2.0)).epsilon(5e-3));
}

TEST_CASE("gaussian smear conserves area") {
  TauDensity d;
  d.tau0 = -100.0;
  d.dtau = 2.0;
  d.values = Eigen::VectorXd::Zero(101);
  d.values(20) = 1.0;
  d.values(70) = 3.0;
  const auto s = gaussian_smear(d, 240.0);
  CHECK(s.total() == doctest::Approx(d.total()).epsilon(1e-12));
  CHECK(gaussian_smear(d, 0.0).values == d.values);
  CHECK_THROWS_AS(gaussian_smear(d, -1.0), ValidationError);
}

TEST_CASE("box binning integrates the density") {
  TauDensity d;
  d.tau0 = -500.0;
  d.dtau = 1.0;
  d.values = Eigen::VectorXd::Constant(1001, 0.001);
  const auto c = smear_with_detector(d, 0.0, 100.0, {-200.0, 0.0, 200.0}, BinKernel::kBox);
  for (double v : c.values) CHECK(v == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("parallel peak is flattened: a dip at zero that jitter washes out") {
  const ExperimentConfig cfg;
  const auto ctx = HomFitContext::from_config(cfg);
  const auto par = hom_peak_density(cfg.t1, cfg.t2, ctx.spdc, ctx.delay, Polarization::kParallel);
  const auto perp = hom_peak_density(cfg.t1, cfg.t2, ctx.spdc, ctx.delay, Polarization::kOrthogonal);
  CHECK(par.total() < perp.total());

  const auto k = nearest(par, 0.0);
  CHECK(par.values(k) < par.values(k - 1));
  CHECK(par.values(k) < par.values(k + 1));

  const auto s = gaussian_smear(par, 240.0);
  const auto j = nearest(s, 0.0);
  // relative depth of the dip against the shoulders at +-128 ps
  auto depth = [](const TauDensity& d, Eigen::Index c, Eigen::Index w) {
    return 1.0 - d.values(c) / (0.5 * (d.values(c - w) + d.values(c + w)));
  };
  const auto w = static_cast<Eigen::Index>(128.0 / par.dtau);
  CHECK(depth(s, j, w) < 0.5 * depth(par, k, w));
  CHECK(s.total() == doctest::Approx(par.total()).epsilon(1e-9));
}
