#include <doctest.h>

#include <random>

#include "qdspdc/errors.hpp"
#include "qdspdc/fit.hpp"

using namespace qdspdc;

namespace {

constexpr double kBin = 128.0;

CoincidenceHistogram centred_histogram() { return CoincidenceHistogram(-47.5 * kBin, kBin, 95); }

CoincidenceHistogram sampled(const std::vector<double>& expected, std::uint64_t seed) {
  auto h = centred_histogram();
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < h.size(); ++i) {
    std::poisson_distribution<std::uint64_t> p(std::max(expected[i], 1e-12));
    h.counts[i] = p(rng);
  }
  return h;
}

CoincidenceHistogram exact(const std::vector<double>& expected) {
  auto h = centred_histogram();
  for (std::size_t i = 0; i < h.size(); ++i) h.counts[i] = static_cast<std::uint64_t>(std::llround(expected[i]));
  return h;
}

}  // namespace

TEST_CASE("lifetime fit recovers T1 from a noisy two-sided peak") {
  LifetimeFitOptions opt;
  const auto shape = centred_histogram();
  const auto model = lifetime_model(shape, 240.0, kBin, opt, 20000.0, 328.0, 0.0);
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto f = fit_lifetime(sampled(model, seed), 240.0, kBin, opt);
    CHECK(std::abs(f.t1 - 328.0) < 15.0);
    CHECK(f.sigma_t1 > 0.0);
    CHECK(f.sigma_t1 < 15.0);
    CHECK(f.chi2 / f.ndf < 2.0);
  }
}

TEST_CASE("lifetime model conserves the amplitude") {
  LifetimeFitOptions opt;
  const auto m = lifetime_model(centred_histogram(), 240.0, kBin, opt, 5000.0, 328.0, 0.0);
  double s = 0;
  for (double v : m) s += v;
  CHECK(s == doctest::Approx(5000.0).epsilon(1e-3));
}

TEST_CASE("noise-free data without jitter is fitted exactly") {
  LifetimeFitOptions opt;
  opt.profile = LifetimeProfile::kOneSided;
  opt.kernel = BinKernel::kBox;
  const auto model = lifetime_model(centred_histogram(), 0.0, kBin, opt, 1e7, 328.0, 0.0);
  const auto f = fit_lifetime(exact(model), 0.0, kBin, opt);
  CHECK(f.t1 == doctest::Approx(328.0).epsilon(1e-3));
}

TEST_CASE("separated lobes are recovered") {
  LifetimeFitOptions opt;
  opt.fit_separation = true;
  const auto model = lifetime_model(centred_histogram(), 240.0, kBin, opt, 1e6, 328.0, 0.0, 150.0);
  const auto f = fit_lifetime(exact(model), 240.0, kBin, opt);
  CHECK(f.t1 == doctest::Approx(328.0).epsilon(0.01));
  CHECK(f.separation == doctest::Approx(150.0).epsilon(0.05));
}

TEST_CASE("flat data is not a lifetime") {
  auto h = centred_histogram();
  std::fill(h.counts.begin(), h.counts.end(), 100);
  CHECK_THROWS_AS(fit_lifetime(h, 240.0, kBin), FitError);
}

TEST_CASE("HOM peak fit recovers T2") {
  const ExperimentConfig cfg;
  const auto ctx = HomFitContext::from_config(cfg);
  const auto shape = centred_histogram();
  const double amp = 40000.0;
  auto scaled = [&](Polarization pol, double t2) {
    auto m = hom_peak_model(shape, cfg.t1, t2, 240.0, ctx, pol);
    for (auto& v : m) v *= amp;
    return m;
  };
  const auto perp = sampled(scaled(Polarization::kOrthogonal, 216.0), 4);
  const auto par = sampled(scaled(Polarization::kParallel, 216.0), 5);
  const auto f = fit_hom_peak(perp, par, cfg.t1, 240.0, ctx);
  CHECK(f.interference_detected);
  CHECK(std::abs(f.t2 - 216.0) < 25.0);
  CHECK(f.amplitude == doctest::Approx(amp).epsilon(0.05));  // Neyman weights pull low
  CHECK(f.interference == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("no interference when both polarizations look the same") {
  const ExperimentConfig cfg;
  const auto ctx = HomFitContext::from_config(cfg);
  auto m = hom_peak_model(centred_histogram(), cfg.t1, 216.0, 240.0, ctx, Polarization::kOrthogonal);
  for (auto& v : m) v *= 20000.0;
  const auto f = fit_hom_peak(sampled(m, 6), sampled(m, 7), cfg.t1, 240.0, ctx);
  CHECK(std::abs(f.interference) < 3.0 * f.sigma_interference);
  CHECK_FALSE(f.interference_detected);
  CHECK(std::isnan(f.t2));
}
