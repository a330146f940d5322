#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qdspdc/coherence.hpp"
#include "qdspdc/errors.hpp"

using namespace qdspdc;

namespace {

// Closed-form QD coherence, evaluated independently of the library.
double qd_g(double t, double s, double t1, double t2) {
  if (t < 0 || s < 0) return 0.0;
  const double gd = 1.0 / t2 - 1.0 / (2.0 * t1);
  return std::exp(-(t + s) / (2.0 * t1) - gd * std::abs(t - s)) / t1;
}

double intensity_fwhm_of(const TemporalAmplitude& a) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < a.grid().n; ++i) {
    x.push_back(a.grid().at(i));
    y.push_back(std::norm(a.samples()(static_cast<Eigen::Index>(i))));
  }
  return sampled_fwhm(x, y);
}

}  // namespace

TEST_CASE("transform limit of a 30 GHz gaussian filter") {
  CHECK(transform_limit(30.0, FilterShape::kGaussian) == doctest::Approx(14.7).epsilon(0.01));
  CHECK(transform_limit(60.0, FilterShape::kGaussian) == doctest::Approx(7.35).epsilon(0.01));
  CHECK_THROWS_AS(transform_limit(0.0, FilterShape::kRect), ValidationError);
}

TEST_CASE("transform limits match the numerical impulse responses") {
  for (auto [shape, fwhm, dt] : {std::tuple{FilterShape::kRect, 7.7, 1.0}, std::tuple{FilterShape::kGaussian, 30.0, 0.25}}) {
    const auto grid = TimeGrid::covering(-6000.0, 6000.0, dt);
    const auto h = filter_amplitude_response(SpectralFilter(shape, fwhm), grid);
    CHECK(intensity_fwhm_of(h) == doctest::Approx(transform_limit(fwhm, shape)).epsilon(0.01));
  }
  CHECK(transform_limit(7.7, FilterShape::kRect) == doctest::Approx(115.0).epsilon(0.01));
}

TEST_CASE("lorentzian response is a causal exponential") {
  const double f = 2.0;
  const auto grid = TimeGrid::covering(-3000.0, 3000.0, 0.5);
  const auto h = filter_amplitude_response(SpectralFilter(FilterShape::kLorentzian, f), grid);
  double before = 0, after = 0;
  for (std::size_t i = 0; i < grid.n; ++i) (grid.at(i) < -20 ? before : after) += std::norm(h.samples()(i));
  CHECK(before / after < 1e-2);
  // intensity ratio over 100 ps after the onset
  auto at = [&](double t) { return std::norm(h.samples()(static_cast<Eigen::Index>((t - grid.t0) / grid.dt))); };
  const double decay = 1.0 / (2.0 * kPi * f * kGhzPs);
  CHECK(transform_limit(f, FilterShape::kLorentzian) == doctest::Approx(std::log(2.0) * decay).epsilon(1e-9));
  CHECK(std::log(at(100.25) / at(200.25)) == doctest::Approx(100.0 / decay).epsilon(0.01));
}

TEST_CASE("QD coherence: pure limit and lifetime diagonal") {
  const auto grid = TimeGrid::covering(0.0, 4000.0, 4.0);
  const auto pure = qd_coherence(328.0, 656.0, grid);
  CHECK(purity(pure) == doctest::Approx(1.0).epsilon(1e-6));
  const auto g = qd_coherence(328.0, 216.0, grid);
  const auto d = g.intensity();
  CHECK(std::log(d(10) / d(92)) == doctest::Approx(82 * 4.0 / 328.0).epsilon(1e-6));
  const auto [lo, hi] = g.eigen_range();
  CHECK(lo > -1e-9);
  CHECK(hi <= 1.0 + 1e-9);
  CHECK_THROWS_AS(qd_coherence(328.0, 700.0, grid), ValidationError);
  CHECK_THROWS_AS(qd_coherence(328.0, 216.0, TimeGrid::covering(0.0, 1000.0, 4.0)), ValidationError);
}

TEST_CASE("QD purity equals T2/(2 T1), checked by an independent double integral") {
  const double t1 = 328.0, t2 = 216.0;
  const auto grid = TimeGrid::covering(0.0, 12.0 * t1, 1.0);
  const double p = purity(qd_coherence(t1, t2, grid));
  CHECK(p == doctest::Approx(t2 / (2.0 * t1)).epsilon(1e-3));
  CHECK(std::abs(p - 0.3293) < 1e-3);

  // adaptive quadrature of int int |G(t,s)|^2 over t, s > 0
  using boost::math::quadrature::gauss_kronrod;
  auto inner = [&](double t) {
    auto f = [&](double s) { return std::pow(qd_g(t, s, t1, t2), 2); };
    return gauss_kronrod<double, 31>::integrate(f, 0.0, t, 12, 1e-10) +
           gauss_kronrod<double, 31>::integrate(f, t, 40.0 * t1, 12, 1e-10);
  };
  const double oracle = gauss_kronrod<double, 31>::integrate(inner, 0.0, 40.0 * t1, 12, 1e-9);
  CHECK(oracle == doctest::Approx(t2 / (2.0 * t1)).epsilon(1e-6));
  CHECK(p == doctest::Approx(oracle).epsilon(1e-3));
}

TEST_CASE("purity of pure states and mixtures") {
  const auto grid = TimeGrid::covering(-500.0, 500.0, 1.0);
  const auto a = gaussian_pulse(20.0, grid, -200.0);
  const auto b = gaussian_pulse(20.0, grid, 200.0);
  CHECK(purity(TwoTimeCoherence::pure(a)) == doctest::Approx(1.0).epsilon(1e-9));
  const MatrixXc mix = 0.5 * (TwoTimeCoherence::pure(a).values() + TwoTimeCoherence::pure(b).values());
  CHECK(purity(TwoTimeCoherence(grid, mix)) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("spectrum round trip and Parseval") {
  const auto grid = TimeGrid::covering(-400.0, 400.0, 1.0);
  const auto a = gaussian_pulse(25.0, grid, 30.0);
  const VectorXc s = to_spectrum(a.samples(), grid);
  const VectorXc back = from_spectrum(s, grid);
  CHECK((back - a.samples()).cwiseAbs().maxCoeff() < 1e-12);
  const double dnu = 1.0 / (static_cast<double>(grid.n) * grid.dt);  // in 1/ps
  CHECK(s.squaredNorm() * dnu == doctest::Approx(a.samples().squaredNorm() * grid.dt).epsilon(1e-9));
}

TEST_CASE("filter limits") {
  const auto grid = TimeGrid::covering(-1000.0, 1000.0, 1.0);
  const auto a = gaussian_pulse(10.0, grid);
  const auto wide = apply_filter(a, SpectralFilter(FilterShape::kGaussian, 1e6));
  CHECK(wide.transmitted_fraction == doctest::Approx(1.0).epsilon(1e-6));
  CHECK((wide.state.samples() - a.samples()).cwiseAbs().maxCoeff() < 1e-6);
  const auto none = apply_filter(a, SpectralFilter::none());
  CHECK(none.transmitted_fraction == 1.0);
  CHECK_THROWS_AS(apply_filter(a, SpectralFilter(FilterShape::kRect, 1.0, 450.0)), PhotonRejected);
}

TEST_CASE("gaussian pulse through a gaussian filter: analytic transmission") {
  const auto grid = TimeGrid::covering(-2000.0, 2000.0, 1.0);
  const double tau = 10.0, f = 30.0;
  const double dp = 2.0 * std::log(2.0) / kPi / (tau * kGhzPs);  // spectral intensity FWHM
  const auto r = apply_filter(gaussian_pulse(tau, grid), SpectralFilter(FilterShape::kGaussian, f));
  CHECK(r.transmitted_fraction == doctest::Approx(f / std::sqrt(f * f + dp * dp)).epsilon(1e-4));
}

TEST_CASE("lorentzian line through a centred rect: frequency-domain quadrature") {
  // lifetime-limited line of FWHM g: |psi~(nu)|^2 = (g / 2 pi) / (nu^2 + g^2 / 4)
  const double g = 1.2, f = 7.7;
  const double t1 = 1.0 / (2.0 * kPi * g * kGhzPs);
  const auto grid = TimeGrid::covering(-2000.0, 30.0 * t1 + 2000.0, 0.5);
  VectorXc psi(static_cast<Eigen::Index>(grid.n));
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double t = grid.at(i);
    psi(static_cast<Eigen::Index>(i)) = t < 0 ? 0.0 : std::exp(-t / (2.0 * t1));
  }
  const auto r = apply_filter(TemporalAmplitude(grid, psi, false), SpectralFilter(FilterShape::kRect, f));
  auto lor = [&](double nu) { return (g / (2.0 * kPi)) / (nu * nu + 0.25 * g * g); };
  const double oracle = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(lor, -f / 2, f / 2, 15, 1e-12);
  CHECK(r.transmitted_fraction == doctest::Approx(oracle).epsilon(2e-3));
}

TEST_CASE("filtering a coherence matches filtering its pure amplitude") {
  const auto grid = TimeGrid::covering(-300.0, 300.0, 1.0);
  const auto a = gaussian_pulse(8.0, grid);
  const SpectralFilter f(FilterShape::kRect, 40.0);
  const auto fa = apply_filter(a, f);
  const auto fg = apply_filter(TwoTimeCoherence::pure(a), f);
  CHECK(fg.transmitted_fraction == doctest::Approx(fa.transmitted_fraction).epsilon(1e-9));
  CHECK(purity(fg.state) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("filter shape parsing") {
  CHECK(parse_filter_shape("rect") == FilterShape::kRect);
  CHECK(parse_filter_shape("gaussian") == FilterShape::kGaussian);
  CHECK(parse_filter_shape("lorentzian") == FilterShape::kLorentzian);
  CHECK(to_string(FilterShape::kRect) == "rect");
  CHECK_THROWS_AS(parse_filter_shape("triangle"), ValidationError);
}

TEST_CASE("span check on temporal amplitudes") {
  const auto grid = TimeGrid::covering(-50.0, 50.0, 1.0);
  VectorXc v = VectorXc::Ones(static_cast<Eigen::Index>(grid.n));
  CHECK_THROWS_AS(TemporalAmplitude(grid, v), ValidationError);
  CHECK_NOTHROW(TemporalAmplitude(grid, v, false));
}
