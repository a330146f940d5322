#include <doctest.h>

#include <random>

#include "qdspdc/grid.hpp"
#include "qdspdc/kernels.hpp"

using namespace qdspdc;

namespace {

MatrixXc random_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  MatrixXc m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

MatrixXc random_hermitian(int n, std::mt19937_64& rng) {
  const MatrixXc a = random_matrix(n, rng);
  return (a + a.adjoint()) * 0.5;
}

}  // namespace

TEST_CASE("time grid covering uses midpoints") {
  const auto g = TimeGrid::covering(-10.0, 10.0, 2.0);
  CHECK(g.n == 10);
  CHECK(g.at(0) == doctest::Approx(-9.0));
  CHECK(g.end() == doctest::Approx(11.0));
  CHECK(g.dft_frequency(0) == 0.0);
  CHECK(g.dft_frequency(1) == doctest::Approx(1.0 / (10 * 2.0) * 1e3));
  CHECK(g.dft_frequency(9) == doctest::Approx(-1.0 / (10 * 2.0) * 1e3));
}

TEST_CASE("symmetric frequency grid is odd and centred") {
  const auto f = FrequencyGrid::symmetric(50.0, 1.0);
  CHECK(f.n % 2 == 1);
  CHECK(f.at(f.n / 2) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(f.at(0) == doctest::Approx(-f.at(f.n - 1)));
}

TEST_CASE("sampled fwhm of a gaussian") {
  std::vector<double> x, y;
  const double sigma = 3.0;
  for (int i = -200; i <= 200; ++i) {
    x.push_back(0.1 * i);
    y.push_back(std::exp(-0.5 * std::pow(0.1 * i / sigma, 2)));
  }
  CHECK(sampled_fwhm(x, y) == doctest::Approx(2.0 * std::sqrt(2.0 * std::log(2.0)) * sigma).epsilon(1e-3));
  CHECK(sampled_fwhm(x, std::vector<double>(x.size(), 0.0)) == 0.0);
}

TEST_CASE("trace product against the dense product") {
  std::mt19937_64 rng(7);
  const auto a = random_matrix(37, rng), b = random_matrix(37, rng);
  const cplx ref = (a * b).trace();
  CHECK(std::abs(kernels::serial::trace_product(a, b) - ref) < 1e-9 * std::abs(ref) + 1e-9);
  CHECK(std::abs(kernels::omp::trace_product(a, b) - ref) < 1e-9 * std::abs(ref) + 1e-9);
}

TEST_CASE("serial and OpenMP kernels agree") {
  std::mt19937_64 rng(11);
  const int n = 53;
  const auto ga = random_hermitian(n, rng), gb = random_hermitian(n, rng);
  const kernels::PairWeights w{0.3, 0.2, -0.4};

  const auto ps = kernels::serial::pair_density(ga, gb, w);
  const auto po = kernels::omp::pair_density(ga, gb, w);
  CHECK((ps - po).cwiseAbs().maxCoeff() < 1e-12);

  // direct evaluation of one element
  const int i = 5, j = 17;
  const double ref = w.direct * ga(i, i).real() * gb(j, j).real() + w.swapped * ga(j, j).real() * gb(i, i).real() +
                     w.cross * (ga(i, j) * gb(j, i)).real();
  CHECK(ps(i, j) == doctest::Approx(ref));

  const auto ds = kernels::serial::diagonal_sums(ps);
  const auto dom = kernels::omp::diagonal_sums(ps);
  CHECK(ds.size() == 2 * n - 1);
  CHECK((ds - dom).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(ds.sum() == doctest::Approx(ps.sum()));
  CHECK(ds(n - 1) == doctest::Approx(ps.diagonal().sum()));
  CHECK(ds(n) == doctest::Approx(ps.diagonal(1).sum()));

  Eigen::VectorXd y = Eigen::VectorXd::Random(101), k = Eigen::VectorXd::Random(13);
  const auto cs = kernels::serial::convolve_full(y, k);
  const auto co = kernels::omp::convolve_full(y, k);
  CHECK(cs.size() == 113);
  CHECK((cs - co).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(cs.sum() == doctest::Approx(y.sum() * k.sum()));

  const auto f = random_matrix(31, rng);
  Eigen::VectorXd pw = Eigen::VectorXd::Ones(31), nu(31);
  for (int c = 0; c < 31; ++c) nu(c) = c - 15.0;
  const std::vector<double> delays{-3.0, 0.0, 1.5, 40.0};
  const auto xs = kernels::serial::dip_cross_terms(f, pw, nu, delays);
  const auto xo = kernels::omp::dip_cross_terms(f, pw, nu, delays);
  for (std::size_t q = 0; q < delays.size(); ++q) {
    CHECK(xs[q] == doctest::Approx(xo[q]).epsilon(1e-10));
    cplx acc = 0;
    for (int c = 0; c < 31; ++c)
      for (int d = 0; d < 31; ++d)
        acc += f(c, d) * std::conj(f(d, c)) * std::exp(cplx(0, 2 * kPi * (nu(c) - nu(d)) * delays[q] * kGhzPs));
    CHECK(xs[q] == doctest::Approx(acc.real()).epsilon(1e-9));
  }
}

TEST_CASE("backend switch") {
  const auto before = kernels::default_backend();
  kernels::set_default_backend(kernels::Backend::kSerial);
  CHECK(kernels::default_backend() == kernels::Backend::kSerial);
  std::mt19937_64 rng(3);
  const auto a = random_matrix(20, rng), b = random_matrix(20, rng);
  const cplx s = kernels::trace_product(a, b);
  kernels::set_default_backend(kernels::Backend::kOpenMP);
  CHECK(std::abs(kernels::trace_product(a, b) - s) < 1e-10);
  kernels::set_default_backend(before);
}
