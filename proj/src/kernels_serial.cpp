#include <atomic>
#include <cmath>

#include "qdspdc/kernels.hpp"

namespace qdspdc::kernels {

namespace {
std::atomic<Backend> g_backend{openmp_available() ? Backend::kOpenMP : Backend::kSerial};
}

Backend default_backend() { return g_backend.load(); }
void set_default_backend(Backend b) { g_backend.store(b); }

bool openmp_available() {
#ifdef QDSPDC_HAVE_OPENMP
  return true;
#else
  return false;
#endif
}

namespace serial {

cplx trace_product(const MatrixXc& a, const MatrixXc& b) {
  const Eigen::Index n = a.rows();
  cplx acc = 0.0;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) acc += a(i, j) * b(j, i);
  return acc;
}

Eigen::MatrixXd pair_density(const MatrixXc& ga, const MatrixXc& gb, const PairWeights& w) {
  const Eigen::Index n = ga.rows();
  Eigen::MatrixXd p(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double iaj = ga(j, j).real(), ibj = gb(j, j).real();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double direct = ga(i, i).real() * ibj;
      const double swapped = iaj * gb(i, i).real();
      p(i, j) = w.direct * direct + w.swapped * swapped + w.cross * (ga(i, j) * gb(j, i)).real();
    }
  }
  return p;
}

Eigen::VectorXd diagonal_sums(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * n - 1);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) out(j - i + n - 1) += m(i, j);
  return out;
}

Eigen::VectorXd convolve_full(const Eigen::VectorXd& y, const Eigen::VectorXd& kernel) {
  const Eigen::Index n = y.size(), m = kernel.size();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n + m - 1);
  for (Eigen::Index k = 0; k < n + m - 1; ++k) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, k - m + 1), hi = std::min(k, n - 1);
    double acc = 0.0;
    for (Eigen::Index i = lo; i <= hi; ++i) acc += y(i) * kernel(k - i);
    out(k) = acc;
  }
  return out;
}

std::vector<double> dip_cross_terms(const MatrixXc& f, const Eigen::VectorXd& port_weight,
                                    const Eigen::VectorXd& nu, const std::vector<double>& delays) {
  const Eigen::Index n = f.rows();
  const MatrixXc m = f.cwiseProduct(f.transpose().conjugate());
  std::vector<double> out(delays.size());
  VectorXc e(n);
  for (std::size_t t = 0; t < delays.size(); ++t) {
    for (Eigen::Index c = 0; c < n; ++c) e(c) = std::polar(1.0, 2 * kPi * nu(c) * delays[t] * kGhzPs);
    double acc = 0.0;
    for (Eigen::Index d = 0; d < n; ++d) {
      if (port_weight(d) == 0.0) continue;
      cplx inner = 0.0;
      for (Eigen::Index c = 0; c < n; ++c) inner += m(c, d) * e(c);
      acc += port_weight(d) * (inner * std::conj(e(d))).real();
    }
    out[t] = acc;
  }
  return out;
}

}  // namespace serial

cplx trace_product(const MatrixXc& a, const MatrixXc& b) {
  return default_backend() == Backend::kOpenMP ? omp::trace_product(a, b) : serial::trace_product(a, b);
}
Eigen::MatrixXd pair_density(const MatrixXc& ga, const MatrixXc& gb, const PairWeights& w) {
  return default_backend() == Backend::kOpenMP ? omp::pair_density(ga, gb, w) : serial::pair_density(ga, gb, w);
}
Eigen::VectorXd diagonal_sums(const Eigen::MatrixXd& m) {
  return default_backend() == Backend::kOpenMP ? omp::diagonal_sums(m) : serial::diagonal_sums(m);
}
Eigen::VectorXd convolve_full(const Eigen::VectorXd& y, const Eigen::VectorXd& kernel) {
  return default_backend() == Backend::kOpenMP ? omp::convolve_full(y, kernel) : serial::convolve_full(y, kernel);
}
std::vector<double> dip_cross_terms(const MatrixXc& f, const Eigen::VectorXd& port_weight,
                                    const Eigen::VectorXd& nu, const std::vector<double>& delays) {
  return default_backend() == Backend::kOpenMP ? omp::dip_cross_terms(f, port_weight, nu, delays)
                                               : serial::dip_cross_terms(f, port_weight, nu, delays);
}

}  // namespace qdspdc::kernels
