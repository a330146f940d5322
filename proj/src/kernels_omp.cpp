#include <cmath>

#include "qdspdc/kernels.hpp"

namespace qdspdc::kernels::omp {

cplx trace_product(const MatrixXc& a, const MatrixXc& b) {
  const Eigen::Index n = a.rows();
  double re = 0.0, im = 0.0;
#pragma omp parallel for reduction(+ : re, im) schedule(static)
  for (Eigen::Index j = 0; j < n; ++j) {
    cplx col = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) col += a(i, j) * b(j, i);
    re += col.real();
    im += col.imag();
  }
  return {re, im};
}

Eigen::MatrixXd pair_density(const MatrixXc& ga, const MatrixXc& gb, const PairWeights& w) {
  const Eigen::Index n = ga.rows();
  Eigen::MatrixXd p(n, n);
#pragma omp parallel for schedule(static)
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
  Eigen::VectorXd out(2 * n - 1);
#pragma omp parallel for schedule(dynamic, 16)
  for (Eigen::Index k = 0; k < 2 * n - 1; ++k) {
    const Eigen::Index off = k - (n - 1);
    const Eigen::Index i0 = off >= 0 ? 0 : -off;
    const Eigen::Index i1 = off >= 0 ? n - off : n;
    double acc = 0.0;
    for (Eigen::Index i = i0; i < i1; ++i) acc += m(i, i + off);
    out(k) = acc;
  }
  return out;
}

Eigen::VectorXd convolve_full(const Eigen::VectorXd& y, const Eigen::VectorXd& kernel) {
  const Eigen::Index n = y.size(), m = kernel.size();
  Eigen::VectorXd out(n + m - 1);
#pragma omp parallel for schedule(static)
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
  const auto nt = static_cast<long>(delays.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long t = 0; t < nt; ++t) {
    VectorXc e(n);
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

}  // namespace qdspdc::kernels::omp
