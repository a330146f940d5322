#pragma once

#include <vector>

#include "qdspdc/grid.hpp"

// Data-parallel hot loops. Every kernel has a plain serial reference and an
// OpenMP version; both must agree to rounding.
namespace qdspdc::kernels {

enum class Backend { kSerial, kOpenMP };

Backend default_backend();
void set_default_backend(Backend b);
bool openmp_available();

// Weights of the generic two-photon density
//   p(i,j) = direct * Ia(i) Ib(j) + swapped * Ia(j) Ib(i) + cross * Re[Ga(i,j) Gb(j,i)]
struct PairWeights {
  double direct = 0.25;
  double swapped = 0.25;
  double cross = -0.5;
};

namespace serial {
cplx trace_product(const MatrixXc& a, const MatrixXc& b);
Eigen::MatrixXd pair_density(const MatrixXc& ga, const MatrixXc& gb, const PairWeights& w);
Eigen::VectorXd diagonal_sums(const Eigen::MatrixXd& m);
Eigen::VectorXd convolve_full(const Eigen::VectorXd& y, const Eigen::VectorXd& kernel);
std::vector<double> dip_cross_terms(const MatrixXc& f, const Eigen::VectorXd& port_weight,
                                    const Eigen::VectorXd& nu, const std::vector<double>& delays);
}  // namespace serial

namespace omp {
cplx trace_product(const MatrixXc& a, const MatrixXc& b);
Eigen::MatrixXd pair_density(const MatrixXc& ga, const MatrixXc& gb, const PairWeights& w);
Eigen::VectorXd diagonal_sums(const Eigen::MatrixXd& m);
Eigen::VectorXd convolve_full(const Eigen::VectorXd& y, const Eigen::VectorXd& kernel);
std::vector<double> dip_cross_terms(const MatrixXc& f, const Eigen::VectorXd& port_weight,
                                    const Eigen::VectorXd& nu, const std::vector<double>& delays);
}  // namespace omp

// Sum_ij a(i,j) b(j,i).
cplx trace_product(const MatrixXc& a, const MatrixXc& b);
Eigen::MatrixXd pair_density(const MatrixXc& ga, const MatrixXc& gb, const PairWeights& w);
// out[k] = sum over j - i = k - (n-1) of m(i,j); length 2n-1.
Eigen::VectorXd diagonal_sums(const Eigen::MatrixXd& m);
// Full discrete convolution, length y.size() + kernel.size() - 1.
Eigen::VectorXd convolve_full(const Eigen::VectorXd& y, const Eigen::VectorXd& kernel);
// For each delay tau: Re sum_{c,d} w(d) f(c,d) conj(f(d,c)) e^{2 pi i (nu_c - nu_d) tau}.
std::vector<double> dip_cross_terms(const MatrixXc& f, const Eigen::VectorXd& port_weight,
                                    const Eigen::VectorXd& nu, const std::vector<double>& delays);

}  // namespace qdspdc::kernels
