#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace qdspdc {

using cplx = std::complex<double>;
using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;

constexpr double kPi = 3.14159265358979323846;
// GHz * ps
constexpr double kGhzPs = 1e-3;

// Uniform time grid, samples at t0 + i*dt (ps).
struct TimeGrid {
  double t0 = 0.0;
  double dt = 1.0;
  std::size_t n = 0;

  double at(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
  double span() const { return static_cast<double>(n) * dt; }
  double end() const { return t0 + span(); }

  // Midpoint samples covering [start, stop).
  static TimeGrid covering(double start, double stop, double dt);

  bool compatible(const TimeGrid& o) const;
  // Frequency (GHz) of DFT bin k, signed wrap.
  double dft_frequency(std::size_t k) const;
};

// Uniform frequency grid (GHz), samples at nu0 + k*dnu.
struct FrequencyGrid {
  double nu0 = 0.0;
  double dnu = 1.0;
  std::size_t n = 0;

  double at(std::size_t k) const { return nu0 + static_cast<double>(k) * dnu; }
  double span() const { return static_cast<double>(n) * dnu; }

  // Odd number of points centred on zero.
  static FrequencyGrid symmetric(double half_span, double dnu);
  bool operator==(const FrequencyGrid& o) const;
};

// Full width at half maximum of a sampled non-negative curve, with linear
// interpolation of the crossings. Returns 0 for curves without a peak.
double sampled_fwhm(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qdspdc
