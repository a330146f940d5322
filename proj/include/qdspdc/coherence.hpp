#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "qdspdc/grid.hpp"

namespace qdspdc {

// Normalized pure wavepacket psi(t) sampled on a time grid.
class TemporalAmplitude {
 public:
  // Normalizes the samples; checks the grid span against the intensity FWHM.
  TemporalAmplitude(TimeGrid grid, VectorXc samples, bool check_span = true);

  const TimeGrid& grid() const { return grid_; }
  const VectorXc& samples() const { return samples_; }
  double norm() const;
  double intensity_fwhm() const;

 private:
  TimeGrid grid_;
  VectorXc samples_;
};

// G(t_i, t_j), unit trace, Hermitian.
class TwoTimeCoherence {
 public:
  // Hermitizes and rescales to unit trace.
  TwoTimeCoherence(TimeGrid grid, MatrixXc values);

  static TwoTimeCoherence pure(const TemporalAmplitude& psi);

  const TimeGrid& grid() const { return grid_; }
  const MatrixXc& values() const { return values_; }
  double trace() const;
  // Intensity G(t,t) as a plain vector.
  Eigen::VectorXd intensity() const;
  // Smallest and largest eigenvalue of G*dt, for PSD checks on coarse grids.
  std::pair<double, double> eigen_range() const;

  void write_csv(std::ostream& os) const;

 private:
  TimeGrid grid_;
  MatrixXc values_;
};

enum class FilterShape { kRect, kLorentzian, kGaussian, kNone };

std::string to_string(FilterShape s);
FilterShape parse_filter_shape(const std::string& s);

struct SpectralFilter {
  FilterShape shape = FilterShape::kNone;
  double fwhm = 0.0;             // GHz, intensity FWHM of |H|^2
  double center_detuning = 0.0;  // GHz

  SpectralFilter() = default;
  SpectralFilter(FilterShape s, double f, double detuning = 0.0);

  static SpectralFilter none() { return {}; }
  bool is_none() const { return shape == FilterShape::kNone; }
  // Amplitude transfer H(nu), |H| <= 1.
  cplx transfer(double nu) const;
  // |H|^2 averaged over [nu - w/2, nu + w/2]; exact for the rect, midpoint otherwise.
  double cell_transmission(double nu, double w) const;
  // Amplitude to use on a frequency cell of width w.
  cplx cell_amplitude(double nu, double w) const;
};

TwoTimeCoherence qd_coherence(double t1, double t2, const TimeGrid& grid);

TemporalAmplitude filter_amplitude_response(const SpectralFilter& filter, const TimeGrid& grid);

template <class T>
struct Filtered {
  T state;
  double transmitted_fraction;
};

Filtered<TemporalAmplitude> apply_filter(const TemporalAmplitude& in, const SpectralFilter& filter);
Filtered<TwoTimeCoherence> apply_filter(const TwoTimeCoherence& in, const SpectralFilter& filter);

// x > 0 with sinc(x)^2 = 1/2.
double sinc_half_power_root();

// Intensity FWHM (ps) of the transform-limited pulse for a filter of the given shape.
double transform_limit(double fwhm_ghz, FilterShape shape);

double purity(const TwoTimeCoherence& g);

// Transform-limited gaussian pulse with the given intensity FWHM (ps), centred at `center`.
TemporalAmplitude gaussian_pulse(double fwhm_ps, const TimeGrid& grid, double center = 0.0);

// Spectral-domain helpers on the grid's DFT lattice, psi~(nu) = int psi(t) e^{+2 pi i nu t} dt.
VectorXc to_spectrum(const VectorXc& psi, const TimeGrid& grid);
VectorXc from_spectrum(const VectorXc& spec, const TimeGrid& grid);
// Multiplies the spectrum by mult(nu_k) and transforms back.
VectorXc spectral_multiply(const VectorXc& psi, const TimeGrid& grid, const VectorXc& mult);
VectorXc filter_multiplier(const SpectralFilter& f, const TimeGrid& grid, double delay = 0.0);

}  // namespace qdspdc
