#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qdspdc/coherence.hpp"
#include "qdspdc/spdc.hpp"

namespace qdspdc {

enum class Polarization { kParallel, kOrthogonal };
std::string to_string(Polarization p);
Polarization parse_polarization(const std::string& s);

// Density over tau on a uniform grid; values per ps, total = sum(values) * dtau.
struct TauDensity {
  double tau0 = 0.0;
  double dtau = 1.0;
  Eigen::VectorXd values;

  double at(Eigen::Index k) const { return tau0 + static_cast<double>(k) * dtau; }
  double total() const { return values.sum() * dtau; }
};

// p(t1, t2): photon from `a` detected at D1 at t1 and the other at D2 at t2.
class CoincidenceDensity {
 public:
  CoincidenceDensity(TimeGrid grid, Eigen::MatrixXd values, Polarization pol);

  const TimeGrid& grid() const { return grid_; }
  const Eigen::MatrixXd& values() const { return values_; }
  Polarization polarization() const { return pol_; }
  double total() const;
  // Marginal over tau = t2 - t1.
  TauDensity tau_marginal() const;

 private:
  TimeGrid grid_;
  Eigen::MatrixXd values_;
  Polarization pol_;
};

TemporalAmplitude shift(const TemporalAmplitude& psi, double delay);
TwoTimeCoherence shift(const TwoTimeCoherence& g, double delay);

// b is delayed by `delay` before the beamsplitter; reflectivity R, transmission 1-R.
CoincidenceDensity coincidence_density(const TwoTimeCoherence& a, const TwoTimeCoherence& b, Polarization pol,
                                       double delay = 0.0, double reflectivity = 0.5);

// Both photons leave through the same port (either one); density of the two
// detection times, symmetric in its arguments. Total = probability per port.
Eigen::MatrixXd same_port_density(const TwoTimeCoherence& a, const TwoTimeCoherence& b, Polarization pol,
                                  double delay = 0.0, double reflectivity = 0.5);

double coalescence_probability(const TwoTimeCoherence& a, const TwoTimeCoherence& b);

struct Dephasing {
  double t1;
  double t2;
};

struct MaxCoalescence {
  double value;
  double delay;  // ps, SPDC pulse relative to QD onset
};

// Lifetime-limited wavepacket with Lorentzian FWHM `linewidth` (GHz).
TemporalAmplitude qd_pure_amplitude(double linewidth, const TimeGrid& grid);
double lifetime_from_linewidth(double linewidth);

// Overlap of the QD photon with the filtered SPDC pulse, maximized over the relative delay.
MaxCoalescence max_theoretical_coalescence(double qd_linewidth, const SpectralFilter& filter,
                                           const TemporalAmplitude& spdc_pulse,
                                           std::optional<Dephasing> include_dephasing = std::nullopt);

struct HomModelCurve {
  std::vector<double> delays;  // ps (delay or tau)
  std::vector<double> values;
  double jitter_fwhm = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
  double amplitude = 1.0;
  double visibility = 0.0;
};

// Signal-idler HOM dip vs signal delay. Needs identical, degenerate arms.
HomModelCurve hom_dip_curve(const JointSpectralAmplitude& jsa, const std::vector<double>& delays,
                            const SpectralFilter& post_bs_filter = SpectralFilter::none());

enum class BinKernel { kBox, kTriangle };

// Gaussian smear (combined jitter FWHM), then integration into bins centred at `centers`.
// kBox integrates [c - bin/2, c + bin/2]; kTriangle weights by the triangle of half-width `bin`.
HomModelCurve smear_with_detector(const TauDensity& density, double jitter_fwhm, double bin,
                                  const std::vector<double>& centers, BinKernel kernel = BinKernel::kBox);
TauDensity gaussian_smear(const TauDensity& density, double jitter_fwhm);

// QD (T1, T2) against a pure SPDC pulse arriving `delay` after the QD onset.
TauDensity hom_peak_density(double t1, double t2, const TemporalAmplitude& spdc, double delay, Polarization pol,
                            double reflectivity = 0.5);

void write_curve_csv(const HomModelCurve& c, std::ostream& os, const std::string& xname = "delay_ps");

}  // namespace qdspdc
