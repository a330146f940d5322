#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "qdspdc/config.hpp"
#include "qdspdc/histogram.hpp"
#include "qdspdc/hom.hpp"

namespace qdspdc {

enum class LifetimeProfile { kTwoSided, kOneSided };

struct LifetimeFitOptions {
  LifetimeProfile profile = LifetimeProfile::kTwoSided;
  BinKernel kernel = BinKernel::kTriangle;
  // Model bin i is evaluated at centre(i) + kernel_shift.
  double kernel_shift = 0.0;
  // Two-sided only: the lobe decaying towards +tau starts at center + separation,
  // its mirror at center - separation. Negative separation makes them overlap.
  bool fit_separation = false;
  // Arrival-time density of the partner photon, convolved with the lobes before the jitter.
  std::optional<TauDensity> arrival_kernel;
  int max_evaluations = 2000;
};

struct LifetimeFit {
  double t1 = 0.0, sigma_t1 = 0.0;
  double amplitude = 0.0, sigma_amplitude = 0.0;
  double center = 0.0, separation = 0.0;
  Eigen::MatrixXd covariance;  // order: amplitude, t1, center[, separation]
  double chi2 = 0.0;
  int ndf = 0;
  std::vector<double> model;  // expected counts per bin
};

// Exponential (one- or two-sided) convolved with a gaussian of the given FWHM and
// integrated over the bins; Neyman-weighted least squares.
LifetimeFit fit_lifetime(const CoincidenceHistogram& h, double jitter_fwhm, double bin,
                         const LifetimeFitOptions& opt = {});

// Expected counts of the lifetime model (for tests and plotting).
std::vector<double> lifetime_model(const CoincidenceHistogram& h, double jitter_fwhm, double bin,
                                   const LifetimeFitOptions& opt, double amplitude, double t1, double center,
                                   double separation = 0.0);

struct HomFitContext {
  TemporalAmplitude spdc;  // pure SPDC wavepacket centred at 0
  double delay = 0.0;      // SPDC arrival after the QD onset
  double reflectivity = 0.5;
  double t2_reference = 216.0;
  BinKernel kernel = BinKernel::kTriangle;

  static HomFitContext from_config(const ExperimentConfig& cfg);
  // |spdc|^2 as a unit-area density
  TauDensity spdc_intensity() const;
};

struct HomPeakFit {
  double amplitude = 0.0;
  double t2 = std::numeric_limits<double>::quiet_NaN();
  double sigma_t2 = std::numeric_limits<double>::quiet_NaN();
  double interference = 0.0, sigma_interference = 0.0;
  bool interference_detected = false;
  double chi2_perp = 0.0, chi2_par = 0.0;
  int ndf_perp = 0, ndf_par = 0;
  HomModelCurve perp_model, par_model;          // smeared, per bin
  HomModelCurve perp_reference, par_reference;  // jitter-free, counts per bin width
};

HomPeakFit fit_hom_peak(const CoincidenceHistogram& perp, const CoincidenceHistogram& par, double t1,
                        double jitter_fwhm, const HomFitContext& ctx);

// Smeared model counts for one polarization (amplitude 1).
std::vector<double> hom_peak_model(const CoincidenceHistogram& h, double t1, double t2, double jitter_fwhm,
                                   const HomFitContext& ctx, Polarization pol);

}  // namespace qdspdc
