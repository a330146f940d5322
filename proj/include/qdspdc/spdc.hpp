#pragma once

#include <iosfwd>

#include "qdspdc/coherence.hpp"

namespace qdspdc {

// How the phase-matching coordinate xi combines the two detunings.
//   sum:        xi = ws*nu_s + wi*nu_i
//   difference: xi = ws*nu_s - wi*nu_i
// with ws = 2r/(1+r), wi = 2/(1+r) for asymmetry r.
enum class PhasematchOrientation { kSum, kDifference };

struct PhasematchParams {
  double pm_bandwidth = 60.0;  // GHz, FWHM of |phi|^2 along xi
  double asymmetry = 3.0;
  double signal_center = 920.0;  // nm
  double idler_center = 920.0;   // nm
  int side_lobes = 3;            // sinc lobes kept on each side of the main lobe
  PhasematchOrientation orientation = PhasematchOrientation::kSum;

  void validate() const;
  double signal_weight() const { return 2.0 * asymmetry / (1.0 + asymmetry); }
  double idler_weight() const { return 2.0 / (1.0 + asymmetry); }
  double xi(double nu_s, double nu_i) const;
  cplx phasematch(double nu_s, double nu_i) const;
  bool degenerate() const { return std::abs(signal_center - idler_center) < 1e-9; }
};

class JointSpectralAmplitude {
 public:
  JointSpectralAmplitude(FrequencyGrid signal_grid, FrequencyGrid idler_grid, MatrixXc values, double pump_fwhm_time,
                         PhasematchParams pm);

  const FrequencyGrid& signal_grid() const { return signal_grid_; }
  const FrequencyGrid& idler_grid() const { return idler_grid_; }
  // rows: signal, columns: idler; sum |f|^2 dnu_s dnu_i = 1
  const MatrixXc& values() const { return values_; }
  double pump_fwhm_time() const { return pump_fwhm_time_; }
  const PhasematchParams& phasematch() const { return pm_; }
  double norm() const;

 private:
  FrequencyGrid signal_grid_, idler_grid_;
  MatrixXc values_;
  double pump_fwhm_time_;
  PhasematchParams pm_;
};

// Spectral intensity FWHM (GHz) of a transform-limited gaussian pump.
double pump_bandwidth(double pump_fwhm_time);

// Symmetric grid large enough for both arms of the given configuration.
FrequencyGrid auto_jsa_grid(double pump_fwhm_time, const PhasematchParams& pm, double dnu = 1.0);

// pump_fwhm_time = +inf gives the CW limit (support on nu_s + nu_i = 0).
JointSpectralAmplitude build_jsa(double pump_fwhm_time, const PhasematchParams& pm, const FrequencyGrid& signal_grid,
                                 const FrequencyGrid& idler_grid);
JointSpectralAmplitude build_jsa(double pump_fwhm_time, const PhasematchParams& pm, double dnu = 1.0);

enum class Arm { kSignal, kIdler };

struct MarginalSpectrum {
  FrequencyGrid grid;
  Eigen::VectorXd intensity;  // unit area
  double fwhm = 0.0;
};

// Marginal of one arm, optionally after a filter on that arm.
MarginalSpectrum marginal_spectrum(const JointSpectralAmplitude& jsa, Arm arm,
                                   const SpectralFilter& filter = SpectralFilter::none());

// Pearson correlation of |f|^2 over (nu_s, nu_i).
double spectral_correlation(const JointSpectralAmplitude& jsa);

// Heralding efficiency = baseline * insertion * spectral transmission of the signal filter.
struct HeraldingModel {
  double baseline = 0.092;
  double insertion = 1.0;
};

// Insertion factor that makes the filtered efficiency equal `target`.
double calibrate_insertion(const JointSpectralAmplitude& jsa, const SpectralFilter& signal_filter, double target,
                           double baseline = 0.092);

// Probability that the signal passes its filter given an idler herald (after the idler filter).
double signal_transmission(const JointSpectralAmplitude& jsa, const SpectralFilter& signal_filter,
                           const SpectralFilter& idler_filter = SpectralFilter::none());

struct HeraldedState {
  TwoTimeCoherence state;
  double heralding_efficiency;
  double transmitted_fraction;
};

// Reduced signal state on a time grid of one spectral period (1/dnu), sampled so
// the frequency-to-time map is unitary.
HeraldedState heralded_signal_state(const JointSpectralAmplitude& jsa, const SpectralFilter& signal_filter,
                                    const SpectralFilter& idler_filter = SpectralFilter::none(),
                                    const HeraldingModel& model = {});
// Same on a caller-supplied grid (the state is periodic with period 1/dnu).
HeraldedState heralded_signal_state(const JointSpectralAmplitude& jsa, const SpectralFilter& signal_filter,
                                    const SpectralFilter& idler_filter, const HeraldingModel& model,
                                    const TimeGrid& grid);

double schmidt_purity(const JointSpectralAmplitude& jsa, const SpectralFilter& signal_filter = SpectralFilter::none(),
                      const SpectralFilter& idler_filter = SpectralFilter::none());

void write_jsa_csv(const JointSpectralAmplitude& jsa, std::ostream& os);
void write_marginal_csv(const MarginalSpectrum& m, std::ostream& os);

}  // namespace qdspdc
