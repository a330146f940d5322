#include "qdspdc/presets.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "qdspdc/errors.hpp"

namespace qdspdc {

void ScenarioPreset::validate() const {
  require(filter_fwhm > 0.0, "preset: filter_fwhm must be positive");
  require(qd_linewidth > 0.0, "preset: qd_linewidth must be positive");
  require(t1 > 0.0 && t2 > 0.0, "preset: T1 and T2 must be positive");
  require(t2 <= 2.0 * t1, "preset: T2 exceeds 2 T1");
  require(pump_duration > 0.0, "preset: pump_duration must be positive");
  require(filter_shape != FilterShape::kNone, "preset: a filter shape is required");
}

ScenarioPreset preset(const std::string& name) {
  ScenarioPreset p;
  p.name = name;
  if (name == "fbg30") {
    p.filter_shape = FilterShape::kGaussian;
    p.filter_fwhm = 30.0;
  } else if (name == "stretcher7p7") {
    p.filter_shape = FilterShape::kRect;
    p.filter_fwhm = 7.7;
  } else if (name == "polyakov0p9") {
    p.filter_shape = FilterShape::kLorentzian;
    p.filter_fwhm = 0.9;
    p.qd_linewidth = 1.1;
    p.t2 = 1.0 / (kPi * p.qd_linewidth * kGhzPs);
    p.t1 = 5.7 * p.t2 / 2.0;
  } else {
    throw ValidationError("unknown preset '" + name + "'");
  }
  return p;
}

std::vector<std::string> preset_names() { return {"fbg30", "stretcher7p7", "polyakov0p9"}; }

TimeGrid theory_grid(const ScenarioPreset& p) {
  p.validate();
  const double dt = p.filter_fwhm > 25.0 ? 1.0 : 2.0;
  const double tf = transform_limit(p.filter_fwhm, p.filter_shape);
  const double w = std::max(tf, p.pump_duration);
  // the Lorentzian response has an exponential tail with 1/e time 1/(pi f)
  const double tail = p.filter_shape == FilterShape::kLorentzian ? 1.0 / (kPi * p.filter_fwhm * kGhzPs) : w;
  const double t_qd = std::max(p.t1, lifetime_from_linewidth(p.qd_linewidth));
  const double start = -8.0 * w - 200.0;
  const double stop = std::max(12.0 * t_qd, 2.0 * t_qd + 12.0 * tail) + 8.0 * w + 200.0;
  return TimeGrid::covering(start, stop, dt);
}

TheoryReport theory(const ScenarioPreset& p) {
  const TimeGrid grid = theory_grid(p);
  // the bound is set by the filter spectrum alone: transform-limited wavepacket of the passband
  const auto wavepacket = filter_amplitude_response(p.filter(), grid);
  const auto none = SpectralFilter::none();
  TheoryReport r;
  r.preset = p;
  r.transform_limit = transform_limit(p.filter_fwhm, p.filter_shape);
  r.wavepacket_fwhm = wavepacket.intensity_fwhm();
  r.transmitted_fraction = apply_filter(gaussian_pulse(p.pump_duration, grid), p.filter()).transmitted_fraction;
  r.lifetime_limited = max_theoretical_coalescence(p.qd_linewidth, none, wavepacket);
  r.dephased = max_theoretical_coalescence(p.qd_linewidth, none, wavepacket, Dephasing{p.t1, p.t2});
  return r;
}

void write_theory(const TheoryReport& r, std::ostream& os) {
  const auto prec = os.precision(6);
  os << "preset=" << r.preset.name << '\n'
     << "filter_shape=" << to_string(r.preset.filter_shape) << '\n'
     << "filter_fwhm_GHz=" << r.preset.filter_fwhm << '\n'
     << "qd_linewidth_GHz=" << r.preset.qd_linewidth << '\n'
     << "T1_ps=" << r.preset.t1 << '\n'
     << "T2_ps=" << r.preset.t2 << '\n'
     << "pump_fwhm_ps=" << r.preset.pump_duration << '\n'
     << "max_coalescence_lifetime_limited=" << r.lifetime_limited.value << '\n'
     << "optimal_delay_lifetime_limited_ps=" << r.lifetime_limited.delay << '\n'
     << "max_coalescence_with_dephasing=" << r.dephased.value << '\n'
     << "optimal_delay_with_dephasing_ps=" << r.dephased.delay << '\n'
     << "transform_limit_ps=" << r.transform_limit << '\n'
     << "wavepacket_fwhm_ps=" << r.wavepacket_fwhm << '\n'
     << "filter_transmitted_fraction=" << r.transmitted_fraction << '\n';
  os.precision(prec);
}

void write_theory_csv(const std::vector<TheoryReport>& rows, std::ostream& os) {
  os << "preset,filter_shape,filter_fwhm_GHz,qd_linewidth_GHz,T1_ps,T2_ps,max_coalescence_lifetime_limited,"
        "max_coalescence_with_dephasing,transform_limit_ps,filter_transmitted_fraction\n";
  for (const auto& r : rows)
    os << r.preset.name << ',' << to_string(r.preset.filter_shape) << ',' << r.preset.filter_fwhm << ','
       << r.preset.qd_linewidth << ',' << r.preset.t1 << ',' << r.preset.t2 << ',' << r.lifetime_limited.value << ','
       << r.dephased.value << ',' << r.transform_limit << ',' << r.transmitted_fraction << '\n';
}

}  // namespace qdspdc
