#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qdspdc/coherence.hpp"
#include "qdspdc/hom.hpp"

namespace qdspdc {

struct ScenarioPreset {
  std::string name;
  FilterShape filter_shape = FilterShape::kRect;
  double filter_fwhm = 7.7;     // GHz
  double qd_linewidth = 1.2;    // GHz
  double t1 = 328.0;            // ps
  double t2 = 216.0;            // ps
  double pump_duration = 10.0;  // ps

  SpectralFilter filter() const { return {filter_shape, filter_fwhm}; }
  void validate() const;
};

// fbg30, stretcher7p7, polyakov0p9; anything else throws.
ScenarioPreset preset(const std::string& name);
std::vector<std::string> preset_names();

struct TheoryReport {
  ScenarioPreset preset;
  MaxCoalescence lifetime_limited{};
  MaxCoalescence dephased{};
  double transform_limit = 0.0;       // ps
  double wavepacket_fwhm = 0.0;       // ps, intensity FWHM of the transform-limited wavepacket
  double transmitted_fraction = 0.0;  // of the pump-limited SPDC pulse through the filter
};

TimeGrid theory_grid(const ScenarioPreset& p);
TheoryReport theory(const ScenarioPreset& p);
void write_theory(const TheoryReport& r, std::ostream& os);
void write_theory_csv(const std::vector<TheoryReport>& rows, std::ostream& os);

}  // namespace qdspdc
