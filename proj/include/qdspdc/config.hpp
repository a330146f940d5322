#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "qdspdc/coherence.hpp"
#include "qdspdc/hom.hpp"

namespace qdspdc {

struct ExperimentConfig {
  std::int64_t rep_period = 12200;  // ps
  double t1 = 328.0;                // ps
  double t2 = 216.0;                // ps
  double jitter_fwhm = 169.7;       // ps per detector; two detectors combine to 240 ps
  std::int64_t bin = 128;           // ps
  double herald_prob_per_pulse = 0.1;
  double spdc_survival = 0.015;
  double qd_click_prob = 0.015;
  Polarization polarization = Polarization::kOrthogonal;
  double duration = 1.0;  // s
  std::uint64_t seed = 1;
  double background_rate = 0.0;  // Hz per detector

  // SPDC photon entering the beamsplitter
  FilterShape spdc_filter_shape = FilterShape::kRect;
  double spdc_filter_fwhm = 7.7;     // GHz
  double spdc_pump_duration = 10.0;  // ps
  double spdc_delay = 110.0;         // ps, SPDC pulse centre after the QD onset
  double emission_offset = 3012.0;   // ps, QD onset after the laser pulse
  double herald_offset = 1500.0;     // ps, herald detection after the laser pulse
  double reflectivity = 0.5;
  double grid_dt = 4.0;  // ps, density grid
  std::int64_t sync_decimation = 100000;
  bool unheralded_qd = true;  // QD photons also reach the detectors in periods without a herald

  void validate() const;
  std::uint64_t periods() const;
  SpectralFilter spdc_filter() const { return {spdc_filter_shape, spdc_filter_fwhm}; }
};

ExperimentConfig parse_config(std::istream& is);
ExperimentConfig load_config(const std::string& path);
// Applies one key=value assignment; unknown keys throw.
void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& value);
void write_config(const ExperimentConfig& c, std::ostream& os);

}  // namespace qdspdc
