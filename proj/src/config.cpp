#include "qdspdc/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "qdspdc/errors.hpp"

namespace qdspdc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw ValidationError("config: bad number for '" + key + "': " + v);
  return out;
}

template <class Int>
Int to_int(const std::string& key, const std::string& v) {
  Int out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw ValidationError("config: bad integer for '" + key + "': " + v);
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ValidationError("config: bad boolean for '" + key + "': " + v);
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

#define QD_DOUBLE(name) {#name, [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.name = to_double(k, v); }}
#define QD_INT(name, T) {#name, [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.name = to_int<T>(k, v); }}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> m = {
      QD_INT(rep_period, std::int64_t),
      QD_DOUBLE(t1),
      QD_DOUBLE(t2),
      QD_DOUBLE(jitter_fwhm),
      QD_INT(bin, std::int64_t),
      QD_DOUBLE(herald_prob_per_pulse),
      QD_DOUBLE(spdc_survival),
      QD_DOUBLE(qd_click_prob),
      {"polarization", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.polarization = parse_polarization(v); }},
      QD_DOUBLE(duration),
      QD_INT(seed, std::uint64_t),
      QD_DOUBLE(background_rate),
      {"spdc_filter_shape", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.spdc_filter_shape = parse_filter_shape(v); }},
      QD_DOUBLE(spdc_filter_fwhm),
      QD_DOUBLE(spdc_pump_duration),
      QD_DOUBLE(spdc_delay),
      QD_DOUBLE(emission_offset),
      QD_DOUBLE(herald_offset),
      QD_DOUBLE(reflectivity),
      QD_DOUBLE(grid_dt),
      QD_INT(sync_decimation, std::int64_t),
      {"unheralded_qd", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.unheralded_qd = to_bool(k, v); }},
  };
  return m;
}

#undef QD_DOUBLE
#undef QD_INT

void prob(double p, const char* name) {
  require(p >= 0.0 && p <= 1.0, std::string("config: ") + name + " must lie in [0,1]");
}

}  // namespace

void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& value) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ValidationError("config: unknown key '" + key + "'");
  it->second(c, key, value);
}

ExperimentConfig parse_config(std::istream& is) {
  ExperimentConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config: line " + std::to_string(lineno) + " is not key=value");
    set_config_value(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  return parse_config(in);
}

void ExperimentConfig::validate() const {
  require(rep_period > 0, "config: rep_period must be positive");
  require(bin > 0 && bin <= rep_period, "config: bin must be positive and not exceed rep_period");
  require(t1 > 0.0 && t2 > 0.0 && t2 <= 2.0 * t1, "config: need 0 < t2 <= 2 t1");
  require(jitter_fwhm >= 0.0, "config: jitter_fwhm must be non-negative");
  prob(herald_prob_per_pulse, "herald_prob_per_pulse");
  prob(spdc_survival, "spdc_survival");
  prob(qd_click_prob, "qd_click_prob");
  prob(reflectivity, "reflectivity");
  require(duration > 0.0 && std::isfinite(duration), "config: duration must be positive");
  // timestamps are int64 ps
  require(duration * 1e12 < 9.0e18, "config: duration overflows the timestamp range");
  require(background_rate >= 0.0 && background_rate * rep_period * 1e-12 < 1.0,
          "config: background_rate must be non-negative and below one count per period");
  require(grid_dt > 0.0, "config: grid_dt must be positive");
  require(sync_decimation > 0, "config: sync_decimation must be positive");
  require(spdc_pump_duration > 0.0, "config: spdc_pump_duration must be positive");
  if (spdc_filter_shape != FilterShape::kNone) require(spdc_filter_fwhm > 0.0, "config: spdc_filter_fwhm must be positive");
  require(herald_offset >= 0.0 && herald_offset < static_cast<double>(rep_period),
          "config: herald_offset must lie inside the period");
  require(emission_offset >= 0.0, "config: emission_offset must be non-negative");
  require(emission_offset + 10.0 * t1 + std::abs(spdc_delay) + 5.0 * jitter_fwhm < static_cast<double>(rep_period),
          "config: emission window does not fit inside one period");
}

std::uint64_t ExperimentConfig::periods() const {
  return static_cast<std::uint64_t>(std::floor(duration * 1e12 / static_cast<double>(rep_period)));
}

void write_config(const ExperimentConfig& c, std::ostream& os) {
  const auto prec = os.precision(12);
  os << "rep_period=" << c.rep_period << '\n'
     << "t1=" << c.t1 << '\n'
     << "t2=" << c.t2 << '\n'
     << "jitter_fwhm=" << c.jitter_fwhm << '\n'
     << "bin=" << c.bin << '\n'
     << "herald_prob_per_pulse=" << c.herald_prob_per_pulse << '\n'
     << "spdc_survival=" << c.spdc_survival << '\n'
     << "qd_click_prob=" << c.qd_click_prob << '\n'
     << "polarization=" << to_string(c.polarization) << '\n'
     << "duration=" << c.duration << '\n'
     << "seed=" << c.seed << '\n'
     << "background_rate=" << c.background_rate << '\n'
     << "spdc_filter_shape=" << to_string(c.spdc_filter_shape) << '\n'
     << "spdc_filter_fwhm=" << c.spdc_filter_fwhm << '\n'
     << "spdc_pump_duration=" << c.spdc_pump_duration << '\n'
     << "spdc_delay=" << c.spdc_delay << '\n'
     << "emission_offset=" << c.emission_offset << '\n'
     << "herald_offset=" << c.herald_offset << '\n'
     << "reflectivity=" << c.reflectivity << '\n'
     << "grid_dt=" << c.grid_dt << '\n'
     << "sync_decimation=" << c.sync_decimation << '\n'
     << "unheralded_qd=" << (c.unheralded_qd ? "true" : "false") << '\n';
  os.precision(prec);
}

}  // namespace qdspdc
