#include "commands.hpp"

#include <filesystem>
#include <functional>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <vector>

#include "qdspdc/config.hpp"
#include "qdspdc/errors.hpp"
#include "qdspdc/presets.hpp"
#include "qdspdc/simkit.hpp"
#include "qdspdc/spdc.hpp"
#include "qdspdc/tagfile.hpp"
#include "qdspdc/tagproc.hpp"

namespace qdspdc::cli {

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p);
  if (!os) throw IoError("cannot open '" + p.string() + "' for writing");
  return os;
}

void write_file(const std::filesystem::path& p, const std::function<void(std::ostream&)>& f) {
  auto os = open_out(p);
  f(os);
  if (!os) throw IoError("write failed: " + p.string());
}

}  // namespace

int cmd_theory(const TheoryArgs& a) {
  ScenarioPreset p;
  if (a.preset == "custom") {
    if (!a.filter_shape || !a.filter_fwhm) throw ValidationError("custom preset needs --filter-shape and --filter-fwhm");
    p.name = "custom";
  } else {
    p = preset(a.preset);
  }
  const bool overridden = a.filter_shape || a.filter_fwhm || a.qd_linewidth || a.t1 || a.t2 || a.pump;
  if (a.filter_shape) p.filter_shape = parse_filter_shape(*a.filter_shape);
  if (a.filter_fwhm) p.filter_fwhm = *a.filter_fwhm;
  if (a.qd_linewidth) p.qd_linewidth = *a.qd_linewidth;
  if (a.t1) p.t1 = *a.t1;
  if (a.t2) p.t2 = *a.t2;
  if (a.pump) p.pump_duration = *a.pump;
  if (overridden && p.name != "custom") p.name += "+overrides";
  const auto r = theory(p);
  write_theory(r, std::cout);
  if (!a.csv.empty()) write_file(a.csv, [&](std::ostream& os) { write_theory_csv({r}, os); });
  return 0;
}

int cmd_simulate(const SimulateArgs& a) {
  ExperimentConfig cfg = a.config.empty() ? ExperimentConfig{} : load_config(a.config);
  if (a.polarization) cfg.polarization = parse_polarization(*a.polarization);
  if (a.seed) cfg.seed = *a.seed;
  if (a.duration) cfg.duration = *a.duration;
  cfg.validate();
  {
    auto os = open_out(a.out);
    TagWriter w(os);
    SimulationOptions opt;
    opt.threads = a.threads;
    simulate_run(cfg, w, opt);
    if (!os) throw IoError("write failed: " + a.out);
  }
  std::cout << "out=" << a.out << '\n' << "periods=" << cfg.periods() << '\n';
  write_config(cfg, std::cout);
  return 0;
}

int cmd_analyze(const AnalyzeArgs& a) {
  RunAccumulator perp, par;
  stream_tags(a.perp, perp);
  stream_tags(a.par, par);
  AnalysisOptions opt;
  opt.window_bins = a.window_bins;
  opt.window_threshold = a.window_threshold;
  opt.jitter_fwhm = a.jitter_fwhm;
  std::optional<ExperimentConfig> cfg;
  if (!a.no_model) cfg = a.config.empty() ? ExperimentConfig{} : load_config(a.config);
  opt.model = cfg;

  int rc = 0;
  AnalysisReport r;
  try {
    r = analyze(perp, par, opt);
  } catch (const FitError& e) {
    std::cerr << "error: " << e.what() << '\n';
    opt.fit = false;
    r = analyze(perp, par, opt);
    r.warnings.push_back(std::string("fit failed: ") + e.what());
    rc = 3;
  }
  write_report(r, std::cout, cfg ? &*cfg : nullptr);
  if (!a.report.empty()) write_file(a.report, [&](std::ostream& os) { write_report(r, os, cfg ? &*cfg : nullptr); });

  if (!a.csv_dir.empty()) {
    const std::filesystem::path dir(a.csv_dir);
    std::filesystem::create_directories(dir);
    MicroHistograms both = perp.micro();
    both.add(par.micro());
    const std::vector<std::pair<std::string, const CoincidenceHistogram*>> hists{
        {"micro_d1_doubles.csv", &both.d1_doubles}, {"micro_d2_doubles.csv", &both.d2_doubles},
        {"micro_d1_triples.csv", &both.d1_triples}, {"micro_d2_triples.csv", &both.d2_triples},
        {"pseudo_perp.csv", &perp.pseudo().histogram}, {"pseudo_par.csv", &par.pseudo().histogram},
        {"central_perp.csv", &r.central_perp},      {"central_par.csv", &r.central_par},
        {"filtered_perp.csv", &r.filtered_perp},    {"filtered_par.csv", &r.filtered_par}};
    for (const auto& [name, h] : hists) {
      const std::string x = name.rfind("micro", 0) == 0 ? "micro_ps" : "tau_ps";
      write_file(dir / name, [&](std::ostream& os) { h->write_csv(os, x); });
    }
    if (r.hom) {
      write_file(dir / "model_perp.csv", [&](std::ostream& os) { write_curve_csv(r.hom->perp_model, os, "tau_ps"); });
      write_file(dir / "model_par.csv", [&](std::ostream& os) { write_curve_csv(r.hom->par_model, os, "tau_ps"); });
      write_file(dir / "reference_perp.csv",
                 [&](std::ostream& os) { write_curve_csv(r.hom->perp_reference, os, "tau_ps"); });
      write_file(dir / "reference_par.csv",
                 [&](std::ostream& os) { write_curve_csv(r.hom->par_reference, os, "tau_ps"); });
    }
  }
  return rc;
}

int cmd_spectra(const SpectraArgs& a) {
  PhasematchParams pm;
  pm.pm_bandwidth = a.pm_bandwidth;
  pm.asymmetry = a.asymmetry;
  if (a.orientation == "sum")
    pm.orientation = PhasematchOrientation::kSum;
  else if (a.orientation == "difference")
    pm.orientation = PhasematchOrientation::kDifference;
  else
    throw ValidationError("orientation must be 'sum' or 'difference'");
  const SpectralFilter filter(parse_filter_shape(a.filter_shape), a.filter_fwhm);
  const auto jsa = build_jsa(a.pump, pm, a.dnu);
  const auto jsa_f = a.pump_filtered == a.pump ? jsa : build_jsa(a.pump_filtered, pm, a.dnu);
  const auto ms = marginal_spectrum(jsa, Arm::kSignal);
  const auto mi = marginal_spectrum(jsa, Arm::kIdler);
  const auto msf = marginal_spectrum(jsa_f, Arm::kSignal, filter);
  const auto mif = marginal_spectrum(jsa_f, Arm::kIdler, filter);

  std::vector<double> delays;
  for (int k = -200; k <= 200; ++k) delays.push_back(0.5 * k);
  const auto dip = hom_dip_curve(jsa, delays);
  const auto dipf = hom_dip_curve(jsa_f, delays, filter);

  const std::filesystem::path dir(a.out_dir);
  std::filesystem::create_directories(dir);
  write_file(dir / "jsa.csv", [&](std::ostream& os) { write_jsa_csv(jsa, os); });
  write_file(dir / "marginal_signal.csv", [&](std::ostream& os) { write_marginal_csv(ms, os); });
  write_file(dir / "marginal_idler.csv", [&](std::ostream& os) { write_marginal_csv(mi, os); });
  write_file(dir / "marginal_signal_filtered.csv", [&](std::ostream& os) { write_marginal_csv(msf, os); });
  write_file(dir / "marginal_idler_filtered.csv", [&](std::ostream& os) { write_marginal_csv(mif, os); });
  write_file(dir / "hom_dip.csv", [&](std::ostream& os) { write_curve_csv(dip, os); });
  write_file(dir / "hom_dip_filtered.csv", [&](std::ostream& os) { write_curve_csv(dipf, os); });

  std::cout << "signal_fwhm_GHz=" << ms.fwhm << '\n'
            << "idler_fwhm_GHz=" << mi.fwhm << '\n'
            << "signal_filtered_fwhm_GHz=" << msf.fwhm << '\n'
            << "spectral_correlation=" << spectral_correlation(jsa) << '\n'
            << "schmidt_purity=" << schmidt_purity(jsa) << '\n'
            << "schmidt_purity_filtered=" << schmidt_purity(jsa_f, filter) << '\n'
            << "hom_visibility=" << dip.visibility << '\n'
            << "hom_visibility_filtered=" << dipf.visibility << '\n'
            << "out_dir=" << dir.string() << '\n';
  return 0;
}

namespace {

struct MeasuredColumn {
  AnalysisReport report;
  double window_ps = 0.0;
};

MeasuredColumn measure(const ScenarioPreset& p, const Table1Args& a) {
  ExperimentConfig cfg;
  cfg.spdc_filter_shape = p.filter_shape;
  cfg.spdc_filter_fwhm = p.filter_fwhm;
  cfg.spdc_pump_duration = p.pump_duration;
  cfg.t1 = p.t1;
  cfg.t2 = p.t2;
  cfg.duration = a.duration;
  cfg.seed = a.seed;
  RunAccumulator perp, par;
  cfg.polarization = Polarization::kOrthogonal;
  simulate_run(cfg, perp);
  cfg.polarization = Polarization::kParallel;
  simulate_run(cfg, par);
  AnalysisOptions opt;
  opt.model = cfg;
  MeasuredColumn c;
  try {
    c.report = analyze(perp, par, opt);
  } catch (const FitError&) {
    opt.fit = false;
    c.report = analyze(perp, par, opt);
  }
  c.window_ps = static_cast<double>(opt.window_bins * cfg.bin);
  return c;
}

std::string pct(double v, double sigma = -1.0) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(1) << 100.0 * v;
  if (sigma >= 0.0) s << "(" << std::setprecision(1) << 100.0 * sigma << ")";
  return s.str();
}

std::string num(double v, int prec = 1) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(prec) << v;
  return s.str();
}

}  // namespace

int cmd_reproduce_table1(const Table1Args& a) {
  std::vector<ScenarioPreset> ps;
  std::vector<TheoryReport> th;
  for (const auto& n : preset_names()) {
    ps.push_back(preset(n));
    th.push_back(theory(ps.back()));
  }
  std::vector<std::optional<MeasuredColumn>> meas(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i)
    if (ps[i].name != "polyakov0p9") meas[i] = measure(ps[i], a);

  std::vector<std::vector<std::string>> rows;
  auto row = [&](const std::string& label, const std::string& unit, auto cell) {
    std::vector<std::string> r{label};
    for (std::size_t i = 0; i < ps.size(); ++i) r.push_back(cell(i));
    r.push_back(unit);
    rows.push_back(std::move(r));
  };
  const std::string na = "n/a";
  row("Max. theoretical coalescence", "%", [&](std::size_t i) { return pct(th[i].lifetime_limited.value); });
  row("Measured raw coalescence", "%",
      [&](std::size_t i) { return meas[i] ? pct(meas[i]->report.raw.p, meas[i]->report.raw.sigma) : na; });
  row("Time-selected coalescence", "%",
      [&](std::size_t i) { return meas[i] ? pct(meas[i]->report.filtered.p, meas[i]->report.filtered.sigma) : na; });
  row("Time window", "ps", [&](std::size_t i) { return meas[i] ? num(meas[i]->window_ps, 0) : na; });
  row("Time selection efficiency", "%",
      [&](std::size_t i) { return meas[i] ? pct(meas[i]->report.selection_efficiency) : na; });
  row("2T_1/T_2", "", [&](std::size_t i) { return num(2.0 * ps[i].t1 / ps[i].t2, 1); });
  row("Delta nu_SPDC", "GHz", [&](std::size_t i) { return num(ps[i].filter_fwhm, 1); });
  row("Delta nu_QD", "GHz", [&](std::size_t i) { return num(ps[i].qd_linewidth, 1); });

  auto print = [&](std::ostream& os) {
    os << std::left << std::setw(32) << "" << std::setw(22) << "Fiber Bragg grating" << std::setw(22)
       << "Pulse stretcher" << std::setw(22) << "Polyakov (theory)" << "Unit\n";
    for (const auto& r : rows) {
      os << std::setw(32) << r[0];
      for (std::size_t i = 1; i + 1 < r.size(); ++i) os << std::setw(22) << r[i];
      os << r.back() << '\n';
    }
    os << "# simulated " << a.duration << " s per polarization, seed " << a.seed << '\n';
    os << "# with dephasing: ";
    for (std::size_t i = 0; i < ps.size(); ++i) os << ps[i].name << '=' << pct(th[i].dephased.value) << "% ";
    os << '\n';
  };
  print(std::cout);
  if (!a.out.empty()) write_file(a.out, print);
  return 0;
}

}  // namespace qdspdc::cli
