#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "qdspdc/errors.hpp"

using namespace qdspdc;

int main(int argc, char** argv) {
  CLI::App app{"QD / SPDC two-photon interference toolkit"};
  app.require_subcommand(1);

  cli::TheoryArgs th;
  auto* theory = app.add_subcommand("theory", "maximum coalescence, transform limits, filter transmission");
  theory->add_option("--preset", th.preset, "fbg30, stretcher7p7, polyakov0p9 or custom")->capture_default_str();
  theory->add_option("--filter-shape", th.filter_shape, "rect, gaussian, lorentzian");
  theory->add_option("--filter-fwhm", th.filter_fwhm, "GHz");
  theory->add_option("--qd-linewidth", th.qd_linewidth, "GHz");
  theory->add_option("--t1", th.t1, "ps");
  theory->add_option("--t2", th.t2, "ps");
  theory->add_option("--pump", th.pump, "pump FWHM, ps");
  theory->add_option("--csv", th.csv, "write a CSV row to this file");

  cli::SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "write a simulated tag file");
  simulate->add_option("--config", sim.config, "key=value config file");
  simulate->add_option("--out", sim.out, "tag file")->required();
  simulate->add_option("--polarization", sim.polarization, "orthogonal or parallel");
  simulate->add_option("--seed", sim.seed);
  simulate->add_option("--duration", sim.duration, "s");
  simulate->add_option("--threads", sim.threads, "0: OpenMP default, 1: serial")->capture_default_str();

  cli::AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "HOM analysis of an orthogonal/parallel pair of tag files");
  analyze->add_option("--perp", an.perp, "orthogonal-polarization tag file")->required();
  analyze->add_option("--par", an.par, "parallel-polarization tag file")->required();
  analyze->add_option("--window-bins", an.window_bins)->capture_default_str();
  analyze->add_option("--window-threshold", an.window_threshold)->capture_default_str();
  analyze->add_option("--jitter", an.jitter_fwhm, "combined detector jitter FWHM, ps")->capture_default_str();
  analyze->add_option("--config", an.config, "config the data were taken with (physics context of the fits)");
  analyze->add_flag("--no-model", an.no_model, "skip the model-based fits");
  analyze->add_option("--report", an.report, "also write the report here");
  analyze->add_option("--csv-dir", an.csv_dir, "write histograms and model curves here");

  cli::SpectraArgs sp;
  auto* spectra = app.add_subcommand("spectra", "JSA, marginals and signal-idler HOM dip");
  spectra->add_option("--pump", sp.pump, "pump FWHM for the unfiltered JSA, ps")->capture_default_str();
  spectra->add_option("--pump-filtered", sp.pump_filtered, "pump FWHM for the filtered dip, ps")->capture_default_str();
  spectra->add_option("--pm-bandwidth", sp.pm_bandwidth, "GHz")->capture_default_str();
  spectra->add_option("--asymmetry", sp.asymmetry)->capture_default_str();
  spectra->add_option("--orientation", sp.orientation, "sum or difference")->capture_default_str();
  spectra->add_option("--dnu", sp.dnu, "grid step, GHz")->capture_default_str();
  spectra->add_option("--filter-shape", sp.filter_shape)->capture_default_str();
  spectra->add_option("--filter-fwhm", sp.filter_fwhm, "GHz")->capture_default_str();
  spectra->add_option("--out-dir", sp.out_dir)->capture_default_str();

  cli::Table1Args t1;
  auto* table = app.add_subcommand("reproduce-table1", "theory + simulate + analyze for the comparison table");
  table->add_option("--duration", t1.duration, "simulated seconds per run")->capture_default_str();
  table->add_option("--seed", t1.seed)->capture_default_str();
  table->add_option("--out", t1.out, "also write the table here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*theory) return cli::cmd_theory(th);
    if (*simulate) return cli::cmd_simulate(sim);
    if (*analyze) return cli::cmd_analyze(an);
    if (*spectra) return cli::cmd_spectra(sp);
    if (*table) return cli::cmd_reproduce_table1(t1);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::kValidation: return 1;
      case ErrorKind::kIo: return 2;
      case ErrorKind::kFit: return 3;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
