#pragma once

#include <optional>
#include <string>

namespace qdspdc::cli {

struct TheoryArgs {
  std::string preset = "stretcher7p7";
  std::optional<std::string> filter_shape;
  std::optional<double> filter_fwhm, qd_linewidth, t1, t2, pump;
  std::string csv;
};

struct SimulateArgs {
  std::string config;
  std::string out;
  std::optional<std::string> polarization;
  std::optional<unsigned long long> seed;
  std::optional<double> duration;
  int threads = 0;
};

struct AnalyzeArgs {
  std::string perp, par;
  int window_bins = 3;
  double window_threshold = 0.02;
  double jitter_fwhm = 240.0;
  std::string config;
  bool no_model = false;
  std::string report;
  std::string csv_dir;
};

struct SpectraArgs {
  double pump = 6.0;
  double pump_filtered = 10.0;
  double pm_bandwidth = 60.0;
  double asymmetry = 3.0;
  std::string orientation = "sum";
  double dnu = 1.0;
  std::string filter_shape = "gaussian";
  double filter_fwhm = 30.0;
  std::string out_dir = ".";
};

struct Table1Args {
  double duration = 4.0;
  unsigned long long seed = 1;
  std::string out;
};

int cmd_theory(const TheoryArgs& a);
int cmd_simulate(const SimulateArgs& a);
int cmd_analyze(const AnalyzeArgs& a);
int cmd_spectra(const SpectraArgs& a);
int cmd_reproduce_table1(const Table1Args& a);

}  // namespace qdspdc::cli
