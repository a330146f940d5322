#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qdspdc/config.hpp"
#include "qdspdc/fit.hpp"
#include "qdspdc/histogram.hpp"
#include "qdspdc/tagfile.hpp"

namespace qdspdc {

enum class EventKind { kDouble, kTriple };

struct HeraldedEvent {
  std::int64_t macro_index = 0;
  // Position of the herald among all heralded periods; the pseudo-time axis.
  std::uint64_t herald_ordinal = 0;
  EventKind kind = EventKind::kDouble;
  std::optional<std::int64_t> d1_micro, d2_micro;  // ps within the period
};

struct HeraldStats {
  std::uint64_t records = 0;
  std::uint64_t heralds = 0;
  std::uint64_t doubles_d1 = 0, doubles_d2 = 0, triples = 0;
  std::uint64_t non_monotone = 0;
  void add(const HeraldStats& o);
};

// Single pass over a sorted tag stream; emits doubles and triples.
class HeraldSelector : public TagSink {
 public:
  using Callback = std::function<void(const HeraldedEvent&)>;
  // rep_period <= 0 takes the period from the stream header.
  explicit HeraldSelector(Callback cb, std::int64_t rep_period = 0);

  void begin(const TagHeader& header) override;
  void consume(const TagRecord* records, std::size_t n) override;
  void end() override;
  const HeraldStats& stats() const { return stats_; }

 private:
  void close_period();
  Callback cb_;
  std::int64_t rep_ = 0, origin_ = 0;
  bool started_ = false, have_origin_ = false, open_ = false;
  std::int64_t cur_ = 0, last_ts_ = INT64_MIN;
  bool herald_ = false;
  std::optional<std::int64_t> d1_, d2_;
  HeraldStats stats_;
};

std::vector<HeraldedEvent> herald_select(const std::vector<TagRecord>& stream, std::int64_t rep_period,
                                         HeraldStats* stats = nullptr);

struct MicroHistograms {
  CoincidenceHistogram d1_doubles, d2_doubles, d1_triples, d2_triples;

  MicroHistograms() = default;
  MicroHistograms(std::int64_t rep_period, std::int64_t bin);
  void add(const HeraldedEvent& e);
  void add(const MicroHistograms& o);
};

MicroHistograms micro_histograms(const std::vector<HeraldedEvent>& events, std::int64_t rep_period, std::int64_t bin);

// Areas integrated over +-rep/2 around k*rep, k = -n..n.
struct PeakAreas {
  int n_side = 6;
  std::vector<std::uint64_t> areas;

  double central() const { return static_cast<double>(areas[static_cast<std::size_t>(n_side)]); }
  double side_mean() const;
  double side_mean_sigma() const;
  void add(const PeakAreas& o);
};

struct PseudoTimeResult {
  CoincidenceHistogram histogram;
  PeakAreas peaks;
};

// Incremental D2 - D1 correlation on the pseudo-time axis.
class PseudoTimeCorrelator {
 public:
  PseudoTimeCorrelator(std::int64_t rep_period, std::int64_t bin, int n_side = 6);
  void add(const HeraldedEvent& e);
  const PseudoTimeResult& result() const { return res_; }

 private:
  void pair(double delta);
  std::int64_t rep_;
  int n_side_;
  PseudoTimeResult res_;
  std::vector<HeraldedEvent> recent_;  // ring of the last events with clicks
};

PseudoTimeResult pseudo_time_histogram(const std::vector<HeraldedEvent>& events, std::int64_t rep_period,
                                       int n_side_peaks = 6, std::int64_t bin = 128);

struct WindowSelection {
  std::vector<int> d1_bins, d2_bins;  // micro-time bin indices
};

struct WindowResult {
  std::vector<HeraldedEvent> kept;
  std::uint64_t total = 0;
  double selection_efficiency = 0.0;
};

// Keeps triples whose micro-times fall in the respective windows.
WindowResult time_window_filter(const std::vector<HeraldedEvent>& events, const WindowSelection& w, std::int64_t bin);

// `n_bins` bins per detector starting at the first bin whose doubles count reaches
// `threshold` of the histogram maximum.
WindowSelection early_window(const MicroHistograms& m, int n_bins, double threshold = 0.02);

struct Coalescence {
  double p = 0.0;
  double sigma = 0.0;
};

// P_C = (A_perp - A_par) / A_perp with first-order Poisson propagation.
Coalescence coalescence(double a_perp, double a_par);

// Everything the analysis needs from one tag stream.
class RunAccumulator : public TagSink {
 public:
  RunAccumulator(std::int64_t rep_period = 0, std::int64_t bin = 0, int n_side = 6);

  void begin(const TagHeader& header) override;
  void consume(const TagRecord* records, std::size_t n) override;
  void end() override;

  std::int64_t rep_period() const { return rep_; }
  std::int64_t bin() const { return bin_; }
  const HeraldStats& stats() const { return selector_->stats(); }
  const MicroHistograms& micro() const { return micro_; }
  const PseudoTimeResult& pseudo() const { return corr_->result(); }
  const std::vector<HeraldedEvent>& triples() const { return triples_; }

 private:
  void on_event(const HeraldedEvent& e);
  std::int64_t rep_, bin_;
  int n_side_;
  std::unique_ptr<HeraldSelector> selector_;
  std::unique_ptr<PseudoTimeCorrelator> corr_;
  MicroHistograms micro_;
  std::vector<HeraldedEvent> triples_;
};

struct AnalysisOptions {
  int window_bins = 3;
  double window_threshold = 0.02;  // fraction of the micro-time peak marking the earliest photons
  double jitter_fwhm = 240.0;  // combined response of the two detectors
  bool fit = true;
  bool fit_separation = true;
  std::optional<ExperimentConfig> model;  // physics context: SPDC shape in the T1 fit, T2 fit
};

struct AnalysisReport {
  double a_perp = 0, a_par = 0;
  Coalescence raw;
  double t1 = NAN, sigma_t1 = NAN;
  double t2 = NAN, sigma_t2 = NAN;
  double interference = NAN, sigma_interference = NAN;
  double selection_efficiency = 0;
  double selection_efficiency_perp = 0, selection_efficiency_par = 0;
  double a_perp_filtered = 0, a_par_filtered = 0;
  Coalescence filtered;
  WindowSelection window;
  double side_mean_perp = 0, side_mean_par = 0, side_sigma_perp = 0, side_sigma_par = 0;
  HeraldStats perp_stats, par_stats;
  std::vector<std::string> warnings;
  std::optional<LifetimeFit> lifetime;
  std::optional<HomPeakFit> hom;
  CoincidenceHistogram central_perp, central_par, filtered_perp, filtered_par;
};

AnalysisReport analyze(const RunAccumulator& perp, const RunAccumulator& par, const AnalysisOptions& opt = {});
void write_report(const AnalysisReport& r, std::ostream& os, const ExperimentConfig* cfg = nullptr);

}  // namespace qdspdc
