#include "qdspdc/tagproc.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "qdspdc/errors.hpp"

namespace qdspdc {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

void HeraldStats::add(const HeraldStats& o) {
  records += o.records;
  heralds += o.heralds;
  doubles_d1 += o.doubles_d1;
  doubles_d2 += o.doubles_d2;
  triples += o.triples;
  non_monotone += o.non_monotone;
}

HeraldSelector::HeraldSelector(Callback cb, std::int64_t rep_period) : cb_(std::move(cb)), rep_(rep_period) {}

void HeraldSelector::begin(const TagHeader& header) {
  if (rep_ <= 0) rep_ = header.rep_ps;
  if (rep_ <= 0) throw ValidationError("herald_select: no rep_period given and none in the stream header");
  started_ = true;
}

void HeraldSelector::close_period() {
  if (!open_) return;
  if (herald_) {
    const std::uint64_t ordinal = stats_.heralds++;
    if (d1_ || d2_) {
      HeraldedEvent e;
      e.macro_index = cur_;
      e.herald_ordinal = ordinal;
      e.d1_micro = d1_;
      e.d2_micro = d2_;
      e.kind = (d1_ && d2_) ? EventKind::kTriple : EventKind::kDouble;
      if (e.kind == EventKind::kTriple)
        ++stats_.triples;
      else if (d1_)
        ++stats_.doubles_d1;
      else
        ++stats_.doubles_d2;
      cb_(e);
    }
  }
  herald_ = false;
  d1_.reset();
  d2_.reset();
  open_ = false;
}

void HeraldSelector::consume(const TagRecord* records, std::size_t n) {
  if (!started_) begin(TagHeader{});
  for (std::size_t i = 0; i < n; ++i) {
    const TagRecord& r = records[i];
    ++stats_.records;
    if (r.timestamp < last_ts_) ++stats_.non_monotone;
    last_ts_ = r.timestamp;
    if (r.channel == kSync && !have_origin_) {
      const std::int64_t k = (r.timestamp + rep_ / 2) / rep_;
      origin_ = r.timestamp - k * rep_;
      have_origin_ = true;
    }
    const std::int64_t macro = floor_div(r.timestamp - origin_, rep_);
    if (!open_ || macro != cur_) {
      close_period();
      cur_ = macro;
      open_ = true;
    }
    const std::int64_t micro = r.timestamp - origin_ - macro * rep_;
    switch (r.channel) {
      case kHerald: herald_ = true; break;
      case kD1: if (!d1_) d1_ = micro; break;
      case kD2: if (!d2_) d2_ = micro; break;
      default: break;
    }
  }
}

void HeraldSelector::end() { close_period(); }

std::vector<HeraldedEvent> herald_select(const std::vector<TagRecord>& stream, std::int64_t rep_period,
                                         HeraldStats* stats) {
  std::vector<HeraldedEvent> out;
  HeraldSelector sel([&](const HeraldedEvent& e) { out.push_back(e); }, rep_period);
  sel.begin(TagHeader{rep_period, 0});
  sel.consume(stream.data(), stream.size());
  sel.end();
  if (stats) *stats = sel.stats();
  return out;
}

MicroHistograms::MicroHistograms(std::int64_t rep_period, std::int64_t bin) {
  require(rep_period > 0 && bin > 0, "micro histograms: bad period or bin");
  const auto nb = static_cast<std::size_t>((rep_period + bin - 1) / bin);
  const auto b = static_cast<double>(bin);
  d1_doubles = d2_doubles = d1_triples = d2_triples = CoincidenceHistogram(0.0, b, nb);
}

void MicroHistograms::add(const HeraldedEvent& e) {
  if (e.kind == EventKind::kTriple) {
    d1_triples.fill(static_cast<double>(*e.d1_micro));
    d2_triples.fill(static_cast<double>(*e.d2_micro));
  } else if (e.d1_micro) {
    d1_doubles.fill(static_cast<double>(*e.d1_micro));
  } else if (e.d2_micro) {
    d2_doubles.fill(static_cast<double>(*e.d2_micro));
  }
}

void MicroHistograms::add(const MicroHistograms& o) {
  d1_doubles.add(o.d1_doubles);
  d2_doubles.add(o.d2_doubles);
  d1_triples.add(o.d1_triples);
  d2_triples.add(o.d2_triples);
}

MicroHistograms micro_histograms(const std::vector<HeraldedEvent>& events, std::int64_t rep_period, std::int64_t bin) {
  MicroHistograms m(rep_period, bin);
  for (const auto& e : events) m.add(e);
  return m;
}

double PeakAreas::side_mean() const {
  double s = 0;
  for (int k = 1; k <= n_side; ++k)
    s += static_cast<double>(areas[static_cast<std::size_t>(n_side + k)] + areas[static_cast<std::size_t>(n_side - k)]);
  return s / (2.0 * n_side);
}

double PeakAreas::side_mean_sigma() const { return std::sqrt(side_mean() / (2.0 * n_side)); }

void PeakAreas::add(const PeakAreas& o) {
  require(o.n_side == n_side, "peak areas: different side-peak counts");
  for (std::size_t i = 0; i < areas.size(); ++i) areas[i] += o.areas[i];
}

PseudoTimeCorrelator::PseudoTimeCorrelator(std::int64_t rep_period, std::int64_t bin, int n_side)
    : rep_(rep_period), n_side_(n_side) {
  require(rep_period > 0 && bin > 0 && n_side >= 0, "pseudo-time: bad parameters");
  const auto b = static_cast<double>(bin);
  const auto j = static_cast<std::size_t>(std::ceil((n_side + 0.5) * static_cast<double>(rep_period) / b));
  res_.histogram = CoincidenceHistogram(-(static_cast<double>(j) + 0.5) * b, b, 2 * j + 1);
  res_.peaks.n_side = n_side;
  res_.peaks.areas.assign(static_cast<std::size_t>(2 * n_side + 1), 0);
}

void PseudoTimeCorrelator::pair(double delta) {
  res_.histogram.fill(delta);
  const auto k = static_cast<long>(std::llround(delta / static_cast<double>(rep_)));
  if (std::abs(k) <= n_side_) ++res_.peaks.areas[static_cast<std::size_t>(k + n_side_)];
}

void PseudoTimeCorrelator::add(const HeraldedEvent& e) {
  const auto rep = static_cast<double>(rep_);
  const auto reach = static_cast<std::uint64_t>(n_side_ + 1);
  std::erase_if(recent_, [&](const HeraldedEvent& f) { return f.herald_ordinal + reach < e.herald_ordinal; });
  for (const auto& f : recent_) {
    const double dk = static_cast<double>(e.herald_ordinal - f.herald_ordinal);
    if (e.d2_micro && f.d1_micro) pair(dk * rep + static_cast<double>(*e.d2_micro - *f.d1_micro));
    if (e.d1_micro && f.d2_micro) pair(-dk * rep + static_cast<double>(*f.d2_micro - *e.d1_micro));
  }
  if (e.d1_micro && e.d2_micro) pair(static_cast<double>(*e.d2_micro - *e.d1_micro));
  recent_.push_back(e);
}

PseudoTimeResult pseudo_time_histogram(const std::vector<HeraldedEvent>& events, std::int64_t rep_period, int n_side,
                                       std::int64_t bin) {
  PseudoTimeCorrelator c(rep_period, bin, n_side);
  for (const auto& e : events) c.add(e);
  return c.result();
}

WindowResult time_window_filter(const std::vector<HeraldedEvent>& events, const WindowSelection& w, std::int64_t bin) {
  require(!w.d1_bins.empty() && !w.d2_bins.empty(), "time_window_filter: empty window");
  require(bin > 0, "time_window_filter: bin must be positive");
  WindowResult r;
  auto in = [&](const std::vector<int>& bins, std::int64_t micro) {
    const auto b = static_cast<int>(micro / bin);
    return std::find(bins.begin(), bins.end(), b) != bins.end();
  };
  for (const auto& e : events) {
    if (e.kind != EventKind::kTriple) continue;
    ++r.total;
    if (in(w.d1_bins, *e.d1_micro) && in(w.d2_bins, *e.d2_micro)) r.kept.push_back(e);
  }
  r.selection_efficiency = r.total ? static_cast<double>(r.kept.size()) / static_cast<double>(r.total) : 0.0;
  return r;
}

WindowSelection early_window(const MicroHistograms& m, int n_bins, double threshold) {
  require(n_bins > 0, "early_window: need at least one bin");
  auto pick = [&](const CoincidenceHistogram& h) {
    const auto mx = *std::max_element(h.counts.begin(), h.counts.end());
    require(mx > 0, "early_window: empty micro-time histogram");
    std::size_t start = 0;
    while (static_cast<double>(h.counts[start]) < threshold * static_cast<double>(mx)) ++start;
    std::vector<int> bins;
    for (int k = 0; k < n_bins && start + static_cast<std::size_t>(k) < h.size(); ++k)
      bins.push_back(static_cast<int>(start) + k);
    return bins;
  };
  return {pick(m.d1_doubles), pick(m.d2_doubles)};
}

Coalescence coalescence(double a_perp, double a_par) {
  if (!(a_perp > 0.0)) throw ValidationError("coalescence: A_perp = 0, P_C undefined");
  require(a_par >= 0.0, "coalescence: negative area");
  const double p = (a_perp - a_par) / a_perp;
  // dP/dA_par = -1/A_perp, dP/dA_perp = A_par/A_perp^2
  const double var = a_par / (a_perp * a_perp) + a_par * a_par / (a_perp * a_perp * a_perp);
  return {p, std::sqrt(var)};
}

RunAccumulator::RunAccumulator(std::int64_t rep_period, std::int64_t bin, int n_side)
    : rep_(rep_period), bin_(bin), n_side_(n_side) {
  selector_ = std::make_unique<HeraldSelector>([this](const HeraldedEvent& e) { on_event(e); }, rep_period);
}

void RunAccumulator::begin(const TagHeader& header) {
  if (rep_ <= 0) rep_ = header.rep_ps;
  if (bin_ <= 0) bin_ = header.bin_ps;
  require(rep_ > 0, "analysis: no rep_period");
  require(bin_ > 0, "analysis: no bin width");
  selector_->begin({rep_, bin_});
  micro_ = MicroHistograms(rep_, bin_);
  corr_ = std::make_unique<PseudoTimeCorrelator>(rep_, bin_, n_side_);
}

void RunAccumulator::consume(const TagRecord* records, std::size_t n) {
  if (!corr_) begin(TagHeader{});
  selector_->consume(records, n);
}

void RunAccumulator::end() {
  if (!corr_) begin(TagHeader{});
  selector_->end();
}

void RunAccumulator::on_event(const HeraldedEvent& e) {
  micro_.add(e);
  corr_->add(e);
  if (e.kind == EventKind::kTriple) triples_.push_back(e);
}

namespace {

CoincidenceHistogram tau_histogram(const std::vector<HeraldedEvent>& triples, const CoincidenceHistogram& like) {
  CoincidenceHistogram h = like;
  std::fill(h.counts.begin(), h.counts.end(), 0);
  for (const auto& e : triples) h.fill(static_cast<double>(*e.d2_micro - *e.d1_micro));
  return h;
}

}  // namespace

AnalysisReport analyze(const RunAccumulator& perp, const RunAccumulator& par, const AnalysisOptions& opt) {
  require(perp.rep_period() == par.rep_period() && perp.bin() == par.bin(),
          "analyze: the two runs use different periods or bins");
  const auto rep = static_cast<double>(perp.rep_period());
  AnalysisReport r;
  r.perp_stats = perp.stats();
  r.par_stats = par.stats();
  if (r.perp_stats.non_monotone) r.warnings.push_back("orthogonal stream has non-monotone timestamps");
  if (r.par_stats.non_monotone) r.warnings.push_back("parallel stream has non-monotone timestamps");
  r.a_perp = perp.pseudo().peaks.central();
  r.a_par = par.pseudo().peaks.central();
  r.raw = coalescence(r.a_perp, r.a_par);
  r.side_mean_perp = perp.pseudo().peaks.side_mean();
  r.side_mean_par = par.pseudo().peaks.side_mean();
  r.side_sigma_perp = perp.pseudo().peaks.side_mean_sigma();
  r.side_sigma_par = par.pseudo().peaks.side_mean_sigma();
  r.central_perp = perp.pseudo().histogram.slice(-0.5 * rep, 0.5 * rep);
  r.central_par = par.pseudo().histogram.slice(-0.5 * rep, 0.5 * rep);

  MicroHistograms both = perp.micro();
  both.add(par.micro());
  r.window = early_window(both, opt.window_bins, opt.window_threshold);
  const auto fp = time_window_filter(perp.triples(), r.window, perp.bin());
  const auto fq = time_window_filter(par.triples(), r.window, par.bin());
  r.a_perp_filtered = static_cast<double>(fp.kept.size());
  r.a_par_filtered = static_cast<double>(fq.kept.size());
  r.selection_efficiency_perp = fp.selection_efficiency;
  r.selection_efficiency_par = fq.selection_efficiency;
  const auto tot = fp.total + fq.total;
  r.selection_efficiency = tot ? (r.a_perp_filtered + r.a_par_filtered) / static_cast<double>(tot) : 0.0;
  r.filtered_perp = tau_histogram(fp.kept, r.central_perp);
  r.filtered_par = tau_histogram(fq.kept, r.central_par);
  if (r.a_perp_filtered > 0)
    r.filtered = coalescence(r.a_perp_filtered, r.a_par_filtered);
  else
    r.warnings.push_back("no orthogonal triples inside the time window");

  if (opt.fit) {
    std::optional<HomFitContext> ctx;
    if (opt.model) ctx = HomFitContext::from_config(*opt.model);
    LifetimeFitOptions lo;
    lo.fit_separation = opt.fit_separation;
    if (ctx) lo.arrival_kernel = ctx->spdc_intensity();
    r.lifetime = fit_lifetime(r.central_perp, opt.jitter_fwhm, static_cast<double>(perp.bin()), lo);
    r.t1 = r.lifetime->t1;
    r.sigma_t1 = r.lifetime->sigma_t1;
    if (ctx) {
      r.hom = fit_hom_peak(r.central_perp, r.central_par, r.t1, opt.jitter_fwhm, *ctx);
      r.t2 = r.hom->t2;
      r.sigma_t2 = r.hom->sigma_t2;
      r.interference = r.hom->interference;
      r.sigma_interference = r.hom->sigma_interference;
    }
  }
  return r;
}

void write_report(const AnalysisReport& r, std::ostream& os, const ExperimentConfig* cfg) {
  const auto prec = os.precision(10);
  auto bins = [](const std::vector<int>& v) {
    std::ostringstream s;
    for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
    return s.str();
  };
  os << "A_perp=" << r.a_perp << '\n'
     << "A_par=" << r.a_par << '\n'
     << "P_C=" << r.raw.p << '\n'
     << "sigma_P_C=" << r.raw.sigma << '\n'
     << "T1_ps=" << r.t1 << '\n'
     << "sigma_T1_ps=" << r.sigma_t1 << '\n'
     << "T2_ps=" << r.t2 << '\n'
     << "sigma_T2_ps=" << r.sigma_t2 << '\n'
     << "interference_amplitude=" << r.interference << '\n'
     << "sigma_interference_amplitude=" << r.sigma_interference << '\n'
     << "selection_efficiency=" << r.selection_efficiency << '\n'
     << "A_perp_filtered=" << r.a_perp_filtered << '\n'
     << "A_par_filtered=" << r.a_par_filtered << '\n'
     << "P_C_filtered=" << r.filtered.p << '\n'
     << "sigma_P_C_filtered=" << r.filtered.sigma << '\n'
     << "window_bins_d1=" << bins(r.window.d1_bins) << '\n'
     << "window_bins_d2=" << bins(r.window.d2_bins) << '\n'
     << "side_mean_perp=" << r.side_mean_perp << '\n'
     << "side_mean_par=" << r.side_mean_par << '\n'
     << "heralds_perp=" << r.perp_stats.heralds << '\n'
     << "heralds_par=" << r.par_stats.heralds << '\n'
     << "triples_perp=" << r.perp_stats.triples << '\n'
     << "triples_par=" << r.par_stats.triples << '\n'
     << "doubles_perp=" << r.perp_stats.doubles_d1 + r.perp_stats.doubles_d2 << '\n'
     << "doubles_par=" << r.par_stats.doubles_d1 + r.par_stats.doubles_d2 << '\n';
  for (const auto& w : r.warnings) os << "warning=" << w << '\n';
  if (cfg) {
    std::ostringstream c;
    write_config(*cfg, c);
    std::istringstream in(c.str());
    std::string line;
    while (std::getline(in, line)) os << "config." << line << '\n';
  }
  os.precision(prec);
}

}  // namespace qdspdc
