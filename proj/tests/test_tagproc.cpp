#include <doctest.h>

#include <random>

#include "qdspdc/errors.hpp"
#include "qdspdc/simkit.hpp"
#include "qdspdc/tagproc.hpp"

using namespace qdspdc;

namespace {

constexpr std::int64_t kRep = 12200;
constexpr std::int64_t kBin = 128;

std::vector<TagRecord> simulated(double duration, std::uint64_t seed = 21) {
  ExperimentConfig c;
  c.duration = duration;
  c.seed = seed;
  return simulate_to_vector(c);
}

}  // namespace

TEST_CASE("herald selection: doubles and triples") {
  const std::vector<TagRecord> s{
      {kHerald, 0 * kRep + 1500}, {kD1, 0 * kRep + 3100},                              // double on D1
      {kHerald, 2 * kRep + 1500}, {kD1, 2 * kRep + 3200}, {kD2, 2 * kRep + 3300},      // triple
      {kD2, 3 * kRep + 3000},                                                          // no herald
      {kHerald, 4 * kRep + 1500},                                                      // herald only
      {kHerald, 5 * kRep + 1500}, {kD2, 5 * kRep + 3000}, {kD2, 5 * kRep + 4000}};     // double on D2, first kept
  HeraldStats st;
  const auto ev = herald_select(s, kRep, &st);
  REQUIRE(ev.size() == 3);
  CHECK(ev[0].kind == EventKind::kDouble);
  CHECK(*ev[0].d1_micro == 3100);
  CHECK(ev[1].kind == EventKind::kTriple);
  CHECK(ev[1].macro_index == 2);
  CHECK(*ev[1].d2_micro == 3300);
  CHECK(ev[2].macro_index == 5);
  CHECK(*ev[2].d2_micro == 3000);
  CHECK_FALSE(ev[2].d1_micro.has_value());
  CHECK(ev[0].herald_ordinal == 0);
  CHECK(ev[1].herald_ordinal == 1);
  CHECK(ev[2].herald_ordinal == 3);
  CHECK(st.heralds == 4);
  CHECK(st.triples == 1);
  CHECK(st.doubles_d1 == 1);
  CHECK(st.doubles_d2 == 1);
  CHECK(st.records == s.size());
}

TEST_CASE("herald selection needs a repetition period") {
  HeraldSelector sel([](const HeraldedEvent&) {});
  CHECK_THROWS_AS(sel.begin(TagHeader{}), ValidationError);
  CHECK_THROWS_AS(herald_select({}, 0), ValidationError);
}

TEST_CASE("sync records set the period origin") {
  const std::vector<TagRecord> s{{kSync, 300}, {kHerald, 300 + kRep + 1500}, {kD1, 300 + kRep + 3000}};
  const auto ev = herald_select(s, kRep);
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].macro_index == 1);
  CHECK(*ev[0].d1_micro == 3000);
}

TEST_CASE("selection over a concatenated stream is the sum of its parts") {
  const auto v = simulated(0.2);
  // split on a period boundary
  const std::int64_t cut = (v[v.size() / 2].timestamp / kRep) * kRep;
  const auto mid = std::find_if(v.begin(), v.end(), [&](const TagRecord& r) { return r.timestamp >= cut; });
  const std::vector<TagRecord> a(v.begin(), mid), b(mid, v.end());
  HeraldStats sa, sb, sall;
  const auto ea = herald_select(a, kRep, &sa);
  const auto eb = herald_select(b, kRep, &sb);
  const auto eall = herald_select(v, kRep, &sall);
  sa.add(sb);
  CHECK(sa.heralds == sall.heralds);
  CHECK(sa.triples == sall.triples);
  CHECK(sa.doubles_d1 == sall.doubles_d1);
  CHECK(ea.size() + eb.size() == eall.size());

  auto ma = micro_histograms(ea, kRep, kBin);
  ma.add(micro_histograms(eb, kRep, kBin));
  const auto mall = micro_histograms(eall, kRep, kBin);
  CHECK(ma.d1_doubles.counts == mall.d1_doubles.counts);
  CHECK(ma.d2_triples.counts == mall.d2_triples.counts);
}

TEST_CASE("streaming accumulator matches the batch functions") {
  const auto v = simulated(0.2);
  RunAccumulator acc(kRep, kBin);
  acc.begin({kRep, kBin});
  for (std::size_t i = 0; i < v.size(); i += 777) acc.consume(v.data() + i, std::min<std::size_t>(777, v.size() - i));
  acc.end();
  const auto ev = herald_select(v, kRep);
  const auto pt = pseudo_time_histogram(ev, kRep, 6, kBin);
  CHECK(acc.pseudo().peaks.areas == pt.peaks.areas);
  CHECK(acc.pseudo().histogram.counts == pt.histogram.counts);
  CHECK(acc.micro().d1_doubles.counts == micro_histograms(ev, kRep, kBin).d1_doubles.counts);
}

TEST_CASE("pseudo-time: neighbouring heralds land one period apart") {
  std::vector<HeraldedEvent> ev(2);
  ev[0].herald_ordinal = 0;
  ev[0].macro_index = 10;
  ev[0].d1_micro = 3000;
  ev[1].herald_ordinal = 1;
  ev[1].macro_index = 5000;  // far away in real time
  ev[1].d2_micro = 3100;
  const auto r = pseudo_time_histogram(ev, kRep, 6, kBin);
  CHECK(r.peaks.areas[7] == 1);
  CHECK(r.histogram.total() == 1);
  CHECK(r.peaks.central() == 0.0);
}

TEST_CASE("time window: filter then histogram equals histogram restricted to the window") {
  const auto ev = herald_select(simulated(0.5), kRep);
  const auto m = micro_histograms(ev, kRep, kBin);
  const auto w = early_window(m, 3);
  WindowSelection d1only = w;
  d1only.d2_bins.clear();
  for (int b = 0; b < static_cast<int>(m.d2_triples.size()); ++b) d1only.d2_bins.push_back(b);
  const auto kept = time_window_filter(ev, d1only, kBin);
  const auto mk = micro_histograms(kept.kept, kRep, kBin);
  for (std::size_t b = 0; b < m.d1_triples.size(); ++b) {
    const bool in = std::find(w.d1_bins.begin(), w.d1_bins.end(), static_cast<int>(b)) != w.d1_bins.end();
    CHECK(mk.d1_triples.counts[b] == (in ? m.d1_triples.counts[b] : 0));
  }
  WindowSelection all;
  for (int b = 0; b < static_cast<int>(m.d1_triples.size()); ++b) all.d1_bins.push_back(b);
  all.d2_bins = all.d1_bins;
  const auto full = time_window_filter(ev, all, kBin);
  CHECK(full.selection_efficiency == 1.0);
  CHECK(full.total > 0);
  CHECK(w.d1_bins.size() == 3);
  CHECK_THROWS_AS(time_window_filter(ev, WindowSelection{}, kBin), ValidationError);
}

TEST_CASE("coalescence and its Poisson uncertainty") {
  const auto c = coalescence(1000.0, 610.0);
  CHECK(c.p == doctest::Approx(0.39));
  CHECK(c.sigma == doctest::Approx(0.0313).epsilon(0.005));
  // parametric bootstrap over the two Poisson areas
  std::mt19937_64 rng(9);
  std::poisson_distribution<int> perp(1000.0), par(610.0);
  double s = 0, s2 = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double p = coalescence(perp(rng), par(rng)).p;
    s += p;
    s2 += p * p;
  }
  const double sd = std::sqrt(s2 / n - (s / n) * (s / n));
  CHECK(std::abs(c.sigma / sd - 1.0) < 0.15);
  CHECK_THROWS_AS(coalescence(0.0, 5.0), ValidationError);
}

TEST_CASE("orthogonal central peak is half the side peaks") {
  ExperimentConfig c;
  c.duration = 1.0;
  c.seed = 5;
  RunAccumulator acc;
  simulate_run(c, acc);
  const auto& pk = acc.pseudo().peaks;
  const double central = pk.central();
  const double side = pk.side_mean();
  const double sigma = std::sqrt(central + 0.25 * pk.side_mean_sigma() * pk.side_mean_sigma());
  CHECK(central > 200.0);
  CHECK(std::abs(central - 0.5 * side) <= 3.0 * sigma);
}
