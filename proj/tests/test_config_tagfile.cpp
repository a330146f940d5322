#include <doctest.h>

#include <random>
#include <sstream>

#include "qdspdc/config.hpp"
#include "qdspdc/errors.hpp"
#include "qdspdc/tagfile.hpp"

using namespace qdspdc;

TEST_CASE("config round trip") {
  ExperimentConfig c;
  c.t1 = 400.0;
  c.t2 = 300.0;
  c.seed = 77;
  c.polarization = Polarization::kParallel;
  c.spdc_filter_shape = FilterShape::kGaussian;
  c.spdc_filter_fwhm = 30.0;
  c.unheralded_qd = false;
  std::stringstream ss;
  write_config(c, ss);
  const auto d = parse_config(ss);
  CHECK(d.t1 == c.t1);
  CHECK(d.t2 == c.t2);
  CHECK(d.seed == 77);
  CHECK(d.polarization == Polarization::kParallel);
  CHECK(d.spdc_filter_shape == FilterShape::kGaussian);
  CHECK(d.spdc_filter_fwhm == 30.0);
  CHECK_FALSE(d.unheralded_qd);
  CHECK(d.emission_offset == c.emission_offset);
  CHECK(d.rep_period == c.rep_period);
}

TEST_CASE("config: comments, blanks and errors") {
  std::istringstream ok("# run\n\nt1 = 300\nduration=2\n");
  const auto c = parse_config(ok);
  CHECK(c.t1 == 300.0);
  CHECK(c.duration == 2.0);

  std::istringstream unknown("t1=300\nlifetime=5\n");
  try {
    parse_config(unknown);
    FAIL("no exception");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("lifetime") != std::string::npos);
  }
  std::istringstream bad("t1=abc\n");
  CHECK_THROWS_AS(parse_config(bad), ValidationError);
  std::istringstream nokv("t1\n");
  CHECK_THROWS_AS(parse_config(nokv), ValidationError);
  CHECK_THROWS_AS(load_config("/nonexistent/qd.cfg"), IoError);
}

TEST_CASE("config validation") {
  ExperimentConfig c;
  CHECK_NOTHROW(c.validate());
  c.t2 = 700.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.bin = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.qd_click_prob = 1.5;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.duration = 1.0;
  CHECK(c.periods() == static_cast<std::uint64_t>(1e12 / 12200.0));
}

TEST_CASE("tag stream round trip") {
  std::mt19937_64 rng(3);
  std::vector<TagRecord> recs(1000000);
  std::int64_t t = 0;
  for (auto& r : recs) {
    t += static_cast<std::int64_t>(rng() % 20000);
    r = {static_cast<std::uint8_t>(rng() % 4), t};
  }
  const TagHeader h{12200, 128};
  std::stringstream ss;
  write_tags(recs, h, ss);
  TagHeader back{};
  const auto got = read_tags(ss, &back);
  CHECK(back.rep_ps == 12200);
  CHECK(back.bin_ps == 128);
  REQUIRE(got.size() == recs.size());
  CHECK(got == recs);
}

TEST_CASE("tag reader reports truncation with the byte offset") {
  std::stringstream ss;
  write_tags({{0, 10}, {1, 20}}, {12200, 128}, ss);
  const std::string full = ss.str();
  const std::string cut = full.substr(0, full.size() - 1);
  const auto offset = static_cast<std::int64_t>(full.rfind('\n', full.size() - 2) + 1);
  std::istringstream in(cut);
  try {
    read_tags(in);
    FAIL("no exception");
  } catch (const IoError& e) {
    CHECK(e.byte_offset() == offset);
  }
}

TEST_CASE("tag reader: header only, bad header, malformed record") {
  std::stringstream ss;
  write_tags({}, {12200, 128}, ss);
  CHECK(read_tags(ss).empty());

  std::istringstream nohdr("0\t10\n");
  CHECK_THROWS_AS(read_tags(nohdr), IoError);

  std::stringstream bad;
  write_tags({{0, 10}}, {12200, 128}, bad);
  std::istringstream in(bad.str() + "7\t20\n");
  CHECK_THROWS_AS(read_tags(in), IoError);
}

TEST_CASE("tag reader counts non-monotone timestamps and streams in bounded batches") {
  std::stringstream ss;
  write_tags({{0, 10}, {1, 5}, {2, 30}}, {12200, 128}, ss);
  TagReader r(ss);
  std::vector<TagRecord> batch;
  std::size_t n = 0;
  while (r.read_batch(batch, 2)) {
    CHECK(batch.size() <= 2);
    n += batch.size();
  }
  CHECK(n == 3);
  CHECK(r.non_monotone() == 1);

  std::stringstream ss2;
  write_tags({{0, 10}, {1, 5}}, {12200, 128}, ss2);
  VectorSink sink;
  CHECK(stream_tags(ss2, sink) == 1);
  CHECK(sink.header.rep_ps == 12200);
  CHECK(sink.records.size() == 2);
}
