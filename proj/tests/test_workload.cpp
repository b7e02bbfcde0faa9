#include <doctest.h>

#include <fstream>

#include "harness.hpp"
#include "oscmc/workload.hpp"

using namespace oscmc;

namespace {

std::vector<ResourceVector> nominal(std::size_t n) { return std::vector<ResourceVector>(n, {500, 512, 1000}); }

}  // namespace

TEST_CASE("synthetic usage stays within bounds") {
  WorkloadConfig c;
  SyntheticWorkload w(3, nominal(50), c);
  for (int t = 0; t < 200; ++t) {
    for (const auto& u : w.step(t)) {
      CHECK(u.cpu >= 500 * c.level_floor);
      CHECK(u.cpu <= 500 * c.level_cap);
      CHECK(u.mem <= 512 * c.level_cap);
      CHECK(u.bw <= 1000 * c.level_cap * c.burst_mult_hi);
      CHECK(u.non_negative());
    }
  }
}

TEST_CASE("synthetic stream is reproducible and seed dependent") {
  SyntheticWorkload a(9, nominal(10), {});
  SyntheticWorkload b(9, nominal(10), {});
  SyntheticWorkload c(10, nominal(10), {});
  bool differs = false;
  for (int t = 0; t < 20; ++t) {
    const auto x = a.step(t);
    CHECK(x == b.step(t));
    if (x != c.step(t)) differs = true;
  }
  CHECK(differs);
}

TEST_CASE("bursts are visible in bandwidth only") {
  WorkloadConfig c;
  c.burst_pct = 100.0;
  c.walk_sigma = 0.0;
  SyntheticWorkload bursty(1, nominal(20), c);
  c.burst_pct = 0.0;
  SyntheticWorkload calm(1, nominal(20), c);
  const auto b = bursty.step(0);
  const auto q = calm.step(0);
  for (std::size_t i = 0; i < b.size(); ++i) {
    CHECK(b[i].cpu == q[i].cpu);
    CHECK(b[i].bw >= q[i].bw * c.burst_mult_lo - 1e-9);
  }
}

TEST_CASE("steps must be taken in order") {
  SyntheticWorkload w(1, nominal(2), {});
  w.step(0);
  CHECK_THROWS_AS(w.step(2), std::logic_error);
}

TEST_CASE("schema trace with 100 good rows") {
  const auto set = ingest_trace(harness::data_dir() / "usage_100.csv");
  CHECK(set.rows == 100);
  CHECK(set.dropped == 0);
  CHECK(set.samples() == 100);
  CHECK(set.series.size() == 2);
  CHECK(set.series.at("vm-a").size() == 50);
}

TEST_CASE("malformed rows are dropped and counted") {
  const auto set = ingest_trace(harness::data_dir() / "usage_3_malformed.csv");
  CHECK(set.rows == 100);
  CHECK(set.dropped == 3);
  CHECK(set.samples() == 97);
}

TEST_CASE("unknown header column is named") {
  CHECK_THROWS_WITH_AS(ingest_trace(harness::data_dir() / "bad_header.csv"), doctest::Contains("cpu_usage"),
                       TraceFormatError);
}

TEST_CASE("missing header column is named") {
  const auto dir = harness::scratch_dir("trace_missing");
  {
    std::ofstream f(dir / "t.csv");
    f << "timestamp,vm_id,cpu_usage_mips,mem_usage_mb\n0,a,1,2\n";
  }
  CHECK_THROWS_WITH_AS(ingest_trace(dir / "t.csv"), "trace header: missing column 'net_bw_used'", TraceFormatError);
}

TEST_CASE("rows are averaged into five minute slots") {
  const auto dir = harness::scratch_dir("trace_resample");
  {
    std::ofstream f(dir / "t.csv");
    f << "timestamp,vm_id,cpu_usage_mips,mem_usage_mb,net_bw_used\n"
      << "0,a,10,10,10\n60,a,20,20,30\n300,a,5,5,5\n1200,a,7,7,7\n";
  }
  const auto set = ingest_trace(dir / "t.csv");
  const auto& s = set.series.at("a");
  REQUIRE(s.size() == 5);
  CHECK(s[0].cpu == 15.0);
  CHECK(s[0].bw == 20.0);
  CHECK(s[1].cpu == 5.0);
  CHECK(s[2].cpu == 5.0);  // forward filled
  CHECK(s[3].cpu == 5.0);
  CHECK(s[4].cpu == 7.0);
  CHECK(set.samples() == 4);
  CHECK(set.resampled() == 5);
}

TEST_CASE("bitbrains directory ingestion") {
  const auto set = ingest_traces(harness::data_dir() / "bitbrains");
  CHECK(set.series.size() == 2);
  CHECK(set.series.at("17").size() == 48);
  CHECK(set.series.at("23").size() == 20);
  CHECK(set.dropped == 1);
  CHECK(set.rows == 48 + 18);
  const auto& gap = set.series.at("23");
  CHECK(gap[10] == gap[9]);
  CHECK(gap[12] == gap[9]);
  for (const auto& [id, s] : set.series) {
    for (const auto& v : s) CHECK(v.non_negative());
  }
}

TEST_CASE("trace replay wraps and shares series") {
  TraceSet set;
  set.series["a"] = {{1, 1, 1}, {2, 2, 2}};
  set.series["b"] = {{5, 5, 5}};
  TraceWorkload w(set, 3);
  const auto t0 = w.step(0);
  CHECK(t0[0].cpu == 1.0);
  CHECK(t0[1].cpu == 5.0);
  CHECK(t0[2].cpu == 1.0);
  CHECK(w.step(3)[0].cpu == 2.0);
  CHECK_THROWS_AS(TraceWorkload(TraceSet{}, 2), TraceFormatError);
}

TEST_CASE("missing trace file") {
  CHECK_THROWS_WITH_AS(ingest_trace("/nonexistent/x.csv"), doctest::Contains("cannot open trace"), TraceFormatError);
}
