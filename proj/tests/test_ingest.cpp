#include <doctest.h>

#include <fstream>
#include <sstream>

#include "edgedist/file_util.hpp"
#include "edgedist/ingest.hpp"
#include "edgedist/random.hpp"
#include "support.hpp"

using namespace edgedist;
using namespace edgedist::ingest;

TEST_CASE("minimum of probes per hop") {
  const auto r = parse_traceroute_text(
      "traceroute to 192.0.2.9 (192.0.2.9), 30 hops max, 60 byte packets\n"
      " 1  r1 (192.0.2.1)  1.5 ms  1.2 ms  1.9 ms\n"
      " 2  192.0.2.9 (192.0.2.9)  3.0 ms *  2.8 ms\n",
      "berlin-1");
  REQUIRE(r.traces.size() == 1);
  const TracePath& t = r.traces[0];
  CHECK(t.reached());
  CHECK(t.origin_id() == "berlin-1");
  CHECK(t.destination() == NodeAddress("192.0.2.9"));
  REQUIRE(t.size() == 2);
  CHECK(t.at(1).address == NodeAddress("192.0.2.1"));
  CHECK(t.at(1).rtt_ms == 1.2);
  CHECK(t.at(1).hostname == "r1");
  CHECK(t.at(2).address == NodeAddress("192.0.2.9"));
  CHECK(t.at(2).rtt_ms == 2.8);
  CHECK(r.report.clean());
}

TEST_CASE("all-star hop line is unresponsive") {
  const auto r = parse_traceroute_text(
      "traceroute to 10.0.0.9 (10.0.0.9)\n 1 10.0.0.1 1.0 ms\n 2 10.0.0.2 2.0 ms\n 3 * * *\n", "o");
  REQUIRE(r.traces.size() == 1);
  const HopRecord& h = r.traces[0].at(3);
  CHECK(h.ttl == 3);
  CHECK_FALSE(h.address);
  CHECK_FALSE(h.rtt_ms);
  CHECK_FALSE(r.traces[0].reached());
}

TEST_CASE("corrupt hop line in a 7-line file") {
  // Header plus six hop lines; ttl 3 is garbage and is skipped, leaving a
  // hole that is kept as an unresponsive hop.
  const std::string text =
      "traceroute to 10.0.0.6 (10.0.0.6), 30 hops max\n"
      " 1  10.0.0.1  0.5 ms  0.4 ms  0.6 ms\n"
      " 2  10.0.0.2  1.5 ms  1.4 ms  1.6 ms\n"
      " 3  10.0.0.3  ##garbled## ms\n"
      " 4  10.0.0.4  3.5 ms  3.4 ms  3.6 ms\n"
      " 5  10.0.0.5  4.5 ms  4.4 ms  4.6 ms\n"
      " 6  10.0.0.6  5.5 ms  5.4 ms  5.6 ms\n";
  const auto r = parse_traceroute_text(text, "o");
  REQUIRE(r.traces.size() == 1);
  CHECK(r.traces[0].size() == 6);
  CHECK(r.report.skipped_lines == 1);
  CHECK(r.report.parsed == 1);
  CHECK_FALSE(r.traces[0].at(3).responsive());
  CHECK(r.traces[0].at(4).rtt_ms == 3.4);
  CHECK(r.traces[0].reached());
}

TEST_CASE("hop line variants") {
  const auto r = parse_traceroute_text(
      "traceroute to host.example (10.0.0.9)\n"
      " 1  gw (10.0.0.1)  0.5ms  0.7ms\n"
      " 2  10.0.0.2  1.0 ms !H  1.1 ms\n"
      " 3  a (10.0.0.3)  2.0 ms  b (10.0.0.33)  2.5 ms\n"
      " 4  *  10.0.0.9  3.0 ms  *\n",
      "o");
  REQUIRE(r.traces.size() == 1);
  const TracePath& t = r.traces[0];
  CHECK(t.at(1).rtt_ms == 0.5);
  CHECK(t.at(2).rtt_ms == 1.0);
  CHECK(t.at(3).address == NodeAddress("10.0.0.3"));
  CHECK(t.at(4).address == NodeAddress("10.0.0.9"));
  CHECK(t.reached());
  CHECK(r.report.warnings.size() == 1);  // two responders at ttl 3
}

TEST_CASE("malformed header drops its block") {
  const auto r = parse_traceroute_text(
      "traceroute to\n 1 10.0.0.1 1 ms\n"
      "traceroute to 10.0.0.2 (10.0.0.2)\n 1 10.0.0.2 1 ms\n",
      "o");
  CHECK(r.traces.size() == 1);
  CHECK(r.report.skipped_blocks == 1);
  CHECK(r.report.skipped_lines == 0);
}

TEST_CASE("every input record is parsed or counted as skipped") {
  const auto r = parse_traceroute_text(
      "stray line\n"
      "traceroute to 10.0.0.2 (10.0.0.2)\n 1 10.0.0.1 1 ms\n 1 10.0.0.7 1 ms\n what\n 2 10.0.0.2 2 ms\n",
      "o");
  CHECK(r.report.parsed == 1);
  CHECK(r.report.skipped_lines == 3);
  CHECK(r.traces[0].size() == 2);
}

TEST_CASE("decimal separator is always a dot") {
  const auto r = parse_traceroute_text("traceroute to 10.0.0.2 (10.0.0.2)\n 1 10.0.0.2 1,5 ms\n", "o");
  CHECK(r.report.skipped_lines == 1);
}

namespace {

std::vector<TracePath> random_traces(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TracePath> out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t len = 1 + rng.index(12);
    std::vector<HopRecord> hops;
    double rtt = 0.0;
    for (std::size_t k = 0; k < len; ++k) {
      HopRecord h;
      h.ttl = static_cast<int>(k + 1);
      if (rng.bernoulli(0.85)) {
        h.address = NodeAddress(fmt::format("10.{}.{}.{}", rng.index(256), rng.index(256), rng.index(256)));
        if (rng.bernoulli(0.95)) h.rtt_ms = rtt += rng.uniform(0.0, 20.0);
        if (rng.bernoulli(0.2)) h.hostname = fmt::format("r{}.example", rng.index(1000));
      }
      hops.push_back(std::move(h));
    }
    const bool reached = hops.back().address && rng.bernoulli(0.7);
    const NodeAddress dest = reached ? *hops.back().address : NodeAddress("192.0.2." + std::to_string(rng.index(256)));
    std::optional<double> ts;
    if (rng.bernoulli(0.5)) ts = 1.16e9 + rng.uniform(0.0, 1e6);
    out.emplace_back(fmt::format("origin-{}", rng.index(5)), dest, std::move(hops), reached, ts);
  }
  return out;
}

}  // namespace

TEST_CASE("canonical round trip of 1000 generated traces") {
  const auto traces = random_traces(1000, 42);
  const auto dir = testing::temp_dir("ingest-roundtrip");
  write_canonical(traces, dir / "t.jsonl");
  CHECK(read_canonical(dir / "t.jsonl") == traces);

  write_canonical(traces, dir / "u.jsonl");
  CHECK(read_file(dir / "t.jsonl") == read_file(dir / "u.jsonl"));
}

TEST_CASE("canonical edge cases") {
  const auto dir = testing::temp_dir("ingest-edge");
  write_canonical({}, dir / "empty.jsonl");
  CHECK(read_file(dir / "empty.jsonl").empty());
  CHECK(read_canonical(dir / "empty.jsonl").empty());

  std::istringstream gap(
      R"({"origin_id":"o","destination":"b","reached":true,"timestamp":null,"hops":[[1,"a",1.0],[3,"b",2.0]]})"
      "\n");
  CHECK_THROWS_WITH_AS(read_canonical(gap), doctest::Contains("line 1"), IngestError);

  std::istringstream junk("{not json\n");
  CHECK_THROWS_AS(read_canonical(junk), IngestError);
  CHECK_THROWS_AS(read_canonical(dir / "missing.jsonl"), IoError);
}

TEST_CASE("parsed text round-trips through the canonical form") {
  const auto r = parse_traceroute_text(
      "traceroute to 10.0.0.3 (10.0.0.3)\n 1 gw (10.0.0.1) 1 ms\n 2 * * *\n 3 10.0.0.3 3 ms\n", "o");
  for (const auto& t : r.traces) CHECK(from_canonical_line(to_canonical_line(t)) == t);
}

namespace {

std::filesystem::path write_stub(const std::filesystem::path& dir) {
  const auto stub = dir / "stub.sh";
  std::ofstream(stub) << "#!/bin/sh\n"
                         "[ \"$1\" = \"10.9.9.9\" ] && exit 3\n"
                         "echo \"traceroute to $1 ($1), 30 hops max\"\n"
                         "echo \" 1  10.0.0.1  1.0 ms  0.9 ms  1.1 ms\"\n"
                         "echo \" 2  $1  2.0 ms  2.1 ms  1.9 ms\"\n";
  std::filesystem::permissions(stub, std::filesystem::perms::owner_all);
  return stub;
}

}  // namespace

TEST_CASE("probing through an external command") {
  const auto dir = testing::temp_dir("ingest-probe");
  const std::string tmpl = write_stub(dir).string() + " {target}";

  SUBCASE("one trace per target") {
    std::vector<NodeAddress> targets;
    for (int i = 1; i <= 10; ++i) targets.emplace_back("10.1.0." + std::to_string(i));
    const auto r = probe_external(tmpl, targets, "probe-origin");
    CHECK(r.report.parsed == 10);
    REQUIRE(r.traces.size() == 10);
    for (std::size_t i = 0; i < targets.size(); ++i) {
      CHECK(r.traces[i].destination() == targets[i]);
      CHECK(r.traces[i].reached());
      CHECK(r.traces[i].at(2).rtt_ms == 1.9);
      CHECK(r.traces[i].origin_id() == "probe-origin");
    }
  }
  SUBCASE("a failing target becomes a warning") {
    const auto r = probe_external(tmpl, {NodeAddress("10.1.0.1"), NodeAddress("10.9.9.9"), NodeAddress("10.1.0.3")}, "o");
    CHECK(r.traces.size() == 2);
    CHECK(r.report.warnings.size() == 1);
    CHECK(r.report.skipped_blocks == 1);
  }
  SUBCASE("bad templates fail before probing") {
    CHECK_THROWS_AS(probe_external("/nonexistent/traceroute {target}", {NodeAddress("a")}, "o"), IngestError);
    CHECK_THROWS_AS(probe_external(tmpl.substr(0, tmpl.size() - 9), {NodeAddress("a")}, "o"), std::invalid_argument);
    CHECK_THROWS_AS(probe_external(tmpl + " {target}", {NodeAddress("a")}, "o"), std::invalid_argument);
  }
}
