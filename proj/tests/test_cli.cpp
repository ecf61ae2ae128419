#include <doctest.h>

#include <fstream>
#include <sstream>

#include "edgedist/cli.hpp"
#include "edgedist/file_util.hpp"
#include "edgedist/ingest.hpp"
#include "edgedist/stats.hpp"
#include "support.hpp"

using namespace edgedist;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string put(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p.string();
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

// Five hosts 10.i.0.1 behind access routers 10.i.0.254, one origin, shared core.
// With `asymmetric` every access router answers faster than the core hop before it.
std::vector<TracePath> cluster_traces(bool asymmetric) {
  std::vector<TracePath> out;
  for (int i = 1; i <= 5; ++i) {
    const std::string acc = fmt::format("10.{}.0.254", i), host = fmt::format("10.{}.0.1", i);
    out.push_back(testing::trace("o", host, {{"192.0.2.1", 1}, {"192.0.2.2", 10}, {acc, asymmetric ? 5.0 : 11.0 + i}, {host, 20}}));
  }
  return out;
}

const char* kDb =
    "prefix,mask,city,country\n10.1.0.0,16,Berlin,DE\n10.2.0.0,16,Berlin,DE\n10.3.0.0,16,Berlin,DE\n"
    "10.4.0.0,16,Berlin,DE\n10.5.0.0,16,Berlin,DE\n";
const char* kReps =
    "prefix,mask,host\n10.1.0.0,16,10.1.0.1\n10.2.0.0,16,10.2.0.1\n10.3.0.0,16,10.3.0.1\n10.4.0.0,16,10.4.0.1\n"
    "10.5.0.0,16,10.5.0.1\n";

}  // namespace

TEST_CASE("ingest exit codes") {
  const auto dir = testing::temp_dir("cli-ingest");
  const auto clean = put(dir / "clean.txt", "traceroute to 10.0.0.2 (10.0.0.2)\n 1 10.0.0.1 1 ms\n 2 10.0.0.2 2 ms\n");
  const auto dirty = put(dir / "dirty.txt", "traceroute to 10.0.0.2 (10.0.0.2)\n 1 10.0.0.1 1 ms\n 2 junk\n");
  const auto out = (dir / "t.jsonl").string();

  const Run ok = invoke({"ingest", "--format", "traceroute-text", "--origin", "o", clean, "-o", out});
  CHECK(ok.code == cli::kExitOk);
  CHECK(ok.out == "parsed=1 skipped_blocks=0 skipped_lines=0 warnings=0\n");
  CHECK(ingest::read_canonical(fs::path(out)).size() == 1);

  const Run partial = invoke({"ingest", "--format", "traceroute-text", "--origin", "o", dirty, "-o", out});
  CHECK(partial.code == cli::kExitPartial);

  const auto missing_out = (dir / "never.jsonl").string();
  const Run fatal = invoke({"ingest", "--format", "traceroute-text", "--origin", "o", (dir / "nope.txt").string(), "-o", missing_out});
  CHECK(fatal.code == cli::kExitFatal);
  CHECK(fatal.err.find("error:") == 0);
  CHECK_FALSE(fs::exists(missing_out));

  CHECK(invoke({"ingest", "--format", "traceroute-text", clean, "-o", out}).code == cli::kExitFatal);  // no --origin
  CHECK(invoke({"bogus"}).code == cli::kExitFatal);
  CHECK(invoke({"--help"}).code == cli::kExitOk);
}

TEST_CASE("pairs over a region cluster") {
  const auto dir = testing::temp_dir("cli-pairs");
  const auto db = put(dir / "db.csv", kDb);
  const auto reps = put(dir / "reps.csv", kReps);
  const auto traces = (dir / "t.jsonl").string();
  ingest::write_canonical(cluster_traces(false), traces);
  const auto outcomes = (dir / "o.jsonl").string();

  const Run r = invoke({"pairs", traces, "--region", "Berlin,DE", "--db", db, "--representatives", reps, "-o", outcomes});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.rfind("pairs=10 successful=10 success_ratio=1.00\n", 0) == 0);
  CHECK(transit::read_outcomes(fs::path(outcomes)).size() == 10);

  const auto bad = (dir / "bad.jsonl").string();
  ingest::write_canonical(cluster_traces(true), bad);
  const Run rej = invoke({"pairs", bad, "--region", "Berlin", "--db", db, "--representatives", reps, "-o", outcomes});
  CHECK(rej.code == cli::kExitPartial);
  CHECK(rej.out.find("success_ratio=0.00") != std::string::npos);
  CHECK(rej.out.find("rejected AsymmetrySuspected 10 (100.0%)") != std::string::npos);

  const auto pairs = put(dir / "pairs.tsv", "10.1.0.1\t10.2.0.1\n10.3.0.1\t10.4.0.1\n");
  const Run explicit_pairs = invoke({"pairs", traces, "--pairs", pairs, "-o", outcomes});
  CHECK(explicit_pairs.out.rfind("pairs=2 successful=2", 0) == 0);

  const auto untouched = (dir / "untouched.jsonl").string();
  CHECK(invoke({"pairs", traces, "--pairs", pairs, "--random", "5", "-o", untouched}).code == cli::kExitFatal);
  CHECK_FALSE(fs::exists(untouched));
}

TEST_CASE("dist and handover") {
  const auto dir = testing::temp_dir("cli-dist");
  const auto db = put(dir / "db.csv", kDb);
  const auto reps = put(dir / "reps.csv", kReps);
  const auto traces = (dir / "t.jsonl").string();
  ingest::write_canonical(cluster_traces(false), traces);
  const auto outcomes = (dir / "o.jsonl").string();
  REQUIRE(invoke({"pairs", traces, "--region", "Berlin", "--db", db, "--representatives", reps, "-o", outcomes}).code == 0);

  const auto prefix = (dir / "d").string();
  const Run d = invoke({"dist", outcomes, "--baseline", outcomes, "--stability", "5:4", "-o", prefix});
  CHECK(d.code == cli::kExitOk);
  CHECK(d.out.find("compare hop mean_shift=0 ks=0") != std::string::npos);
  CHECK(d.out.find("stability hop_count subset=5 trials=4") != std::string::npos);
  CHECK(read_file(prefix + ".summary.txt") == d.out);
  const auto hop = stats::read_distribution(prefix + ".hop.tsv");
  CHECK(hop.n == 10);
  CHECK(invoke({"dist", outcomes, "--stability", "5", "-o", prefix}).code == cli::kExitFatal);

  const auto curve = (dir / "curve.tsv").string();
  const Run h = invoke({"handover", "--rtt", prefix + ".rtt.tsv", "-o", curve});
  CHECK(h.code == cli::kExitOk);
  CHECK(line_count(read_file(curve)) == 22);  // header plus 21 grid points
  CHECK(h.out.rfind("argmin_anticipation_ms=", 0) == 0);
  CHECK(read_file(curve + ".report.txt") == h.out);

  const auto table = put(dir / "persist.csv", "hop,persist_ratio\n2,0.8\n3,0.7\n4,0.6\n5,0.5\n6,0.4\n");
  const Run p = invoke({"handover", "--persistence", table, "--hops", prefix + ".hop.tsv"});
  CHECK(p.code == cli::kExitOk);
  CHECK(p.out.rfind("expected_persistence=", 0) == 0);

  // Delays far beyond the grid: the curve only falls, so no interior minimum.
  const auto slow = put(dir / "slow.tsv", "# metric=rtt_ms bin_width=5 n=1 mean=2000 std=0 excluded=0\n2000\t1\t1\t2000\n");
  const Run f = invoke({"handover", "--rtt", slow, "-o", curve});
  CHECK(f.out.find("flat_flag") != std::string::npos);

  CHECK(invoke({"handover", "--rtt", slow, "--grid", "0:100", "-o", curve}).code == cli::kExitFatal);
  CHECK(invoke({"handover", "--persistence", table}).code == cli::kExitFatal);
}

TEST_CASE("simulate is deterministic") {
  const auto dir = testing::temp_dir("cli-sim");
  auto run_once = [&](const std::string& tag) {
    const std::vector<std::string> args{"--seed", "9", "simulate", "--nodes", "60", "--pairs", "20", "--inject",
                                        "asymmetry=0.2,loops=0.1", "--outcomes-out", (dir / (tag + ".o")).string(),
                                        "--traces-out", (dir / (tag + ".t")).string(), "--topology-out",
                                        (dir / (tag + ".topo")).string()};
    return invoke(args);
  };
  const Run a = run_once("a");
  const Run b = run_once("b");
  CHECK(a.code == cli::kExitOk);
  CHECK(a.out == b.out);
  CHECK(a.out.find("# confusion_faulty_accepted=") != std::string::npos);
  for (const char* ext : {".o", ".t", ".topo"})
    CHECK(read_file(dir / (std::string("a") + ext)) == read_file(dir / (std::string("b") + ext)));

  // The saved topology reproduces the run.
  const Run c = invoke({"--seed", "9", "simulate", "--topology", (dir / "a.topo").string(), "--pairs", "20", "--inject",
                     "asymmetry=0.2,loops=0.1"});
  CHECK(c.out == a.out);

  const auto never = (dir / "never.o").string();
  CHECK(invoke({"simulate", "--inject", "asymmetry=2", "--outcomes-out", never}).code == cli::kExitFatal);
  CHECK(invoke({"simulate", "--inject", "wormholes=1"}).code == cli::kExitFatal);
  CHECK_FALSE(fs::exists(never));
}
