#include <doctest.h>

#include <set>

#include "edgedist/random.hpp"
#include "edgedist/synth.hpp"
#include "support.hpp"

using namespace edgedist;
using namespace edgedist::synth;

namespace {

// O - A - B with 1 ms links; B is a host behind A.
Topology three_line() {
  Topology t;
  const NodeId o = t.add_node("O"), a = t.add_node("A"), b = t.add_node("B");
  t.add_link(o, a, 1.0);
  t.add_link(a, b, 1.0);
  t.set_attachment(b, a);
  return t;
}

double mean_leaf_distance(const Topology& t) {
  const auto leaves = t.access_routers();
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < leaves.size(); ++i)
    for (std::size_t j = i + 1; j < leaves.size(); ++j, ++n) sum += true_distance(t, leaves[i], leaves[j]).hops;
  return sum / static_cast<double>(n);
}

}  // namespace

TEST_CASE("ring of stars") {
  const Topology t = generate_topology(Model::ring_of_stars, {.cores = 1, .leaves_per_core = 2}, 1);
  CHECK(t.size() == 3);
  CHECK(t.access_routers().size() == 2);
  CHECK(t.strongly_connected());
  CHECK(t.symmetric());

  const Topology big = generate_topology(Model::ring_of_stars, {.cores = 4, .leaves_per_core = 3, .hosts_per_access = 1}, 1);
  CHECK(big.size() == 4 + 12 + 12);
  CHECK(big.hosts().size() == 12);
  for (NodeId h : big.hosts()) CHECK(big.out(h).size() == 1);
}

TEST_CASE("generators are deterministic under seed") {
  for (Model m : {Model::ring_of_stars, Model::random_geometric, Model::two_tier}) {
    const TopologyParams p{.cores = 3, .leaves_per_core = 3, .nodes = 40, .radius = 0.3, .hosts_per_access = 1};
    const Topology a = generate_topology(m, p, 7);
    CHECK(a == generate_topology(m, p, 7));
    CHECK_FALSE(a == generate_topology(m, p, 8));
    CHECK(a.strongly_connected());
    CHECK(a.symmetric());
    CHECK(parse_model(to_string(m)) == m);
  }
  CHECK_FALSE(parse_model("mesh"));
  CHECK_THROWS_AS(generate_topology(Model::random_geometric, {.nodes = 60, .radius = 0.001, .max_retries = 3}, 1),
                  SynthError);
}

TEST_CASE("dense peering shortens leaf-to-leaf paths") {
  double sparse = 0.0, dense = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    sparse += mean_leaf_distance(generate_topology(Model::two_tier, {.nodes = 100}, seed));
    dense += mean_leaf_distance(generate_topology(Model::two_tier, {.nodes = 100, .dense_peering = true}, seed));
  }
  CHECK(dense < sparse);
}

TEST_CASE("true distance") {
  const Topology t = three_line();
  CHECK(true_distance(t, 0, 0) == Distance{0, 0.0});
  CHECK(true_distance(t, 0, 2) == Distance{2, 2.0});
  CHECK(min_hop_distance(t, 0, 2) == 2);
  CHECK(Routing(t).route(0, 2) == std::vector<NodeId>{1, 2});
  CHECK(Routing(t).route(1, 1)->empty());
}

TEST_CASE("shortest latencies agree with Bellman-Ford") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Topology t = generate_topology(Model::two_tier, {.nodes = 100, .hosts_per_access = 1}, seed);
    const Routing routing(t);
    Rng rng(seed);
    for (int q = 0; q < 10; ++q) {
      const NodeId src = rng.index(t.size());
      const auto oracle = testing::bellman_ford(t, src);
      for (NodeId dst = 0; dst < t.size(); ++dst) {
        const Distance d = true_distance(routing, src, dst);
        CHECK(d.one_way_latency_ms == doctest::Approx(oracle[dst]).epsilon(1e-12));
        CHECK(d.hops >= min_hop_distance(t, src, dst));
      }
    }
  }
}

TEST_CASE("simulated traceroute on a line") {
  const Topology t = three_line();
  const TracePath p = simulate_traceroute(t, 0, 2, {});
  REQUIRE(p.size() == 2);
  CHECK(p.at(1).address == NodeAddress("A"));
  CHECK(p.at(1).rtt_ms == 2.0);
  CHECK(p.at(2).address == NodeAddress("B"));
  CHECK(p.at(2).rtt_ms == 4.0);
  CHECK(p.reached());
  CHECK(p.origin_id() == "O");
}

TEST_CASE("blocked routers never answer") {
  const Topology t = line_topology(4, 1.0);
  const TracePath p = simulate_traceroute(t, 0, t.id("h00001"), {.block_probability = 1.0});
  CHECK_FALSE(p.at(1).responsive());
  CHECK(p.reached());  // hosts are not blocked
}

TEST_CASE("asymmetric reply paths") {
  const Topology t = line_topology(8, 1.0);
  const NodeId target = t.id("h00001");
  std::size_t seen = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    for (double delta : {1.5, 10.0}) {
      const Simulator sim(t, {.asymmetry_fraction = 0.5, .asymmetry_delta_ms = delta, .seed = seed});
      const SimTrace s = sim.trace(0, target);
      const std::size_t end = s.path.size();
      const auto verdict = transit::validate_beyond_transit(s.path, 0, end);
      CHECK(segment_truth(s, 0, end).rtt_decrease == verdict.has_value());
      if (delta < 2.0) CHECK_FALSE(verdict);
      if (verdict) {
        CHECK(verdict->kind == RejectKind::AsymmetrySuspected);
        ++seen;
      }
    }
  }
  CHECK(seen > 0);
}

TEST_CASE("rtt at the destination is twice the one-way latency") {
  const Topology t = generate_topology(Model::two_tier, {.nodes = 60, .hosts_per_access = 1}, 4);
  const Routing routing(t);
  const auto hosts = t.hosts();
  for (std::size_t i = 0; i < 20; ++i) {
    const NodeId o = t.routers()[i], h = hosts[i % hosts.size()];
    const TracePath p = simulate_traceroute(t, o, h, {});
    CHECK(*p.hops().back().rtt_ms == doctest::Approx(2.0 * true_distance(routing, o, h).one_way_latency_ms));
  }
}

TEST_CASE("loop injection duplicates a hop") {
  const Topology t = line_topology(6, 1.0);
  const Simulator sim(t, {.loop_injection = 1.0, .seed = 3});
  const SimTrace s = sim.trace(0, t.id("h00001"));
  std::size_t copies = 0;
  std::set<std::string> addrs;
  bool repeated = false;
  for (std::size_t i = 0; i < s.truth.size(); ++i) {
    copies += s.truth[i].loop_copy;
    if (s.path.hops()[i].address) repeated |= !addrs.insert(s.path.hops()[i].address->str()).second;
  }
  CHECK(copies == 1);
  CHECK(repeated);
  CHECK(segment_truth(s, 0, s.path.size()).loop);
  CHECK(s.truth[s.truth.size() - 2].node == t.access_router(t.id("h00001")));
}

TEST_CASE("simulation options are validated") {
  CHECK_THROWS_AS(SimOptions{.block_probability = 1.5}.validate(), std::invalid_argument);
  CHECK_THROWS_AS(SimOptions{.asymmetry_fraction = -0.1}.validate(), std::invalid_argument);
  CHECK_THROWS_AS(SimOptions{.rtt_jitter_ms = -1}.validate(), std::invalid_argument);
  CHECK_NOTHROW(SimOptions{}.validate());
}

TEST_CASE("clean 30-node experiment is sound") {
  const Topology t = generate_topology(Model::random_geometric, {.nodes = 30, .radius = 0.35, .hosts_per_access = 1}, 2);
  const auto report = run_experiment(t, pick_origins(t, 5, 1), pick_host_pairs(t, 40, 1), {});
  CHECK(report.pairs.size() == 40);
  CHECK(report.soundness_violations == 0);
  CHECK(report.confusion.faulty_accepted == 0);
  CHECK(report.stats.successful_pairs > 0);
}

TEST_CASE("success ratio tracks the oracle under 30% asymmetry") {
  const Topology t = generate_topology(Model::two_tier, {.nodes = 200, .hosts_per_access = 1}, 11);
  ExperimentOptions opt;
  opt.sim = {.asymmetry_fraction = 0.3, .seed = 5};
  const auto report = run_experiment(t, pick_origins(t, 5, 2), pick_host_pairs(t, 100, 2), opt);
  CHECK(std::abs(report.stats.success_ratio() - report.oracle_acceptable_fraction) <= 0.05);
  CHECK(report.confusion.faulty_accepted == 0);
  CHECK(report.confusion.clean_rejected == 0);

  const auto again = run_experiment(t, pick_origins(t, 5, 2), pick_host_pairs(t, 100, 2), opt);
  CHECK(format_report(again) == format_report(report));
}

TEST_CASE("topology files") {
  const Topology t = generate_topology(Model::two_tier, {.nodes = 40, .hosts_per_access = 2}, 3);
  const Topology back = parse_topology(format_topology(t));
  CHECK(back == t);
  CHECK(back.hosts() == t.hosts());
  CHECK(back.access_routers() == t.access_routers());
  CHECK(format_topology(back) == format_topology(t));
  CHECK_THROWS_AS(parse_topology("{\"record\":\"arc\",\"from\":\"x\",\"to\":\"y\",\"latency_ms\":1}\n"), SynthError);
}

TEST_CASE("pickers") {
  const Topology t = generate_topology(Model::two_tier, {.nodes = 50, .hosts_per_access = 1}, 3);
  const auto o = pick_origins(t, 5, 9);
  CHECK(o == pick_origins(t, 5, 9));
  CHECK(std::set<NodeId>(o.begin(), o.end()).size() == 5);
  for (NodeId n : o) CHECK_FALSE(t.is_host(n));
  for (auto [a, b] : pick_host_pairs(t, 30, 9)) {
    CHECK(a != b);
    CHECK(t.is_host(a));
    CHECK(t.is_host(b));
  }
}
