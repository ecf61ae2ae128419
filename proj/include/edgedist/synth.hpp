#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "edgedist/trace_model.hpp"
#include "edgedist/transit.hpp"

/// Synthetic topologies with known shortest paths, a traceroute simulator
/// with fault injection, and the end-to-end verification harness.
namespace edgedist::synth {

class SynthError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using NodeId = std::size_t;

struct Arc {
  NodeId to;
  double latency_ms;
};

/// Directed graph with per-direction link latencies. Hosts are ordinary
/// leaf nodes attached to one access router.
class Topology {
 public:
  NodeId add_node(const std::string& name);
  /// Adds arcs a->b and b->a.
  void add_link(NodeId a, NodeId b, double latency_ab, double latency_ba);
  void add_link(NodeId a, NodeId b, double latency) { add_link(a, b, latency, latency); }
  void add_arc(NodeId from, NodeId to, double latency);
  NodeId attach_host(const std::string& host, NodeId router, double latency);
  /// Records an existing leaf node as a host behind `router`.
  void set_attachment(NodeId host, NodeId router);

  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(NodeId id) const { return names_.at(id); }
  NodeAddress address(NodeId id) const { return NodeAddress(names_.at(id)); }
  std::optional<NodeId> find(std::string_view name) const;
  NodeId id(std::string_view name) const;

  const std::vector<Arc>& out(NodeId id) const { return out_.at(id); }
  std::optional<double> latency(NodeId from, NodeId to) const;

  bool is_host(NodeId id) const { return attachment_.count(id) != 0; }
  /// Access router of a host.
  NodeId access_router(NodeId host) const;
  const std::map<NodeId, NodeId>& attachments() const noexcept { return attachment_; }
  std::vector<NodeId> hosts() const;
  std::vector<NodeId> routers() const;
  /// Routers that carry hosts, or were marked as the access tier by the generator.
  const std::vector<NodeId>& access_routers() const noexcept { return access_; }
  void mark_access(NodeId router) { access_.push_back(router); }

  bool strongly_connected() const;
  bool symmetric() const;
  std::size_t link_count() const;

  std::uint64_t seed = 0;

  friend bool operator==(const Topology&, const Topology&);

 private:
  std::vector<std::string> names_;
  std::map<std::string, NodeId, std::less<>> index_;
  std::vector<std::vector<Arc>> out_;
  std::map<NodeId, NodeId> attachment_;
  std::vector<NodeId> access_;
};

enum class Model { ring_of_stars, random_geometric, two_tier };

std::string_view to_string(Model m) noexcept;
std::optional<Model> parse_model(std::string_view text) noexcept;

struct TopologyParams {
  // ring_of_stars
  std::size_t cores = 1;
  std::size_t leaves_per_core = 2;
  // random_geometric
  std::size_t nodes = 50;
  double radius = 0.25;
  // two_tier
  std::size_t transits = 0;  // 0 = max(2, nodes / 10)
  bool dense_peering = false;
  double peering_probability = 0.3;
  // all models
  std::size_t hosts_per_access = 0;
  std::size_t max_retries = 50;
};

/// Deterministic under seed; symmetric latencies. Disconnected draws are
/// regenerated up to max_retries times, then SynthError.
Topology generate_topology(Model model, const TopologyParams& params, std::uint64_t seed);

/// Scenario for the origin-on-path construction: routers in a line with
/// hosts on both ends, used by tests.
Topology line_topology(std::size_t routers, double latency_ms);

/// Destination-based shortest-latency routing. Distances to a destination
/// are computed once (Dijkstra on reversed arcs) and cached; the next hop
/// at a node is the neighbour on a shortest path with the smallest name.
class Routing {
 public:
  explicit Routing(const Topology& topo) : topo_(&topo) {}

  /// Shortest latency from every node to `target` (infinity if unreachable).
  std::shared_ptr<const std::vector<double>> distances_to(NodeId target) const;
  std::optional<NodeId> next_hop(NodeId from, NodeId target) const;
  /// Nodes after `from` up to and including `to`; empty when from == to,
  /// nullopt when unreachable.
  std::optional<std::vector<NodeId>> route(NodeId from, NodeId to) const;

  const Topology& topology() const noexcept { return *topo_; }

 private:
  const Topology* topo_;
  mutable std::mutex mutex_;
  mutable std::map<NodeId, std::shared_ptr<const std::vector<double>>> cache_;
};

struct Distance {
  std::size_t hops = 0;
  double one_way_latency_ms = 0.0;

  friend bool operator==(const Distance&, const Distance&) = default;
};

/// Shortest path by latency and the hop count of that path.
Distance true_distance(const Topology& topo, NodeId a, NodeId b);
Distance true_distance(const Routing& routing, NodeId a, NodeId b);
/// Minimum hop count over all paths (breadth-first).
std::size_t min_hop_distance(const Topology& topo, NodeId a, NodeId b);

struct SimOptions {
  double block_probability = 0.0;    // per router: never answers probes
  double asymmetry_fraction = 0.0;   // share of routers with an inflated reply path
  double asymmetry_delta_ms = 20.0;  // extra reply latency at those routers
  double loop_injection = 0.0;       // per trace: duplicate one hop further down
  double rtt_jitter_ms = 0.0;        // uniform half-width added to every rtt
  std::uint64_t seed = 0;

  void validate() const;
};

/// Ground truth for one simulated hop.
struct HopTruth {
  NodeId node;
  bool blocked = false;
  double asymmetry_ms = 0.0;  // extra reply latency applied
  double model_rtt_ms = 0.0;  // rtt before jitter
  bool loop_copy = false;     // injected duplicate of an earlier hop
  std::size_t loop_of = 0;    // position of the original when loop_copy
};

struct SimTrace {
  TracePath path;
  std::vector<HopTruth> truth;  // parallel to path.hops()
};

/// Node-level fault assignment (blocked and asymmetric routers), drawn once
/// from the options seed; per-trace randomness is split from it by
/// (origin, target) so results do not depend on evaluation order.
class Simulator {
 public:
  Simulator(const Topology& topo, SimOptions options);

  SimTrace trace(NodeId origin, NodeId target) const;

  const Routing& routing() const noexcept { return routing_; }
  const SimOptions& options() const noexcept { return options_; }
  bool blocked(NodeId n) const { return blocked_.at(n); }
  double asymmetry(NodeId n) const { return asymmetry_.at(n); }

 private:
  const Topology* topo_;
  SimOptions options_;
  Routing routing_;
  std::vector<bool> blocked_;
  std::vector<double> asymmetry_;
};

/// One-shot form. Hop i's cumulative rtt is the forward latency of the
/// first i route hops plus the shortest reverse latency back to the origin
/// (plus injected asymmetry and jitter).
TracePath simulate_traceroute(const Topology& topo, NodeId origin, NodeId target, const SimOptions& options);

/// Does the hop segment [from, to] of a simulated trace carry an injected
/// fault visible to the validator? Computed from the simulation components,
/// not from the measured rtts.
struct SegmentTruth {
  bool loop = false;
  bool rtt_decrease = false;
  bool faulty() const noexcept { return loop || rtt_decrease; }
};

SegmentTruth segment_truth(const SimTrace& trace, std::size_t from, std::size_t to);

struct ExperimentOptions {
  SimOptions sim;
  transit::Options transit;
};

struct PairReport {
  EndpointPair pair;
  Distance truth;            // between the distance endpoints
  std::size_t min_hops = 0;  // breadth-first lower bound
  std::optional<int> best_hop;
  std::optional<double> best_rtt_ms;
  bool oracle_acceptable = false;
  bool injected_fault = false;  // some origin's segments carry a fault
};

struct Confusion {
  // Rows: oracle says faulty / clean. Columns: validator rejected for
  // asymmetry or loop / did not.
  std::size_t faulty_rejected = 0;
  std::size_t faulty_accepted = 0;  // false accepts
  std::size_t clean_rejected = 0;
  std::size_t clean_accepted = 0;
};

struct ExperimentReport {
  std::vector<PairReport> pairs;
  transit::BatchStats stats;
  std::size_t soundness_violations = 0;  // per accepted (pair, origin) estimate
  std::size_t tightness_hits = 0;
  double oracle_acceptable_fraction = 0.0;
  Confusion confusion;
  std::vector<transit::PairOutcome> outcomes;
  std::vector<TracePath> traces;
};

/// Simulates every origin toward every pair endpoint, runs the batch
/// estimator and cross-checks each outcome against the topology oracle.
ExperimentReport run_experiment(const Topology& topo, const std::vector<NodeId>& origins,
                                const std::vector<std::pair<NodeId, NodeId>>& pairs,
                                const ExperimentOptions& options);

std::string format_report(const ExperimentReport& report);

/// Random distinct origins among routers and distinct host pairs.
std::vector<NodeId> pick_origins(const Topology& topo, std::size_t count, std::uint64_t seed);
std::vector<std::pair<NodeId, NodeId>> pick_host_pairs(const Topology& topo, std::size_t count,
                                                       std::uint64_t seed);

// Topology save/load: one JSON record per line (topology, node, link, attach).
std::string format_topology(const Topology& topo);
Topology parse_topology(std::string_view text);
Topology load_topology(const std::filesystem::path& path);

}  // namespace edgedist::synth
