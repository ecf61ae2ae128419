#include <algorithm>
#include <cmath>
#include <tuple>
#include <unordered_map>

#include <fmt/format.h>

#include "edgedist/parallel.hpp"
#include "edgedist/random.hpp"
#include "edgedist/synth.hpp"

namespace edgedist::synth {

namespace {

bool below(double bound, double truth) { return bound < truth - 1e-9 * std::max(1.0, truth); }

// Distance endpoint position, from responsiveness truth alone.
std::size_t endpoint_position(const SimTrace& t, transit::EndpointMode mode) {
  const std::size_t n = t.truth.size();
  if (mode == transit::EndpointMode::host) return n;
  for (std::size_t pos = n - 1; pos >= 1; --pos)
    if (!t.truth[pos - 1].blocked) return pos;
  return n;
}

struct OracleVerdict {
  bool reached = false;
  bool transit = false;
  bool faulty = false;
  bool acceptable() const { return reached && transit && !faulty; }
};

// Predicts the validator's decision for one (pair, origin) from node
// identities and noise-free rtt components.
OracleVerdict oracle(const Topology& topo, const SimTrace* x, const SimTrace* y, const transit::Options& opt) {
  OracleVerdict v;
  if (!x || !y || !x->path.reached() || !y->path.reached()) return v;
  v.reached = true;
  if (y->path.destination() < x->path.destination()) std::swap(x, y);
  const std::size_t ea = endpoint_position(*x, opt.mode);
  const std::size_t eb = endpoint_position(*y, opt.mode);

  std::unordered_map<NodeId, std::size_t> deepest_a;
  for (std::size_t pos = 1; pos <= ea; ++pos)
    if (!x->truth[pos - 1].blocked) deepest_a[x->truth[pos - 1].node] = pos;
  std::optional<std::tuple<std::size_t, std::size_t, NodeId>> best;
  for (std::size_t pb = 1; pb <= eb; ++pb) {
    const HopTruth& h = y->truth[pb - 1];
    if (h.blocked) continue;
    auto it = deepest_a.find(h.node);
    if (it == deepest_a.end()) continue;
    const std::size_t pa = it->second;
    if (!best) {
      best = {pa, pb, h.node};
      continue;
    }
    const auto [ba, bb, bn] = *best;
    if (std::tuple(pa + pb, pa) > std::tuple(ba + bb, ba) ||
        (pa + pb == ba + bb && pa == ba && topo.name(h.node) < topo.name(bn)))
      best = {pa, pb, h.node};
  }
  std::size_t ta = 0, tb = 0;
  if (best) {
    ta = std::get<0>(*best);
    tb = std::get<1>(*best);
  } else if (!opt.allow_origin_fallback) {
    return v;
  }
  v.transit = true;
  v.faulty = segment_truth(*x, ta, ea).faulty() || segment_truth(*y, tb, eb).faulty();
  return v;
}

}  // namespace

std::vector<NodeId> pick_origins(const Topology& topo, std::size_t count, std::uint64_t seed) {
  std::vector<NodeId> pool = topo.routers();
  if (count > pool.size())
    throw std::invalid_argument(fmt::format("{} origins requested, {} routers available", count, pool.size()));
  Rng rng(derive_seed(seed, "origins"));
  for (std::size_t i = 0; i < count; ++i) std::swap(pool[i], pool[i + rng.index(pool.size() - i)]);
  pool.resize(count);
  return pool;
}

std::vector<std::pair<NodeId, NodeId>> pick_host_pairs(const Topology& topo, std::size_t count,
                                                       std::uint64_t seed) {
  const std::vector<NodeId> hosts = topo.hosts();
  const std::size_t possible = hosts.size() < 2 ? 0 : hosts.size() * (hosts.size() - 1) / 2;
  if (count > possible)
    throw std::invalid_argument(fmt::format("{} pairs requested, {} distinct host pairs exist", count, possible));
  Rng rng(derive_seed(seed, "pairs"));
  std::vector<std::pair<NodeId, NodeId>> out;
  std::vector<std::pair<NodeId, NodeId>> seen;
  while (out.size() < count) {
    NodeId a = hosts[rng.index(hosts.size())];
    NodeId b = hosts[rng.index(hosts.size())];
    if (a == b) continue;
    if (topo.name(b) < topo.name(a)) std::swap(a, b);
    if (std::find(seen.begin(), seen.end(), std::pair(a, b)) != seen.end()) continue;
    seen.emplace_back(a, b);
    out.emplace_back(a, b);
  }
  return out;
}

ExperimentReport run_experiment(const Topology& topo, const std::vector<NodeId>& origins,
                                const std::vector<std::pair<NodeId, NodeId>>& pairs,
                                const ExperimentOptions& options) {
  if (origins.empty()) throw std::invalid_argument("experiment needs at least one origin");
  for (NodeId o : origins)
    if (o >= topo.size()) throw std::invalid_argument("origin out of range");
  std::vector<NodeId> targets;
  for (const auto& [a, b] : pairs) {
    if (!topo.is_host(a) || !topo.is_host(b)) throw std::invalid_argument("pair endpoints must be hosts");
    targets.push_back(a);
    targets.push_back(b);
  }
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  const Simulator sim(topo, options.sim);
  const std::size_t per_origin = targets.size();
  std::vector<SimTrace> sims = parallel_map(origins.size() * per_origin, options.transit.threads, [&](std::size_t i) {
    return sim.trace(origins[i / per_origin], targets[i % per_origin]);
  });
  auto sim_of = [&](std::size_t origin_idx, NodeId target) -> const SimTrace* {
    auto it = std::lower_bound(targets.begin(), targets.end(), target);
    return &sims[origin_idx * per_origin + static_cast<std::size_t>(it - targets.begin())];
  };
  std::unordered_map<std::string, std::size_t> origin_index;
  for (std::size_t k = 0; k < origins.size(); ++k) origin_index.emplace(topo.name(origins[k]), k);

  ExperimentReport report;
  for (const SimTrace& s : sims) report.traces.push_back(s.path);
  std::vector<EndpointPair> endpoint_pairs;
  for (const auto& [a, b] : pairs) endpoint_pairs.push_back({topo.address(a), topo.address(b)});
  transit::BatchResult batch = transit::batch_estimate(transit::group_by_origin(report.traces), endpoint_pairs, options.transit);
  report.stats = batch.stats;

  const Routing& routing = sim.routing();
  const bool access = options.transit.mode == transit::EndpointMode::access_router;
  auto distance_node = [&](NodeId host) { return access ? topo.access_router(host) : host; };

  std::size_t acceptable = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const transit::PairOutcome& outcome = batch.outcomes[i];
    const NodeId ha = topo.id(outcome.pair.a.str());
    const NodeId hb = topo.id(outcome.pair.b.str());
    PairReport pr{outcome.pair, true_distance(routing, distance_node(ha), distance_node(hb)),
                  min_hop_distance(topo, distance_node(ha), distance_node(hb)),
                  std::nullopt, std::nullopt, false, false};
    if (outcome.best_hop) pr.best_hop = outcome.best_hop->hop_bound;
    if (outcome.best_rtt) pr.best_rtt_ms = outcome.best_rtt->rtt_bound_ms;

    for (const auto& [origin, est] : outcome.per_origin) {
      const std::size_t k = origin_index.at(origin);
      const SimTrace* sa = sim_of(k, ha);
      const SimTrace* sb = sim_of(k, hb);
      const OracleVerdict v = oracle(topo, sa, sb, options.transit);
      if (v.acceptable()) pr.oracle_acceptable = true;
      if (v.faulty) pr.injected_fault = true;
      if (v.reached && v.transit) {
        Confusion& c = report.confusion;
        if (v.faulty) ++(est ? c.faulty_accepted : c.faulty_rejected);
        else ++(est ? c.clean_accepted : c.clean_rejected);
      }
      if (!est) continue;
      // Soundness against the endpoints this estimate actually used.
      const PairEstimate& e = est.value();
      const SimTrace* ta = e.endpoint_a == sa->path.destination() ? sa : sb;
      const SimTrace* tb = ta == sa ? sb : sa;
      const NodeId ua = ta->truth[endpoint_position(*ta, options.transit.mode) - 1].node;
      const NodeId ub = tb->truth[endpoint_position(*tb, options.transit.mode) - 1].node;
      const Distance truth = true_distance(routing, ua, ub);
      if (e.hop_bound < static_cast<int>(min_hop_distance(topo, ua, ub)) ||
          below(e.rtt_bound_ms, 2.0 * truth.one_way_latency_ms))
        ++report.soundness_violations;
    }
    if (pr.oracle_acceptable) ++acceptable;
    if (pr.best_hop && pr.best_rtt_ms && *pr.best_hop == static_cast<int>(pr.truth.hops) &&
        !below(*pr.best_rtt_ms, 2.0 * pr.truth.one_way_latency_ms) &&
        !below(2.0 * pr.truth.one_way_latency_ms, *pr.best_rtt_ms))
      ++report.tightness_hits;
    report.pairs.push_back(std::move(pr));
  }
  report.oracle_acceptable_fraction =
      pairs.empty() ? 0.0 : static_cast<double>(acceptable) / static_cast<double>(pairs.size());
  report.outcomes = std::move(batch.outcomes);
  return report;
}

std::string format_report(const ExperimentReport& r) {
  std::string out = "# a\tb\ttrue_hops\ttrue_latency_ms\tmin_hops\tbest_hop\tbest_rtt_ms\toracle_acceptable\tinjected_fault\n";
  for (const PairReport& p : r.pairs) {
    out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n", p.pair.a.str(), p.pair.b.str(), p.truth.hops,
                       p.truth.one_way_latency_ms, p.min_hops,
                       p.best_hop ? fmt::format("{}", *p.best_hop) : "-",
                       p.best_rtt_ms ? fmt::format("{}", *p.best_rtt_ms) : "-", p.oracle_acceptable ? 1 : 0,
                       p.injected_fault ? 1 : 0);
  }
  out += fmt::format("# pairs={}\n", r.stats.total_pairs);
  out += fmt::format("# successful_pairs={}\n", r.stats.successful_pairs);
  out += fmt::format("# success_ratio={:.4f}\n", r.stats.success_ratio());
  out += fmt::format("# oracle_acceptable_fraction={:.4f}\n", r.oracle_acceptable_fraction);
  out += fmt::format("# soundness_violations={}\n", r.soundness_violations);
  out += fmt::format("# tightness_hits={}\n", r.tightness_hits);
  for (RejectKind k : kAllRejectKinds) {
    auto it = r.stats.rejections.find(k);
    out += fmt::format("# rejected_{}={}\n", to_string(k), it == r.stats.rejections.end() ? 0 : it->second);
  }
  const Confusion& c = r.confusion;
  out += fmt::format("# confusion_faulty_rejected={}\n", c.faulty_rejected);
  out += fmt::format("# confusion_faulty_accepted={}\n", c.faulty_accepted);
  out += fmt::format("# confusion_clean_rejected={}\n", c.clean_rejected);
  out += fmt::format("# confusion_clean_accepted={}\n", c.clean_accepted);
  return out;
}

}  // namespace edgedist::synth
