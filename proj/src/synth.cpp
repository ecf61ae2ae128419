#include "edgedist/synth.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>

#include <fmt/format.h>

#include "edgedist/random.hpp"

namespace edgedist::synth {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool close(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

std::string router_name(std::size_t i) { return fmt::format("r{:05}", i); }
std::string host_name(std::size_t i) { return fmt::format("h{:05}", i); }

}  // namespace

NodeId Topology::add_node(const std::string& name) {
  if (name.empty()) throw SynthError("empty node name");
  if (index_.count(name)) throw SynthError(fmt::format("duplicate node {}", name));
  const NodeId id = names_.size();
  names_.push_back(name);
  index_.emplace(name, id);
  out_.emplace_back();
  return id;
}

void Topology::add_arc(NodeId from, NodeId to, double latency) {
  if (from >= size() || to >= size()) throw SynthError("arc endpoint out of range");
  if (from == to) throw SynthError(fmt::format("self loop at {}", names_[from]));
  if (!(latency > 0.0) || !std::isfinite(latency))
    throw SynthError(fmt::format("latency {} on {}->{} must be positive", latency, names_[from], names_[to]));
  for (const Arc& a : out_[from])
    if (a.to == to) throw SynthError(fmt::format("duplicate arc {}->{}", names_[from], names_[to]));
  out_[from].push_back({to, latency});
}

void Topology::add_link(NodeId a, NodeId b, double latency_ab, double latency_ba) {
  add_arc(a, b, latency_ab);
  add_arc(b, a, latency_ba);
}

NodeId Topology::attach_host(const std::string& host, NodeId router, double latency) {
  const NodeId h = add_node(host);
  add_link(h, router, latency);
  set_attachment(h, router);
  return h;
}

void Topology::set_attachment(NodeId host, NodeId router) {
  if (host >= size() || router >= size()) throw SynthError("attachment out of range");
  if (is_host(router)) throw SynthError(fmt::format("{} is a host, not a router", names_[router]));
  if (out_[host].size() != 1 || out_[host][0].to != router)
    throw SynthError(fmt::format("host {} must have exactly one link, to {}", names_[host], names_[router]));
  attachment_[host] = router;
  if (std::find(access_.begin(), access_.end(), router) == access_.end()) access_.push_back(router);
}

std::optional<NodeId> Topology::find(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeId Topology::id(std::string_view name) const {
  if (auto n = find(name)) return *n;
  throw SynthError(fmt::format("unknown node {}", name));
}

std::optional<double> Topology::latency(NodeId from, NodeId to) const {
  for (const Arc& a : out_.at(from))
    if (a.to == to) return a.latency_ms;
  return std::nullopt;
}

NodeId Topology::access_router(NodeId host) const {
  auto it = attachment_.find(host);
  if (it == attachment_.end()) throw SynthError(fmt::format("{} is not a host", name(host)));
  return it->second;
}

std::vector<NodeId> Topology::hosts() const {
  std::vector<NodeId> out;
  for (const auto& [h, r] : attachment_) out.push_back(h);
  return out;
}

std::vector<NodeId> Topology::routers() const {
  std::vector<NodeId> out;
  for (NodeId i = 0; i < size(); ++i)
    if (!is_host(i)) out.push_back(i);
  return out;
}

bool Topology::strongly_connected() const {
  if (size() == 0) return true;
  auto reach = [&](bool reverse) {
    std::vector<std::vector<NodeId>> adj(size());
    for (NodeId u = 0; u < size(); ++u)
      for (const Arc& a : out_[u]) (reverse ? adj[a.to] : adj[u]).push_back(reverse ? u : a.to);
    std::vector<bool> seen(size(), false);
    std::vector<NodeId> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      for (NodeId v : adj[u])
        if (!seen[v]) {
          seen[v] = true;
          ++count;
          stack.push_back(v);
        }
    }
    return count == size();
  };
  return reach(false) && reach(true);
}

bool Topology::symmetric() const {
  for (NodeId u = 0; u < size(); ++u)
    for (const Arc& a : out_[u]) {
      auto back = latency(a.to, u);
      if (!back || *back != a.latency_ms) return false;
    }
  return true;
}

std::size_t Topology::link_count() const {
  std::size_t n = 0;
  for (const auto& arcs : out_) n += arcs.size();
  return n;
}

bool operator==(const Topology& x, const Topology& y) {
  if (x.seed != y.seed || x.names_ != y.names_ || x.attachment_ != y.attachment_ || x.access_ != y.access_)
    return false;
  for (NodeId u = 0; u < x.size(); ++u) {
    if (x.out_[u].size() != y.out_[u].size()) return false;
    for (std::size_t k = 0; k < x.out_[u].size(); ++k)
      if (x.out_[u][k].to != y.out_[u][k].to || x.out_[u][k].latency_ms != y.out_[u][k].latency_ms) return false;
  }
  return true;
}

std::string_view to_string(Model m) noexcept {
  switch (m) {
    case Model::ring_of_stars: return "ring_of_stars";
    case Model::random_geometric: return "random_geometric";
    case Model::two_tier: return "two_tier";
  }
  return "?";
}

std::optional<Model> parse_model(std::string_view text) noexcept {
  for (Model m : {Model::ring_of_stars, Model::random_geometric, Model::two_tier})
    if (to_string(m) == text) return m;
  return std::nullopt;
}

namespace {

void attach_hosts(Topology& topo, std::size_t per_access, Rng& rng) {
  if (per_access == 0) return;
  const std::vector<NodeId> access = topo.access_routers();
  std::size_t next = 0;
  for (NodeId r : access)
    for (std::size_t k = 0; k < per_access; ++k) topo.attach_host(host_name(next++), r, rng.uniform(0.1, 1.0));
}

Topology ring_of_stars(const TopologyParams& p, Rng& rng) {
  if (p.cores < 1) throw std::invalid_argument("ring_of_stars needs at least one core");
  if (p.cores + p.cores * p.leaves_per_core < 2) throw std::invalid_argument("ring_of_stars needs at least 2 nodes");
  Topology t;
  std::size_t next = 0;
  std::vector<NodeId> cores;
  for (std::size_t c = 0; c < p.cores; ++c) cores.push_back(t.add_node(router_name(next++)));
  if (p.cores == 2) t.add_link(cores[0], cores[1], rng.uniform(1.0, 10.0));
  if (p.cores >= 3)
    for (std::size_t c = 0; c < p.cores; ++c) t.add_link(cores[c], cores[(c + 1) % p.cores], rng.uniform(1.0, 10.0));
  for (NodeId core : cores)
    for (std::size_t l = 0; l < p.leaves_per_core; ++l) {
      const NodeId leaf = t.add_node(router_name(next++));
      t.add_link(core, leaf, rng.uniform(1.0, 10.0));
      t.mark_access(leaf);
    }
  return t;
}

Topology random_geometric(const TopologyParams& p, Rng& rng) {
  if (p.nodes < 2) throw std::invalid_argument("random_geometric needs at least 2 nodes");
  if (!(p.radius > 0.0)) throw std::invalid_argument("random_geometric needs radius > 0");
  Topology t;
  std::vector<std::pair<double, double>> pos;
  for (std::size_t i = 0; i < p.nodes; ++i) {
    t.add_node(router_name(i));
    const double x = rng.uniform01();
    pos.emplace_back(x, rng.uniform01());
  }
  for (std::size_t i = 0; i < p.nodes; ++i)
    for (std::size_t j = i + 1; j < p.nodes; ++j) {
      const double d = std::hypot(pos[i].first - pos[j].first, pos[i].second - pos[j].second);
      if (d <= p.radius) t.add_link(i, j, 1.0 + 50.0 * d);
    }
  for (std::size_t i = 0; i < p.nodes; ++i) t.mark_access(i);
  return t;
}

// Transit routers on a ring with random chords; every access router has one
// or two uplinks. Peering links between access routers come from their own
// stream so switching them on leaves the base graph unchanged.
Topology two_tier(const TopologyParams& p, Rng& rng, std::uint64_t peering_seed) {
  if (p.nodes < 3) throw std::invalid_argument("two_tier needs at least 3 nodes");
  const std::size_t transits = p.transits ? p.transits : std::max<std::size_t>(2, p.nodes / 10);
  if (transits >= p.nodes) throw std::invalid_argument("two_tier needs fewer transits than nodes");
  Topology t;
  for (std::size_t i = 0; i < p.nodes; ++i) t.add_node(router_name(i));
  if (transits == 2) t.add_link(0, 1, rng.uniform(5.0, 20.0));
  if (transits >= 3)
    for (std::size_t i = 0; i < transits; ++i) t.add_link(i, (i + 1) % transits, rng.uniform(5.0, 20.0));
  for (std::size_t i = 0; i < transits && transits > 3; ++i) {
    const std::size_t j = rng.index(transits);
    if (j != i && !t.latency(i, j)) t.add_link(i, j, rng.uniform(5.0, 20.0));
  }
  for (std::size_t a = transits; a < p.nodes; ++a) {
    const std::size_t up = rng.index(transits);
    t.add_link(a, up, rng.uniform(1.0, 5.0));
    if (rng.bernoulli(0.3)) {
      const std::size_t second = rng.index(transits);
      if (second != up) t.add_link(a, second, rng.uniform(1.0, 5.0));
    }
    t.mark_access(a);
  }
  if (p.dense_peering) {
    Rng peer(peering_seed);
    for (std::size_t a = transits; a < p.nodes; ++a)
      for (std::size_t b = a + 1; b < p.nodes; ++b) {
        const bool link = peer.bernoulli(p.peering_probability);
        const double lat = peer.uniform(1.0, 3.0);
        if (link && !t.latency(a, b)) t.add_link(a, b, lat);
      }
  }
  return t;
}

}  // namespace

Topology generate_topology(Model model, const TopologyParams& params, std::uint64_t seed) {
  if (params.peering_probability < 0.0 || params.peering_probability > 1.0)
    throw std::invalid_argument("peering probability outside [0,1]");
  for (std::size_t attempt = 0; attempt <= params.max_retries; ++attempt) {
    Rng rng(derive_seed(seed, fmt::format("topology:{}", attempt)));
    Topology t;
    switch (model) {
      case Model::ring_of_stars: t = ring_of_stars(params, rng); break;
      case Model::random_geometric: t = random_geometric(params, rng); break;
      case Model::two_tier: t = two_tier(params, rng, derive_seed(seed, fmt::format("peering:{}", attempt))); break;
    }
    if (!t.strongly_connected()) continue;
    attach_hosts(t, params.hosts_per_access, rng);
    t.seed = seed;
    return t;
  }
  throw SynthError(fmt::format("{} generation stayed disconnected after {} attempts", to_string(model),
                               params.max_retries + 1));
}

Topology line_topology(std::size_t routers, double latency_ms) {
  if (routers < 1) throw std::invalid_argument("line needs at least one router");
  Topology t;
  for (std::size_t i = 0; i < routers; ++i) {
    t.add_node(router_name(i));
    if (i > 0) t.add_link(i - 1, i, latency_ms);
  }
  t.attach_host(host_name(0), 0, latency_ms);
  t.attach_host(host_name(1), routers - 1, latency_ms);
  return t;
}

std::shared_ptr<const std::vector<double>> Routing::distances_to(NodeId target) const {
  const Topology& topo = *topo_;
  if (target >= topo.size()) throw SynthError("routing target out of range");
  {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(target);
    if (it != cache_.end()) return it->second;
  }
  std::vector<std::vector<Arc>> in(topo.size());
  for (NodeId u = 0; u < topo.size(); ++u)
    for (const Arc& a : topo.out(u)) in[a.to].push_back({u, a.latency_ms});

  auto dist = std::make_shared<std::vector<double>>(topo.size(), kInf);
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  (*dist)[target] = 0.0;
  heap.emplace(0.0, target);
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (d > (*dist)[v]) continue;
    for (const Arc& a : in[v]) {
      const double nd = d + a.latency_ms;
      if (nd < (*dist)[a.to]) {
        (*dist)[a.to] = nd;
        heap.emplace(nd, a.to);
      }
    }
  }
  std::lock_guard lock(mutex_);
  return cache_.emplace(target, std::move(dist)).first->second;
}

std::optional<NodeId> Routing::next_hop(NodeId from, NodeId target) const {
  if (from == target) return std::nullopt;
  const auto dist = distances_to(target);
  const double here = (*dist)[from];
  if (here == kInf) return std::nullopt;
  std::optional<NodeId> best;
  for (const Arc& a : topo_->out(from)) {
    const double via = a.latency_ms + (*dist)[a.to];
    if (!close(via, here)) continue;
    if (!best || topo_->name(a.to) < topo_->name(*best)) best = a.to;
  }
  return best;
}

std::optional<std::vector<NodeId>> Routing::route(NodeId from, NodeId to) const {
  std::vector<NodeId> path;
  NodeId at = from;
  while (at != to) {
    auto next = next_hop(at, to);
    if (!next) return std::nullopt;
    path.push_back(*next);
    at = *next;
    if (path.size() > topo_->size()) throw SynthError("routing loop");
  }
  return path;
}

Distance true_distance(const Routing& routing, NodeId a, NodeId b) {
  const Topology& topo = routing.topology();
  if (a >= topo.size() || b >= topo.size()) throw SynthError("node out of range");
  auto path = routing.route(a, b);
  if (!path) throw SynthError(fmt::format("{} unreachable from {}", topo.name(b), topo.name(a)));
  Distance d{path->size(), 0.0};
  NodeId at = a;
  for (NodeId next : *path) {
    d.one_way_latency_ms += *topo.latency(at, next);
    at = next;
  }
  return d;
}

Distance true_distance(const Topology& topo, NodeId a, NodeId b) { return true_distance(Routing(topo), a, b); }

std::size_t min_hop_distance(const Topology& topo, NodeId a, NodeId b) {
  if (a >= topo.size() || b >= topo.size()) throw SynthError("node out of range");
  std::vector<std::size_t> depth(topo.size(), std::numeric_limits<std::size_t>::max());
  std::deque<NodeId> queue{a};
  depth[a] = 0;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    if (u == b) return depth[u];
    for (const Arc& arc : topo.out(u))
      if (depth[arc.to] == std::numeric_limits<std::size_t>::max()) {
        depth[arc.to] = depth[u] + 1;
        queue.push_back(arc.to);
      }
  }
  throw SynthError(fmt::format("{} unreachable from {}", topo.name(b), topo.name(a)));
}

void SimOptions::validate() const {
  auto probability = [](double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(fmt::format("{} {} outside [0,1]", what, p));
  };
  probability(block_probability, "block probability");
  probability(asymmetry_fraction, "asymmetry fraction");
  probability(loop_injection, "loop injection");
  if (!(asymmetry_delta_ms >= 0.0) || !std::isfinite(asymmetry_delta_ms))
    throw std::invalid_argument("asymmetry delta must be non-negative");
  if (!(rtt_jitter_ms >= 0.0) || !std::isfinite(rtt_jitter_ms))
    throw std::invalid_argument("rtt jitter must be non-negative");
}

Simulator::Simulator(const Topology& topo, SimOptions options)
    : topo_(&topo), options_(options), routing_(topo), blocked_(topo.size(), false), asymmetry_(topo.size(), 0.0) {
  options_.validate();
  Rng rng(derive_seed(options_.seed, "nodes"));
  for (NodeId n = 0; n < topo.size(); ++n) {
    // Two draws per node regardless of kind keep assignments stable when
    // hosts are added.
    const bool block = rng.bernoulli(options_.block_probability);
    const bool asym = rng.bernoulli(options_.asymmetry_fraction);
    if (topo.is_host(n)) continue;
    blocked_[n] = block;
    if (asym) asymmetry_[n] = options_.asymmetry_delta_ms;
  }
}

SimTrace Simulator::trace(NodeId origin, NodeId target) const {
  const Topology& topo = *topo_;
  if (!topo.is_host(target)) throw std::invalid_argument(fmt::format("{} is not an attached host", topo.name(target)));
  if (origin >= topo.size()) throw std::invalid_argument("origin out of range");

  auto route = routing_.route(origin, target);
  if (!route || route->empty()) return {TracePath(topo.name(origin), topo.address(target), {}, false), {}};

  Rng rng(derive_seed(options_.seed, fmt::format("trace:{}>{}", topo.name(origin), topo.name(target))));

  // Forward prefix and the reverse latency back to the origin, the latter
  // summed from the origin's end so that symmetric paths give exactly twice
  // the forward latency.
  std::vector<HopTruth> truth;
  double forward = 0.0;
  NodeId at = origin;
  for (NodeId next : *route) {
    forward += *topo.latency(at, next);
    at = next;
    const auto back = routing_.route(next, origin);
    if (!back) return {TracePath(topo.name(origin), topo.address(target), {}, false), {}};
    std::vector<double> legs;
    NodeId from = next;
    for (NodeId b : *back) {
      legs.push_back(*topo.latency(from, b));
      from = b;
    }
    double reverse = 0.0;
    for (auto it = legs.rbegin(); it != legs.rend(); ++it) reverse += *it;
    HopTruth h{next, blocked_[next], asymmetry_[next], forward + reverse + asymmetry_[next], false, 0};
    truth.push_back(h);
  }

  // Loop: router hop p reappears right after hop p+1 and every later hop
  // pays for the extra p+1 -> p -> p+1 detour. The access router stays the
  // last hop before the destination.
  const std::size_t routers = truth.size() - 1;
  if (routers >= 3 && rng.bernoulli(options_.loop_injection)) {
    std::vector<std::size_t> candidates;
    for (std::size_t p = 1; p + 2 <= routers; ++p)
      if (!truth[p - 1].blocked) candidates.push_back(p);
    if (!candidates.empty()) {
      const std::size_t p = candidates[rng.index(candidates.size())];
      const NodeId x = truth[p - 1].node, y = truth[p].node;
      const double detour = *topo.latency(y, x) + *topo.latency(x, y);
      HopTruth copy = truth[p - 1];
      copy.loop_copy = true;
      copy.loop_of = p;
      copy.model_rtt_ms += detour;
      for (std::size_t k = p + 1; k < truth.size(); ++k) truth[k].model_rtt_ms += detour;
      truth.insert(truth.begin() + static_cast<std::ptrdiff_t>(p + 1), copy);
    }
  }

  std::vector<HopRecord> hops;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    HopRecord rec;
    rec.ttl = static_cast<int>(i + 1);
    const double jitter = options_.rtt_jitter_ms > 0.0 ? rng.uniform(-options_.rtt_jitter_ms, options_.rtt_jitter_ms) : 0.0;
    if (!truth[i].blocked) {
      rec.address = topo.address(truth[i].node);
      rec.rtt_ms = std::max(0.0, truth[i].model_rtt_ms + jitter);
    }
    hops.push_back(std::move(rec));
  }
  return {TracePath(topo.name(origin), topo.address(target), std::move(hops), true), std::move(truth)};
}

TracePath simulate_traceroute(const Topology& topo, NodeId origin, NodeId target, const SimOptions& options) {
  return Simulator(topo, options).trace(origin, target).path;
}

SegmentTruth segment_truth(const SimTrace& trace, std::size_t from, std::size_t to) {
  if (from > to || to > trace.truth.size()) throw std::invalid_argument("segment outside the trace");
  SegmentTruth out;
  std::vector<NodeId> seen;
  for (std::size_t pos = std::max<std::size_t>(from, 1); pos <= to; ++pos) {
    const HopTruth& h = trace.truth[pos - 1];
    if (h.blocked) continue;
    if (std::find(seen.begin(), seen.end(), h.node) != seen.end()) out.loop = true;
    seen.push_back(h.node);
  }
  double running = from == 0 ? 0.0 : trace.truth[from - 1].model_rtt_ms;
  for (std::size_t pos = from + 1; pos <= to; ++pos) {
    const HopTruth& h = trace.truth[pos - 1];
    if (h.blocked) continue;
    if (h.model_rtt_ms < running) out.rtt_decrease = true;
    running = std::max(running, h.model_rtt_ms);
  }
  return out;
}

}  // namespace edgedist::synth
