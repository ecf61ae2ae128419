#include "edgedist/transit.hpp"

#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include "edgedist/parallel.hpp"

namespace edgedist::transit {

std::string_view to_string(EndpointMode mode) noexcept {
  return mode == EndpointMode::host ? "host" : "access_router";
}

std::optional<EndpointMode> parse_endpoint_mode(std::string_view text) noexcept {
  if (text == "host") return EndpointMode::host;
  if (text == "access_router") return EndpointMode::access_router;
  return std::nullopt;
}

namespace {

RejectReason unreachable(const TracePath& t) {
  return {RejectKind::UnreachableDestination,
          fmt::format("{} not reached from {}", t.destination().str(), t.origin_id())};
}

void require_same_origin(const TracePath& a, const TracePath& b) {
  if (a.origin_id() != b.origin_id())
    throw std::invalid_argument(
        fmt::format("traces from different origins ({} vs {})", a.origin_id(), b.origin_id()));
}

}  // namespace

Outcome<std::size_t> endpoint_of(const TracePath& trace, EndpointMode mode) {
  if (!trace.reached()) return unreachable(trace);
  const std::size_t n = trace.size();
  if (mode == EndpointMode::host) return n;
  for (std::size_t pos = n - 1; pos >= 1; --pos)
    if (trace.at(pos).responsive()) return pos;
  return n;
}

Outcome<TransitPoint> last_common_hop(const TracePath& path_a, const TracePath& path_b,
                                      bool allow_origin_fallback, std::size_t limit_a,
                                      std::size_t limit_b) {
  require_same_origin(path_a, path_b);
  if (!path_a.reached()) return unreachable(path_a);
  if (!path_b.reached()) return unreachable(path_b);

  // Deepest position of every responsive address in A.
  std::unordered_map<std::string_view, std::size_t> in_a;
  const std::size_t end_a = std::min(limit_a, path_a.size());
  for (std::size_t pos = 1; pos <= end_a; ++pos) {
    const HopRecord& h = path_a.at(pos);
    if (h.address) in_a[h.address->str()] = pos;
  }

  std::optional<TransitPoint> best;
  const std::size_t end_b = std::min(limit_b, path_b.size());
  for (std::size_t pos_b = 1; pos_b <= end_b; ++pos_b) {
    const HopRecord& h = path_b.at(pos_b);
    if (!h.address) continue;
    auto it = in_a.find(h.address->str());
    if (it == in_a.end()) continue;
    const std::size_t pos_a = it->second;
    const bool better =
        !best || std::tuple(pos_a + pos_b, pos_a) > std::tuple(best->index_a + best->index_b, best->index_a) ||
        (pos_a + pos_b == best->index_a + best->index_b && pos_a == best->index_a &&
         *h.address < best->address);
    if (better) best = TransitPoint{*h.address, pos_a, pos_b, false};
  }
  if (best) return *best;
  if (allow_origin_fallback) return TransitPoint{NodeAddress(path_a.origin_id()), 0, 0, true};
  return RejectReason{RejectKind::NoTransit,
                      fmt::format("no common hop toward {} and {}", path_a.destination().str(),
                                  path_b.destination().str())};
}

std::optional<RejectReason> validate_beyond_transit(const TracePath& trace, std::size_t transit_pos,
                                                    std::size_t endpoint_pos, double eps_rtt_ms) {
  if (transit_pos > endpoint_pos || endpoint_pos > trace.size())
    throw std::invalid_argument(fmt::format("invalid segment {}..{} in a trace of {} hops",
                                            transit_pos, endpoint_pos, trace.size()));
  if (eps_rtt_ms < 0.0) throw std::invalid_argument("negative rtt tolerance");

  double running_max = 0.0;
  if (transit_pos > 0) {
    const HopRecord& t = trace.at(transit_pos);
    if (!t.rtt_ms)
      return RejectReason{RejectKind::MissingRttAtTransit,
                          fmt::format("no rtt at transit hop {}", transit_pos)};
    running_max = *t.rtt_ms;
  }

  std::unordered_map<std::string_view, std::size_t> seen;
  for (std::size_t pos = std::max<std::size_t>(transit_pos, 1); pos <= endpoint_pos; ++pos) {
    const HopRecord& h = trace.at(pos);
    if (!h.address) continue;
    auto [it, inserted] = seen.emplace(h.address->str(), pos);
    if (!inserted)
      return RejectReason{RejectKind::LoopBeyondTransit,
                          fmt::format("{} repeats at hops {} and {}", h.address->str(), it->second, pos)};
  }

  for (std::size_t pos = transit_pos + 1; pos <= endpoint_pos; ++pos) {
    const HopRecord& h = trace.at(pos);
    if (!h.rtt_ms) continue;
    if (*h.rtt_ms < running_max - eps_rtt_ms)
      return RejectReason{RejectKind::AsymmetrySuspected,
                          fmt::format("rtt falls to {} ms at hop {} after {} ms", *h.rtt_ms, pos,
                                      running_max)};
    running_max = std::max(running_max, *h.rtt_ms);
  }
  return std::nullopt;
}

Outcome<PairEstimate> estimate_pair(const TracePath& path_a, const TracePath& path_b,
                                    const Options& options) {
  require_same_origin(path_a, path_b);
  // Evaluate in canonical order so that tie-breaks do not depend on argument
  // order; indices are swapped back at the end.
  const bool swapped = path_b.destination() < path_a.destination();
  const TracePath& a = swapped ? path_b : path_a;
  const TracePath& b = swapped ? path_a : path_b;

  auto end_a = endpoint_of(a, options.mode);
  if (!end_a) return end_a.reason();
  auto end_b = endpoint_of(b, options.mode);
  if (!end_b) return end_b.reason();
  const std::size_t n_a = end_a.value();
  const std::size_t n_b = end_b.value();

  auto transit = last_common_hop(a, b, options.allow_origin_fallback, n_a, n_b);
  if (!transit) return transit.reason();
  const TransitPoint& t = transit.value();

  if (auto r = validate_beyond_transit(a, t.index_a, n_a, options.eps_rtt_ms)) return *r;
  if (auto r = validate_beyond_transit(b, t.index_b, n_b, options.eps_rtt_ms)) return *r;

  auto rtt_at = [](const TracePath& p, std::size_t pos) -> std::optional<double> {
    return pos == 0 ? std::optional<double>(0.0) : p.at(pos).rtt_ms;
  };
  const auto ra_end = rtt_at(a, n_a), rb_end = rtt_at(b, n_b);
  if (!ra_end || !rb_end)
    return RejectReason{RejectKind::MissingRttAtTransit, "no rtt at endpoint hop"};
  const double diff_a = *ra_end - *rtt_at(a, t.index_a);
  const double diff_b = *rb_end - *rtt_at(b, t.index_b);
  if (diff_a < 0.0 || diff_b < 0.0)
    return RejectReason{RejectKind::AsymmetrySuspected,
                        fmt::format("negative rtt difference beyond transit {}", t.address.str())};

  PairEstimate est{path_a.destination(), path_b.destination(), a.origin_id(), t,
                   static_cast<int>((n_a - t.index_a) + (n_b - t.index_b)), diff_a + diff_b};
  if (swapped) std::swap(est.transit.index_a, est.transit.index_b);
  return est;
}

PairOutcome min_over_origins(const EndpointPair& pair,
                             const std::map<std::string, Outcome<PairEstimate>>& per_origin,
                             bool couple_metrics) {
  if (per_origin.empty()) throw std::invalid_argument("min_over_origins needs at least one origin");

  PairOutcome out{pair.canonical(), per_origin, std::nullopt, std::nullopt};
  const PairEstimate* best_hop = nullptr;
  const PairEstimate* best_rtt = nullptr;
  for (const auto& [origin, outcome] : per_origin) {
    if (!outcome) continue;
    const PairEstimate& e = outcome.value();
    // std::map iterates origins in order, so strict comparison keeps the
    // smallest origin id on full ties.
    if (!best_hop || std::tie(e.hop_bound, e.rtt_bound_ms) < std::tie(best_hop->hop_bound, best_hop->rtt_bound_ms))
      best_hop = &e;
    if (!best_rtt || std::tie(e.rtt_bound_ms, e.hop_bound) < std::tie(best_rtt->rtt_bound_ms, best_rtt->hop_bound))
      best_rtt = &e;
  }
  if (best_hop) {
    out.best_hop = *best_hop;
    out.best_rtt = couple_metrics ? *best_hop : *best_rtt;
  }
  return out;
}

std::size_t BatchStats::total_rejections() const noexcept {
  std::size_t n = 0;
  for (const auto& [kind, count] : rejections) n += count;
  return n;
}

TracesByOrigin group_by_origin(std::vector<TracePath> traces) {
  TracesByOrigin out;
  for (auto& t : traces) {
    std::string origin = t.origin_id();
    out[origin].push_back(std::move(t));
  }
  return out;
}

namespace {

// First reached trace per destination; an unreached one only if nothing
// better exists.
using DestinationIndex = std::unordered_map<NodeAddress, const TracePath*>;

DestinationIndex index_traces(const std::vector<TracePath>& traces) {
  DestinationIndex idx;
  for (const TracePath& t : traces) {
    auto [it, inserted] = idx.emplace(t.destination(), &t);
    if (!inserted && !it->second->reached() && t.reached()) it->second = &t;
  }
  return idx;
}

}  // namespace

BatchResult batch_estimate(const TracesByOrigin& traces, const std::vector<EndpointPair>& pairs,
                           const Options& options) {
  std::map<std::string, DestinationIndex> index;
  for (const auto& [origin, list] : traces) index.emplace(origin, index_traces(list));

  auto evaluate = [&](std::size_t i) {
    const EndpointPair pair = pairs[i].canonical();
    std::map<std::string, Outcome<PairEstimate>> per_origin;
    for (const auto& [origin, idx] : index) {
      auto ia = idx.find(pair.a);
      auto ib = idx.find(pair.b);
      if (ia == idx.end() || ib == idx.end()) {
        per_origin.emplace(origin, RejectReason{RejectKind::NoTransit, "no trace"});
        continue;
      }
      per_origin.emplace(origin, estimate_pair(*ia->second, *ib->second, options));
    }
    if (per_origin.empty()) return PairOutcome{pair, {}, std::nullopt, std::nullopt};
    return min_over_origins(pair, per_origin, options.couple_metrics);
  };

  BatchResult result;
  result.outcomes = parallel_map(pairs.size(), options.threads, evaluate);
  result.stats.total_pairs = pairs.size();
  for (const PairOutcome& o : result.outcomes) {
    if (o.accepted()) ++result.stats.successful_pairs;
    for (const auto& [origin, e] : o.per_origin)
      if (!e) ++result.stats.rejections[e.reason().kind];
  }
  return result;
}

}  // namespace edgedist::transit
