#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edgedist/trace_model.hpp"

/// Transit-point discovery and pair distance bounds.
///
/// Two traces from the same origin toward hosts A and B share a prefix up to
/// some node T. Composing the tails T..A and T..B gives an upper bound on the
/// A-B distance, valid under symmetric routing. Tails with decreasing
/// cumulative RTT (asymmetric return paths) or repeated addresses (loops)
/// are rejected. Repeating the procedure from several origins and keeping the
/// minimum tightens the bound.
namespace edgedist::transit {

enum class EndpointMode { host, access_router };

std::string_view to_string(EndpointMode mode) noexcept;
std::optional<EndpointMode> parse_endpoint_mode(std::string_view text) noexcept;

inline constexpr std::size_t kNoLimit = std::numeric_limits<std::size_t>::max();

struct Options {
  EndpointMode mode = EndpointMode::access_router;
  bool allow_origin_fallback = false;
  double eps_rtt_ms = 0.0;
  // Report the RTT bound from the same origin as the best hop bound.
  bool couple_metrics = false;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Hop position of the distance endpoint in a reached trace: the destination
/// itself (host mode) or the last responsive hop before it (access_router
/// mode, falling back to the destination when there is none).
Outcome<std::size_t> endpoint_of(const TracePath& trace, EndpointMode mode);

/// Deepest common responsive hop of two same-origin traces: maximises
/// index_a + index_b, ties to larger index_a, then the smaller address.
/// Only positions up to limit_a / limit_b are considered.
Outcome<TransitPoint> last_common_hop(const TracePath& path_a, const TracePath& path_b,
                                      bool allow_origin_fallback, std::size_t limit_a = kNoLimit,
                                      std::size_t limit_b = kNoLimit);

/// Checks the hops transit_pos..endpoint_pos of one trace: no repeated
/// address, cumulative RTT never falls more than eps below its running
/// maximum. transit_pos 0 is the origin itself (RTT 0).
std::optional<RejectReason> validate_beyond_transit(const TracePath& trace, std::size_t transit_pos,
                                                    std::size_t endpoint_pos, double eps_rtt_ms = 0.0);

Outcome<PairEstimate> estimate_pair(const TracePath& path_a, const TracePath& path_b,
                                    const Options& options = {});

struct PairOutcome {
  EndpointPair pair;  // canonical order
  std::map<std::string, Outcome<PairEstimate>> per_origin;
  std::optional<PairEstimate> best_hop;
  std::optional<PairEstimate> best_rtt;

  bool accepted() const noexcept { return best_hop.has_value(); }

  friend bool operator==(const PairOutcome&, const PairOutcome&) = default;
};

/// Keeps, per metric, the smallest accepted bound. Ties: the other metric,
/// then the lexicographically smallest origin id. Throws on an empty map.
PairOutcome min_over_origins(const EndpointPair& pair,
                             const std::map<std::string, Outcome<PairEstimate>>& per_origin,
                             bool couple_metrics = false);

struct BatchStats {
  std::size_t total_pairs = 0;
  std::size_t successful_pairs = 0;
  // Per (pair, origin) evaluation.
  std::map<RejectKind, std::size_t> rejections;

  double success_ratio() const noexcept {
    return total_pairs == 0 ? 0.0 : static_cast<double>(successful_pairs) / static_cast<double>(total_pairs);
  }
  std::size_t total_rejections() const noexcept;
};

struct BatchResult {
  std::vector<PairOutcome> outcomes;  // same order as the input pairs
  BatchStats stats;
};

using TracesByOrigin = std::map<std::string, std::vector<TracePath>>;

TracesByOrigin group_by_origin(std::vector<TracePath> traces);

/// Evaluates every pair from every origin. An origin without a trace to one
/// of the endpoints yields NoTransit with detail "no trace".
BatchResult batch_estimate(const TracesByOrigin& traces, const std::vector<EndpointPair>& pairs,
                           const Options& options = {});

// Pair outcome export: one JSON object per line.
std::string to_outcome_line(const PairOutcome& outcome);
PairOutcome from_outcome_line(std::string_view line);
void write_outcomes(std::ostream& out, const std::vector<PairOutcome>& outcomes);
std::vector<PairOutcome> read_outcomes(std::istream& in);
std::vector<PairOutcome> read_outcomes(const std::filesystem::path& path);

// Pair list: one "a<TAB>b" line per pair.
std::vector<EndpointPair> read_pairs(const std::filesystem::path& path);
std::string format_pairs(const std::vector<EndpointPair>& pairs);

}  // namespace edgedist::transit
