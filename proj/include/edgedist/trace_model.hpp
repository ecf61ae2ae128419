#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace edgedist {

/// Thrown when a value violates one of the domain invariants below.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Opaque identifier of a network node: an IPv4 literal in measured data,
/// a symbolic node name in synthetic data. Identity is the string itself.
class NodeAddress {
 public:
  explicit NodeAddress(std::string value);

  const std::string& str() const noexcept { return value_; }

  friend auto operator<=>(const NodeAddress&, const NodeAddress&) = default;
  friend bool operator==(const NodeAddress&, const NodeAddress&) = default;

 private:
  std::string value_;
};

std::ostream& operator<<(std::ostream& os, const NodeAddress& address);

/// One TTL step of a traceroute. An absent address is the "* * *" case.
struct HopRecord {
  int ttl = 1;
  std::optional<NodeAddress> address;
  std::optional<double> rtt_ms;  // cumulative, minimum over probes
  std::string hostname;          // annotation only, never used as identity

  bool responsive() const noexcept { return address.has_value(); }

  friend bool operator==(const HopRecord&, const HopRecord&) = default;
};

/// Checks a single hop in isolation. Throws InvariantError.
void validate_hop(const HopRecord& hop);

/// Result of one traceroute run from one origin. Immutable; the constructor
/// enforces ttl continuity and the reached/destination relation.
class TracePath {
 public:
  TracePath(std::string origin_id, NodeAddress destination, std::vector<HopRecord> hops,
            bool reached, std::optional<double> timestamp = std::nullopt);

  const std::string& origin_id() const noexcept { return origin_id_; }
  const NodeAddress& destination() const noexcept { return destination_; }
  const std::vector<HopRecord>& hops() const noexcept { return hops_; }
  bool reached() const noexcept { return reached_; }
  const std::optional<double>& timestamp() const noexcept { return timestamp_; }

  std::size_t size() const noexcept { return hops_.size(); }

  // 1-based hop position, matching the TTL.
  const HopRecord& at(std::size_t position) const;

  friend bool operator==(const TracePath&, const TracePath&) = default;

 private:
  std::string origin_id_;
  NodeAddress destination_;
  std::vector<HopRecord> hops_;
  bool reached_;
  std::optional<double> timestamp_;
};

struct TransitPoint {
  NodeAddress address;
  std::size_t index_a = 0;  // 0 only for the origin fallback
  std::size_t index_b = 0;
  bool is_origin_fallback = false;

  friend bool operator==(const TransitPoint&, const TransitPoint&) = default;
};

struct PairEstimate {
  NodeAddress endpoint_a;
  NodeAddress endpoint_b;
  std::string origin_id;
  TransitPoint transit;
  int hop_bound = 0;
  double rtt_bound_ms = 0.0;

  friend bool operator==(const PairEstimate&, const PairEstimate&) = default;
};

enum class RejectKind {
  UnreachableDestination,
  NoTransit,
  AsymmetrySuspected,
  LoopBeyondTransit,
  MissingRttAtTransit,
};

inline constexpr RejectKind kAllRejectKinds[] = {
    RejectKind::UnreachableDestination, RejectKind::NoTransit, RejectKind::AsymmetrySuspected,
    RejectKind::LoopBeyondTransit,      RejectKind::MissingRttAtTransit,
};

std::string_view to_string(RejectKind kind) noexcept;
std::optional<RejectKind> parse_reject_kind(std::string_view text) noexcept;

struct RejectReason {
  RejectKind kind;
  std::string detail;

  friend bool operator==(const RejectReason&, const RejectReason&) = default;
};

/// Either an accepted value or the reason it was rejected.
template <class T>
class Outcome {
 public:
  Outcome(T value) : v_(std::move(value)) {}
  Outcome(RejectReason reason) : v_(std::move(reason)) {}

  bool accepted() const noexcept { return v_.index() == 0; }
  explicit operator bool() const noexcept { return accepted(); }

  const T& value() const { return std::get<0>(v_); }
  const RejectReason& reason() const { return std::get<1>(v_); }

  friend bool operator==(const Outcome&, const Outcome&) = default;

 private:
  std::variant<T, RejectReason> v_;
};

/// Unordered host pair; constructors do not reorder, use canonical() for that.
struct EndpointPair {
  NodeAddress a;
  NodeAddress b;

  EndpointPair canonical() const { return b < a ? EndpointPair{b, a} : *this; }

  friend bool operator==(const EndpointPair&, const EndpointPair&) = default;
};

}  // namespace edgedist

template <>
struct std::hash<edgedist::NodeAddress> {
  std::size_t operator()(const edgedist::NodeAddress& a) const noexcept {
    return std::hash<std::string>{}(a.str());
  }
};
