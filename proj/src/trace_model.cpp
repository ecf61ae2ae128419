#include "edgedist/trace_model.hpp"

#include <cmath>

#include <fmt/format.h>

namespace edgedist {

NodeAddress::NodeAddress(std::string value) : value_(std::move(value)) {
  if (value_.empty()) throw InvariantError("empty node address");
}

std::ostream& operator<<(std::ostream& os, const NodeAddress& address) {
  return os << address.str();
}

void validate_hop(const HopRecord& hop) {
  if (hop.ttl < 1) throw InvariantError(fmt::format("ttl {} is not positive", hop.ttl));
  if (hop.rtt_ms) {
    if (!hop.address)
      throw InvariantError(fmt::format("ttl {}: rtt present without address", hop.ttl));
    if (!std::isfinite(*hop.rtt_ms) || *hop.rtt_ms < 0.0)
      throw InvariantError(fmt::format("ttl {}: rtt {} is not a non-negative number", hop.ttl,
                                       *hop.rtt_ms));
  }
}

TracePath::TracePath(std::string origin_id, NodeAddress destination, std::vector<HopRecord> hops,
                     bool reached, std::optional<double> timestamp)
    : origin_id_(std::move(origin_id)),
      destination_(std::move(destination)),
      hops_(std::move(hops)),
      reached_(reached),
      timestamp_(timestamp) {
  if (origin_id_.empty()) throw InvariantError("empty origin id");
  for (std::size_t i = 0; i < hops_.size(); ++i) {
    const int expected = static_cast<int>(i) + 1;
    if (hops_[i].ttl != expected)
      throw InvariantError(
          fmt::format("ttl gap: expected ttl {}, found {}", expected, hops_[i].ttl));
    validate_hop(hops_[i]);
  }
  if (reached_) {
    if (hops_.empty()) throw InvariantError("reached trace without hops");
    if (hops_.back().address != destination_)
      throw InvariantError("reached trace whose last hop is not the destination");
  }
  if (timestamp_ && !std::isfinite(*timestamp_)) throw InvariantError("non-finite timestamp");
}

const HopRecord& TracePath::at(std::size_t position) const {
  if (position < 1 || position > hops_.size())
    throw std::out_of_range(fmt::format("hop position {} outside 1..{}", position, hops_.size()));
  return hops_[position - 1];
}

std::string_view to_string(RejectKind kind) noexcept {
  switch (kind) {
    case RejectKind::UnreachableDestination: return "UnreachableDestination";
    case RejectKind::NoTransit: return "NoTransit";
    case RejectKind::AsymmetrySuspected: return "AsymmetrySuspected";
    case RejectKind::LoopBeyondTransit: return "LoopBeyondTransit";
    case RejectKind::MissingRttAtTransit: return "MissingRttAtTransit";
  }
  return "?";
}

std::optional<RejectKind> parse_reject_kind(std::string_view text) noexcept {
  for (RejectKind k : kAllRejectKinds)
    if (to_string(k) == text) return k;
  return std::nullopt;
}

}  // namespace edgedist
