#pragma once

// Test fixtures and independent reference implementations used as oracles.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "edgedist/geo.hpp"
#include "edgedist/synth.hpp"
#include "edgedist/trace_model.hpp"

namespace testing {

using edgedist::HopRecord;
using edgedist::NodeAddress;
using edgedist::TracePath;

struct H {
  std::string addr;  // "*" for an unresponsive hop
  double rtt = 0.0;
};

inline TracePath trace(const std::string& origin, const std::string& dest, const std::vector<H>& hops,
                       bool reached = true) {
  std::vector<HopRecord> out;
  int ttl = 1;
  for (const H& h : hops) {
    HopRecord r;
    r.ttl = ttl++;
    if (h.addr != "*") {
      r.address = NodeAddress(h.addr);
      r.rtt_ms = h.rtt;
    }
    out.push_back(std::move(r));
  }
  return TracePath(origin, NodeAddress(dest), std::move(out), reached);
}

// Addresses only; rtt grows by 1 ms per hop.
inline TracePath path(const std::string& origin, const std::vector<std::string>& addrs) {
  std::vector<H> hops;
  double rtt = 0.0;
  for (const auto& a : addrs) hops.push_back({a, rtt += 1.0});
  return trace(origin, addrs.back(), hops);
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("edgedist-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// ---- oracles ----------------------------------------------------------------

// Single-source shortest latencies by Bellman-Ford relaxation.
inline std::vector<double> bellman_ford(const edgedist::synth::Topology& t, std::size_t src) {
  std::vector<double> d(t.size(), std::numeric_limits<double>::infinity());
  d[src] = 0.0;
  for (std::size_t round = 0; round + 1 < t.size(); ++round) {
    bool changed = false;
    for (std::size_t u = 0; u < t.size(); ++u)
      for (const auto& a : t.out(u))
        if (d[u] + a.latency_ms < d[a.to]) {
          d[a.to] = d[u] + a.latency_ms;
          changed = true;
        }
    if (!changed) break;
  }
  return d;
}

// Index of the longest covering prefix, by scanning every record.
inline std::optional<std::size_t> linear_lpm(const std::vector<edgedist::geo::PrefixRecord>& records,
                                             std::uint32_t addr) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& p = records[i].prefix;
    const std::uint32_t mask = p.length == 0 ? 0u : ~std::uint32_t{0} << (32 - p.length);
    if ((addr & mask) != p.network) continue;
    if (!best || p.length > records[*best].prefix.length) best = i;
  }
  return best;
}

struct Moments {
  double mean = 0.0;
  double std = 0.0;
};

inline Moments two_pass(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  const double mean = s / static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(x.size()))};
}

inline double fraction_above(const std::vector<double>& x, double t) {
  std::size_t n = 0;
  for (double v : x) n += v > t;
  return static_cast<double>(n) / static_cast<double>(x.size());
}

inline double fraction_at_most(const std::vector<double>& x, double t) { return 1.0 - fraction_above(x, t); }

// sup |F_a - F_b| evaluated at every sample point of both sets.
inline double brute_ks(const std::vector<double>& a, const std::vector<double>& b) {
  double best = 0.0;
  for (const auto* set : {&a, &b})
    for (double t : *set) best = std::max(best, std::abs(fraction_at_most(a, t) - fraction_at_most(b, t)));
  return best;
}

// Expected loss of the default model for one-way delays `d` with equal weight.
inline double parametric_loss(const std::vector<double>& d, double a, double beta) {
  double s = 0.0;
  for (double v : d) s += std::max(0.0, v - a) + beta * a;
  return s / static_cast<double>(d.size());
}

// Upper 1% point of chi-square with 9 degrees of freedom.
inline constexpr double kChiSquare9At001 = 21.666;

}  // namespace testing
