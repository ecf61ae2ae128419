#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "edgedist/trace_model.hpp"

namespace edgedist::geo {

class GeoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::optional<std::uint32_t> parse_ipv4(std::string_view text);
std::string format_ipv4(std::uint32_t address);

struct Ipv4Prefix {
  std::uint32_t network = 0;
  int length = 0;

  /// Throws GeoError when length is outside 0..32 or host bits are set.
  static Ipv4Prefix make(std::uint32_t network, int length);

  std::uint32_t mask() const noexcept { return length == 0 ? 0u : ~0u << (32 - length); }
  bool contains(std::uint32_t address) const noexcept { return (address & mask()) == network; }
  std::string to_string() const;

  friend auto operator<=>(const Ipv4Prefix&, const Ipv4Prefix&) = default;
};

struct Region {
  std::string city;
  std::string country;  // empty matches any country

  bool matches(const Region& location) const noexcept {
    return city == location.city && (country.empty() || country == location.country);
  }
  std::string to_string() const { return country.empty() ? city : city + "," + country; }

  friend auto operator<=>(const Region&, const Region&) = default;
};

struct PrefixRecord {
  Ipv4Prefix prefix;
  Region location;
  std::string source_tag;

  friend bool operator==(const PrefixRecord&, const PrefixRecord&) = default;
};

/// Prefix-to-location table with longest-prefix-match lookup. One hash table
/// per mask length, probed from /32 down to /0.
class PrefixDb {
 public:
  /// Returns true when an identical prefix was replaced.
  bool insert(PrefixRecord record);

  const PrefixRecord* lookup(std::uint32_t address) const;
  const PrefixRecord* lookup(std::string_view address) const;

  const std::vector<PrefixRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }

  /// Distinct regions in first-seen order.
  std::vector<Region> regions() const;

 private:
  std::vector<PrefixRecord> records_;
  std::array<std::unordered_map<std::uint32_t, std::size_t>, 33> by_length_;
};

/// CSV with header `prefix,mask,city,country` and an optional fifth
/// `source_tag` column (default: the file name). Identical prefixes: last
/// row wins and a warning is recorded.
PrefixDb load_prefix_db(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);
PrefixDb parse_prefix_db(std::string_view csv, const std::string& default_tag,
                         std::vector<std::string>* warnings = nullptr);

using Representatives = std::map<Ipv4Prefix, NodeAddress>;

/// CSV `prefix,mask,host`. Throws when a host lies outside its prefix.
Representatives load_representatives(const std::filesystem::path& path,
                                     std::vector<std::string>* warnings = nullptr);
Representatives parse_representatives(std::string_view csv, std::vector<std::string>* warnings = nullptr);

struct Cluster {
  Region region;
  std::vector<PrefixRecord> ranges;
  Representatives representative;

  std::size_t size() const noexcept { return ranges.size(); }
  /// Ranges without a representative host.
  std::vector<Ipv4Prefix> unprobeable() const;
  /// Representative hosts in range order.
  std::vector<NodeAddress> hosts() const;
};

Cluster build_cluster(const PrefixDb& db, const Region& region, const Representatives& reps,
                      std::vector<std::string>* warnings = nullptr);
Cluster build_cluster(const PrefixDb& db, const Region& region,
                      const std::filesystem::path& representatives,
                      std::vector<std::string>* warnings = nullptr);

/// Uniform sample of min(n, size) ranges without replacement, kept in the
/// cluster's order. n >= size returns the cluster unchanged.
Cluster sample_ranges(const Cluster& cluster, std::size_t n, std::uint64_t seed);

/// All unordered pairs of representative hosts in one cluster.
std::vector<EndpointPair> cluster_pairs(const Cluster& cluster);

/// m pairs drawn uniformly over all representatives of all clusters, never
/// pairing a host with itself.
std::vector<EndpointPair> random_baseline_pairs(const std::vector<Cluster>& clusters, std::size_t m,
                                                std::uint64_t seed);

}  // namespace edgedist::geo
