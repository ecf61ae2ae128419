#include "edgedist/geo.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "edgedist/file_util.hpp"
#include "edgedist/random.hpp"

namespace edgedist::geo {

std::optional<std::uint32_t> parse_ipv4(std::string_view text) {
  std::uint32_t out = 0;
  const char* p = text.data();
  const char* end = text.data() + text.size();
  for (int octet = 0; octet < 4; ++octet) {
    if (octet > 0) {
      if (p == end || *p != '.') return std::nullopt;
      ++p;
    }
    unsigned v = 0;
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc() || next == p || next - p > 3 || v > 255) return std::nullopt;
    out = (out << 8) | v;
    p = next;
  }
  if (p != end) return std::nullopt;
  return out;
}

std::string format_ipv4(std::uint32_t a) {
  return fmt::format("{}.{}.{}.{}", a >> 24, (a >> 16) & 0xff, (a >> 8) & 0xff, a & 0xff);
}

Ipv4Prefix Ipv4Prefix::make(std::uint32_t network, int length) {
  if (length < 0 || length > 32) throw GeoError(fmt::format("mask length {} outside 0..32", length));
  Ipv4Prefix p{network, length};
  if ((network & ~p.mask()) != 0)
    throw GeoError(fmt::format("{}/{} has host bits set", format_ipv4(network), length));
  return p;
}

std::string Ipv4Prefix::to_string() const { return fmt::format("{}/{}", format_ipv4(network), length); }

bool PrefixDb::insert(PrefixRecord record) {
  auto& table = by_length_[static_cast<std::size_t>(record.prefix.length)];
  auto it = table.find(record.prefix.network);
  if (it != table.end()) {
    records_[it->second] = std::move(record);
    return true;
  }
  table.emplace(record.prefix.network, records_.size());
  records_.push_back(std::move(record));
  return false;
}

const PrefixRecord* PrefixDb::lookup(std::uint32_t address) const {
  for (int len = 32; len >= 0; --len) {
    const auto& table = by_length_[static_cast<std::size_t>(len)];
    if (table.empty()) continue;
    const std::uint32_t mask = len == 0 ? 0u : ~0u << (32 - len);
    auto it = table.find(address & mask);
    if (it != table.end()) return &records_[it->second];
  }
  return nullptr;
}

const PrefixRecord* PrefixDb::lookup(std::string_view address) const {
  auto a = parse_ipv4(address);
  return a ? lookup(*a) : nullptr;
}

std::vector<Region> PrefixDb::regions() const {
  std::vector<Region> out;
  std::set<Region> seen;
  for (const auto& r : records_)
    if (seen.insert(r.location).second) out.push_back(r.location);
  return out;
}

namespace {

Ipv4Prefix parse_prefix_fields(std::string_view prefix, std::string_view mask) {
  auto net = parse_ipv4(prefix);
  if (!net) throw GeoError(fmt::format("bad prefix '{}'", prefix));
  int len = -1;
  auto [p, ec] = std::from_chars(mask.data(), mask.data() + mask.size(), len);
  if (ec != std::errc() || p != mask.data() + mask.size())
    throw GeoError(fmt::format("bad mask '{}'", mask));
  return Ipv4Prefix::make(*net, len);
}

bool is_header(const std::vector<std::string>& fields, std::initializer_list<std::string_view> names,
               std::size_t required) {
  if (fields.size() < required || fields.size() > names.size()) return false;
  std::size_t i = 0;
  for (std::string_view n : names) {
    if (i >= fields.size()) break;
    if (fields[i] != n) return false;
    ++i;
  }
  return true;
}

}  // namespace

PrefixDb parse_prefix_db(std::string_view csv, const std::string& default_tag,
                         std::vector<std::string>* warnings) {
  PrefixDb db;
  const auto lines = split_lines(csv);
  bool header_seen = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (trim(lines[i]).empty()) continue;
    const auto fields = split_csv(lines[i]);
    if (!header_seen) {
      if (!is_header(fields, {"prefix", "mask", "city", "country", "source_tag"}, 4))
        throw GeoError(fmt::format("line {}: expected header prefix,mask,city,country", line_no));
      header_seen = true;
      continue;
    }
    if (fields.size() < 4 || fields.size() > 5)
      throw GeoError(fmt::format("line {}: expected 4 or 5 fields, got {}", line_no, fields.size()));
    PrefixRecord rec;
    try {
      rec.prefix = parse_prefix_fields(fields[0], fields[1]);
    } catch (const GeoError& e) {
      throw GeoError(fmt::format("line {}: {}", line_no, e.what()));
    }
    if (fields[2].empty()) throw GeoError(fmt::format("line {}: empty city", line_no));
    rec.location = Region{fields[2], fields[3]};
    rec.source_tag = fields.size() == 5 && !fields[4].empty() ? fields[4] : default_tag;
    const std::string prefix_text = rec.prefix.to_string();
    if (db.insert(std::move(rec)) && warnings)
      warnings->push_back(fmt::format("line {}: duplicate prefix {}, last row wins", line_no, prefix_text));
  }
  if (!header_seen) throw GeoError("missing header prefix,mask,city,country");
  return db;
}

PrefixDb load_prefix_db(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  try {
    return parse_prefix_db(read_file(path), path.filename().string(), warnings);
  } catch (const GeoError& e) {
    throw GeoError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

Representatives parse_representatives(std::string_view csv, std::vector<std::string>* warnings) {
  Representatives reps;
  const auto lines = split_lines(csv);
  bool header_seen = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (trim(lines[i]).empty()) continue;
    const auto fields = split_csv(lines[i]);
    if (!header_seen) {
      if (!is_header(fields, {"prefix", "mask", "host"}, 3))
        throw GeoError(fmt::format("line {}: expected header prefix,mask,host", line_no));
      header_seen = true;
      continue;
    }
    if (fields.size() != 3) throw GeoError(fmt::format("line {}: expected 3 fields", line_no));
    Ipv4Prefix prefix;
    try {
      prefix = parse_prefix_fields(fields[0], fields[1]);
    } catch (const GeoError& e) {
      throw GeoError(fmt::format("line {}: {}", line_no, e.what()));
    }
    auto host = parse_ipv4(fields[2]);
    if (!host) throw GeoError(fmt::format("line {}: bad host '{}'", line_no, fields[2]));
    if (!prefix.contains(*host))
      throw GeoError(fmt::format("line {}: host {} outside prefix {}", line_no, fields[2], prefix.to_string()));
    auto [it, inserted] = reps.insert_or_assign(prefix, NodeAddress(format_ipv4(*host)));
    if (!inserted && warnings)
      warnings->push_back(fmt::format("line {}: second host for {}, last row wins", line_no, prefix.to_string()));
  }
  if (!header_seen) throw GeoError("missing header prefix,mask,host");
  return reps;
}

Representatives load_representatives(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  try {
    return parse_representatives(read_file(path), warnings);
  } catch (const GeoError& e) {
    throw GeoError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::vector<Ipv4Prefix> Cluster::unprobeable() const {
  std::vector<Ipv4Prefix> out;
  for (const auto& r : ranges)
    if (!representative.count(r.prefix)) out.push_back(r.prefix);
  return out;
}

std::vector<NodeAddress> Cluster::hosts() const {
  std::vector<NodeAddress> out;
  for (const auto& r : ranges)
    if (auto it = representative.find(r.prefix); it != representative.end()) out.push_back(it->second);
  return out;
}

Cluster build_cluster(const PrefixDb& db, const Region& region, const Representatives& reps,
                      std::vector<std::string>* warnings) {
  Cluster c{region, {}, {}};
  for (const PrefixRecord& r : db.records()) {
    if (!region.matches(r.location)) continue;
    c.ranges.push_back(r);
    if (auto it = reps.find(r.prefix); it != reps.end()) {
      auto host = parse_ipv4(it->second.str());
      if (!host || !r.prefix.contains(*host))
        throw GeoError(fmt::format("representative {} outside prefix {}", it->second.str(), r.prefix.to_string()));
      c.representative.emplace(r.prefix, it->second);
    }
  }
  if (warnings) {
    if (c.ranges.empty()) warnings->push_back(fmt::format("region {} has no prefixes", region.to_string()));
    const std::size_t missing = c.ranges.size() - c.representative.size();
    if (missing > 0)
      warnings->push_back(fmt::format("region {}: {} of {} ranges have no representative and are unprobeable",
                                      region.to_string(), missing, c.ranges.size()));
  }
  return c;
}

Cluster build_cluster(const PrefixDb& db, const Region& region,
                      const std::filesystem::path& representatives, std::vector<std::string>* warnings) {
  return build_cluster(db, region, load_representatives(representatives, warnings), warnings);
}

Cluster sample_ranges(const Cluster& cluster, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample size must be at least 1");
  if (n >= cluster.size()) return cluster;
  std::vector<std::size_t> idx(cluster.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) std::swap(idx[i], idx[i + rng.index(idx.size() - i)]);
  idx.resize(n);
  std::sort(idx.begin(), idx.end());

  Cluster out{cluster.region, {}, {}};
  for (std::size_t i : idx) {
    const PrefixRecord& r = cluster.ranges[i];
    out.ranges.push_back(r);
    if (auto it = cluster.representative.find(r.prefix); it != cluster.representative.end())
      out.representative.emplace(it->first, it->second);
  }
  return out;
}

std::vector<EndpointPair> cluster_pairs(const Cluster& cluster) {
  const auto hosts = cluster.hosts();
  std::vector<EndpointPair> pairs;
  for (std::size_t i = 0; i < hosts.size(); ++i)
    for (std::size_t j = i + 1; j < hosts.size(); ++j)
      if (hosts[i] != hosts[j]) pairs.push_back({hosts[i], hosts[j]});
  return pairs;
}

std::vector<EndpointPair> random_baseline_pairs(const std::vector<Cluster>& clusters, std::size_t m,
                                                std::uint64_t seed) {
  std::vector<NodeAddress> pool;
  std::size_t nonempty = 0;
  for (const Cluster& c : clusters) {
    auto hosts = c.hosts();
    if (!hosts.empty()) ++nonempty;
    pool.insert(pool.end(), hosts.begin(), hosts.end());
  }
  std::set<NodeAddress> distinct(pool.begin(), pool.end());
  if (distinct.size() < 2) throw GeoError("random baseline needs at least two distinct representatives");
  if (nonempty < 2) throw GeoError("random baseline needs at least two non-empty clusters");

  Rng rng(seed);
  std::vector<EndpointPair> pairs;
  pairs.reserve(m);
  while (pairs.size() < m) {
    const std::size_t i = rng.index(pool.size());
    std::size_t j = rng.index(pool.size() - 1);
    if (j >= i) ++j;
    if (pool[i] == pool[j]) continue;
    pairs.push_back({pool[i], pool[j]});
  }
  return pairs;
}

}  // namespace edgedist::geo
