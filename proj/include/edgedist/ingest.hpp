#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "edgedist/trace_model.hpp"

/// Traceroute acquisition: text parsing, the canonical line-delimited record
/// format, and a thin wrapper around an external probing command.
namespace edgedist::ingest {

class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParseReport {
  std::size_t parsed = 0;          // traces produced
  std::size_t skipped_blocks = 0;  // header blocks dropped (malformed header, failed probe)
  std::size_t skipped_lines = 0;   // corrupt or stray lines outside a dropped block
  std::vector<std::string> warnings;

  bool clean() const noexcept { return skipped_blocks == 0 && skipped_lines == 0 && warnings.empty(); }
  void merge(const ParseReport& other);
};

struct ParseResult {
  std::vector<TracePath> traces;
  ParseReport report;
};

/// Parses the classic traceroute layout: a "traceroute to X (addr), ..."
/// header followed by one line per TTL. Per hop, the minimum responding probe
/// RTT is kept. A corrupt hop line is skipped; if that leaves a TTL hole the
/// hole is kept as an unresponsive hop so hop arithmetic stays aligned.
ParseResult parse_traceroute_text(std::string_view text, const std::string& origin_id);

// Canonical format: one JSON object per line with keys destination, hops,
// origin_id, reached, timestamp. Each hop is [ttl, address|null, rtt|null]
// with an optional fourth hostname element.
std::string to_canonical_line(const TracePath& trace);
TracePath from_canonical_line(std::string_view line);

std::vector<TracePath> read_canonical(std::istream& in);
std::vector<TracePath> read_canonical(const std::filesystem::path& path);
void write_canonical(std::ostream& out, const std::vector<TracePath>& traces);
void write_canonical(const std::vector<TracePath>& traces, const std::filesystem::path& path);

struct ProbeOptions {
  unsigned max_parallel = 4;
};

inline constexpr std::string_view kTargetPlaceholder = "{target}";

/// Runs `command_template` once per target with {target} substituted and
/// parses its stdout. Per-target failures become warnings; an unusable
/// template or a missing executable throws before anything runs.
ParseResult probe_external(const std::string& command_template,
                           const std::vector<NodeAddress>& targets, const std::string& origin_id,
                           const ProbeOptions& options = {});

}  // namespace edgedist::ingest
