#include "edgedist/ingest.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "edgedist/file_util.hpp"
#include "edgedist/parallel.hpp"

namespace edgedist::ingest {

using nlohmann::json;

void ParseReport::merge(const ParseReport& other) {
  parsed += other.parsed;
  skipped_blocks += other.skipped_blocks;
  skipped_lines += other.skipped_lines;
  warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
}

namespace {

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

// from_chars is locale-independent, which is the point.
std::optional<double> parse_number(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<int> parse_int(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

std::optional<std::string_view> unparen(std::string_view tok) {
  while (!tok.empty() && tok.back() == ',') tok.remove_suffix(1);
  if (tok.size() < 3 || tok.front() != '(' || tok.back() != ')') return std::nullopt;
  return tok.substr(1, tok.size() - 2);
}

struct Header {
  NodeAddress target;
};

std::optional<Header> parse_header(const std::vector<std::string_view>& tok) {
  // traceroute to NAME (ADDR), 30 hops max, ...
  if (tok.size() < 3) return std::nullopt;
  std::string_view name = tok[2];
  while (!name.empty() && name.back() == ',') name.remove_suffix(1);
  if (name.empty() || name.front() == '(') return std::nullopt;
  if (tok.size() >= 4 && tok[3].front() == '(') {
    auto addr = unparen(tok[3]);
    if (!addr) return std::nullopt;
    return Header{NodeAddress(std::string(*addr))};
  }
  return Header{NodeAddress(std::string(name))};
}

struct Responder {
  std::string address;
  std::string hostname;
  std::vector<double> rtts;
};

struct HopLine {
  int ttl;
  std::vector<Responder> responders;
};

// Returns nullopt for a line that does not follow the classic layout.
std::optional<HopLine> parse_hop_line(const std::vector<std::string_view>& tok) {
  if (tok.empty()) return std::nullopt;
  auto ttl = parse_int(tok[0]);
  if (!ttl || *ttl < 1) return std::nullopt;
  HopLine line{*ttl, {}};
  bool expecting_probe = false;  // a responder must be followed by a probe result
  for (std::size_t i = 1; i < tok.size();) {
    const std::string_view t = tok[i];
    if (t == "*") {
      if (expecting_probe) expecting_probe = false;
      ++i;
      continue;
    }
    if (t.front() == '!') {
      if (line.responders.empty()) return std::nullopt;
      ++i;
      continue;
    }
    if (auto v = parse_number(t)) {
      if (line.responders.empty() || i + 1 >= tok.size() || tok[i + 1] != "ms") return std::nullopt;
      if (*v < 0.0) return std::nullopt;
      line.responders.back().rtts.push_back(*v);
      expecting_probe = false;
      i += 2;
      continue;
    }
    if (t.size() > 2 && t.substr(t.size() - 2) == "ms") {
      if (auto v = parse_number(t.substr(0, t.size() - 2))) {
        if (line.responders.empty() || *v < 0.0) return std::nullopt;
        line.responders.back().rtts.push_back(*v);
        expecting_probe = false;
        ++i;
        continue;
      }
    }
    // Anything else must be a responder name, optionally followed by (addr).
    if (expecting_probe) return std::nullopt;
    if (t == "ms" || t.front() == '(' || t.find_first_of("()") != std::string_view::npos)
      return std::nullopt;
    Responder r;
    if (i + 1 < tok.size() && tok[i + 1].front() == '(') {
      auto addr = unparen(tok[i + 1]);
      if (!addr) return std::nullopt;
      r.address = std::string(*addr);
      r.hostname = std::string(t);
      if (r.hostname == r.address) r.hostname.clear();
      i += 2;
    } else {
      r.address = std::string(t);
      ++i;
    }
    line.responders.push_back(std::move(r));
    expecting_probe = true;
  }
  if (expecting_probe) return std::nullopt;
  return line;
}

class BlockBuilder {
 public:
  BlockBuilder(NodeAddress target, std::size_t header_line)
      : target_(std::move(target)), header_line_(header_line) {}

  bool add(const HopLine& line, std::size_t line_no, ParseReport& report) {
    const int expected = static_cast<int>(hops_.size()) + 1;
    if (line.ttl < expected) {
      report.warnings.push_back(
          fmt::format("line {}: ttl {} out of order, line skipped", line_no, line.ttl));
      return false;
    }
    if (line.ttl > expected) {
      report.warnings.push_back(fmt::format("line {}: ttl {}..{} missing, kept as unresponsive",
                                            line_no, expected, line.ttl - 1));
      for (int t = expected; t < line.ttl; ++t) hops_.push_back(HopRecord{t, {}, {}, {}});
    }
    HopRecord hop{line.ttl, {}, {}, {}};
    if (!line.responders.empty()) {
      const Responder& first = line.responders.front();
      hop.address = NodeAddress(first.address);
      hop.hostname = first.hostname;
      if (!first.rtts.empty()) hop.rtt_ms = *std::min_element(first.rtts.begin(), first.rtts.end());
      if (line.responders.size() > 1)
        report.warnings.push_back(fmt::format(
            "line {}: {} responders at ttl {}, kept the first", line_no, line.responders.size(),
            line.ttl));
    }
    hops_.push_back(std::move(hop));
    return true;
  }

  TracePath finish(const std::string& origin_id) {
    const bool reached = !hops_.empty() && hops_.back().address == target_;
    return TracePath(origin_id, target_, std::move(hops_), reached);
  }

  std::size_t header_line() const noexcept { return header_line_; }

 private:
  NodeAddress target_;
  std::size_t header_line_;
  std::vector<HopRecord> hops_;
};

}  // namespace

ParseResult parse_traceroute_text(std::string_view text, const std::string& origin_id) {
  if (origin_id.empty()) throw std::invalid_argument("origin id must not be empty");
  ParseResult result;
  ParseReport& report = result.report;
  std::optional<BlockBuilder> block;
  bool in_skipped_block = false;

  auto flush = [&] {
    if (block) {
      result.traces.push_back(block->finish(origin_id));
      ++report.parsed;
      block.reset();
    }
  };

  const auto lines = split_lines(text);
  for (std::size_t idx = 0; idx < lines.size(); ++idx) {
    const std::size_t line_no = idx + 1;
    const std::string_view line = trim(lines[idx]);
    if (line.empty()) continue;
    const auto tok = tokenize(line);
    if (starts_with(line, "traceroute to") || (tok.size() >= 2 && tok[0] == "traceroute" && tok[1] == "to")) {
      flush();
      std::optional<Header> header;
      try {
        header = parse_header(tok);
      } catch (const InvariantError&) {
        header.reset();
      }
      if (!header) {
        ++report.skipped_blocks;
        report.warnings.push_back(fmt::format("line {}: malformed header, block skipped", line_no));
        in_skipped_block = true;
        continue;
      }
      in_skipped_block = false;
      block.emplace(header->target, line_no);
      continue;
    }
    if (in_skipped_block) continue;
    if (!block) {
      ++report.skipped_lines;
      report.warnings.push_back(fmt::format("line {}: text outside a traceroute block", line_no));
      continue;
    }
    auto hop = parse_hop_line(tok);
    if (!hop) {
      ++report.skipped_lines;
      report.warnings.push_back(fmt::format("line {}: unparseable hop line", line_no));
      continue;
    }
    if (!block->add(*hop, line_no, report)) ++report.skipped_lines;
  }
  flush();
  return result;
}

std::string to_canonical_line(const TracePath& trace) {
  json hops = json::array();
  for (const HopRecord& h : trace.hops()) {
    json hop = json::array();
    hop.push_back(h.ttl);
    hop.push_back(h.address ? json(h.address->str()) : json(nullptr));
    hop.push_back(h.rtt_ms ? json(*h.rtt_ms) : json(nullptr));
    if (!h.hostname.empty()) hop.push_back(h.hostname);
    hops.push_back(std::move(hop));
  }
  json record = {
      {"origin_id", trace.origin_id()},
      {"destination", trace.destination().str()},
      {"timestamp", trace.timestamp() ? json(*trace.timestamp()) : json(nullptr)},
      {"reached", trace.reached()},
      {"hops", std::move(hops)},
  };
  return record.dump();
}

TracePath from_canonical_line(std::string_view line) {
  json record;
  try {
    record = json::parse(line);
  } catch (const json::parse_error& e) {
    throw IngestError(fmt::format("malformed record: {}", e.what()));
  }
  try {
    if (!record.is_object()) throw IngestError("record is not an object");
    std::vector<HopRecord> hops;
    for (const json& h : record.at("hops")) {
      if (!h.is_array() || h.size() < 3 || h.size() > 4) throw IngestError("malformed hop entry");
      HopRecord hop;
      hop.ttl = h.at(0).get<int>();
      if (!h.at(1).is_null()) hop.address = NodeAddress(h.at(1).get<std::string>());
      if (!h.at(2).is_null()) hop.rtt_ms = h.at(2).get<double>();
      if (h.size() == 4) hop.hostname = h.at(3).get<std::string>();
      hops.push_back(std::move(hop));
    }
    std::optional<double> ts;
    if (record.contains("timestamp") && !record.at("timestamp").is_null())
      ts = record.at("timestamp").get<double>();
    return TracePath(record.at("origin_id").get<std::string>(),
                     NodeAddress(record.at("destination").get<std::string>()), std::move(hops),
                     record.at("reached").get<bool>(), ts);
  } catch (const json::exception& e) {
    throw IngestError(fmt::format("malformed record: {}", e.what()));
  }
}

std::vector<TracePath> read_canonical(std::istream& in) {
  std::vector<TracePath> traces;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      traces.push_back(from_canonical_line(line));
    } catch (const std::exception& e) {
      throw IngestError(fmt::format("line {}: {}", line_no, e.what()));
    }
  }
  return traces;
}

std::vector<TracePath> read_canonical(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  try {
    return read_canonical(in);
  } catch (const IngestError& e) {
    throw IngestError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void write_canonical(std::ostream& out, const std::vector<TracePath>& traces) {
  for (const TracePath& t : traces) out << to_canonical_line(t) << '\n';
}

void write_canonical(const std::vector<TracePath>& traces, const std::filesystem::path& path) {
  std::ostringstream out;
  write_canonical(out, traces);
  write_file_atomic(path, out.str());
}

namespace {

std::string shell_quote(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  out += '\'';
  return out;
}

bool is_executable(const std::string& program) {
  if (program.find('/') != std::string::npos) return ::access(program.c_str(), X_OK) == 0;
  const char* path = std::getenv("PATH");
  if (!path) return false;
  std::string_view dirs(path);
  while (!dirs.empty()) {
    const std::size_t colon = dirs.find(':');
    std::string dir(dirs.substr(0, colon));
    if (dir.empty()) dir = ".";
    if (::access((dir + "/" + program).c_str(), X_OK) == 0) return true;
    if (colon == std::string_view::npos) break;
    dirs.remove_prefix(colon + 1);
  }
  return false;
}

struct ProbeRun {
  int status = 0;
  std::string output;
};

ProbeRun run_command(const std::string& command) {
  ProbeRun run;
  FILE* pipe = ::popen((command + " 2>/dev/null").c_str(), "r");
  if (!pipe) {
    run.status = -1;
    return run;
  }
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) run.output.append(buf, n);
  const int raw = ::pclose(pipe);
  run.status = (raw != -1 && WIFEXITED(raw)) ? WEXITSTATUS(raw) : -1;
  return run;
}

}  // namespace

ParseResult probe_external(const std::string& command_template,
                           const std::vector<NodeAddress>& targets, const std::string& origin_id,
                           const ProbeOptions& options) {
  if (origin_id.empty()) throw std::invalid_argument("origin id must not be empty");
  const std::size_t first = command_template.find(kTargetPlaceholder);
  if (first == std::string::npos ||
      command_template.find(kTargetPlaceholder, first + 1) != std::string::npos)
    throw std::invalid_argument("command template must contain exactly one {target}");
  const std::string_view trimmed = trim(command_template);
  const std::string program(trimmed.substr(0, trimmed.find_first_of(" \t")));
  if (program.empty() || program.find(kTargetPlaceholder) != std::string::npos ||
      !is_executable(program))
    throw IngestError(fmt::format("probe command '{}' is not executable", program));

  auto runs = parallel_map(targets.size(), std::max(1u, options.max_parallel), [&](std::size_t i) {
    std::string cmd = command_template;
    cmd.replace(first, kTargetPlaceholder.size(), shell_quote(targets[i].str()));
    return run_command(cmd);
  });

  ParseResult result;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const NodeAddress& target = targets[i];
    if (runs[i].status != 0) {
      ++result.report.skipped_blocks;
      result.report.warnings.push_back(
          fmt::format("target {}: probe exited with status {}", target.str(), runs[i].status));
      continue;
    }
    ParseResult one = parse_traceroute_text(runs[i].output, origin_id);
    if (one.traces.empty()) {
      ++result.report.skipped_blocks;
      result.report.warnings.push_back(fmt::format("target {}: no trace in probe output", target.str()));
    }
    for (auto& w : one.report.warnings) w = fmt::format("target {}: {}", target.str(), w);
    result.report.merge(one.report);
    for (auto& t : one.traces) result.traces.push_back(std::move(t));
  }
  return result;
}

}  // namespace edgedist::ingest
