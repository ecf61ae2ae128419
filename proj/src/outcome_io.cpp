#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "edgedist/file_util.hpp"
#include "edgedist/transit.hpp"

namespace edgedist::transit {

using nlohmann::json;

namespace {

json estimate_json(const PairEstimate& e) {
  return {
      {"a", e.endpoint_a.str()},
      {"b", e.endpoint_b.str()},
      {"origin", e.origin_id},
      {"hop_bound", e.hop_bound},
      {"rtt_bound_ms", e.rtt_bound_ms},
      {"transit",
       {{"address", e.transit.address.str()},
        {"index_a", e.transit.index_a},
        {"index_b", e.transit.index_b},
        {"origin_fallback", e.transit.is_origin_fallback}}},
  };
}

PairEstimate estimate_from_json(const json& j) {
  const json& t = j.at("transit");
  return PairEstimate{NodeAddress(j.at("a").get<std::string>()),
                      NodeAddress(j.at("b").get<std::string>()),
                      j.at("origin").get<std::string>(),
                      TransitPoint{NodeAddress(t.at("address").get<std::string>()),
                                   t.at("index_a").get<std::size_t>(), t.at("index_b").get<std::size_t>(),
                                   t.at("origin_fallback").get<bool>()},
                      j.at("hop_bound").get<int>(), j.at("rtt_bound_ms").get<double>()};
}

}  // namespace

std::string to_outcome_line(const PairOutcome& outcome) {
  json per_origin = json::object();
  for (const auto& [origin, e] : outcome.per_origin) {
    if (e) {
      json entry = estimate_json(e.value());
      entry["status"] = "accepted";
      per_origin[origin] = std::move(entry);
    } else {
      per_origin[origin] = {{"status", "rejected"},
                            {"kind", std::string(to_string(e.reason().kind))},
                            {"detail", e.reason().detail}};
    }
  }
  json record = {
      {"pair", {outcome.pair.a.str(), outcome.pair.b.str()}},
      {"per_origin", std::move(per_origin)},
      {"best_hop", outcome.best_hop ? estimate_json(*outcome.best_hop) : json(nullptr)},
      {"best_rtt", outcome.best_rtt ? estimate_json(*outcome.best_rtt) : json(nullptr)},
  };
  return record.dump();
}

PairOutcome from_outcome_line(std::string_view line) {
  try {
    const json j = json::parse(line);
    const json& pair = j.at("pair");
    PairOutcome out{EndpointPair{NodeAddress(pair.at(0).get<std::string>()),
                                 NodeAddress(pair.at(1).get<std::string>())},
                    {}, std::nullopt, std::nullopt};
    for (const auto& [origin, entry] : j.at("per_origin").items()) {
      const std::string status = entry.at("status").get<std::string>();
      if (status == "accepted") {
        out.per_origin.emplace(origin, estimate_from_json(entry));
      } else if (status == "rejected") {
        auto kind = parse_reject_kind(entry.at("kind").get<std::string>());
        if (!kind) throw std::runtime_error("unknown reject kind");
        out.per_origin.emplace(origin, RejectReason{*kind, entry.at("detail").get<std::string>()});
      } else {
        throw std::runtime_error(fmt::format("unknown status '{}'", status));
      }
    }
    if (!j.at("best_hop").is_null()) out.best_hop = estimate_from_json(j.at("best_hop"));
    if (!j.at("best_rtt").is_null()) out.best_rtt = estimate_from_json(j.at("best_rtt"));
    return out;
  } catch (const json::exception& e) {
    throw std::runtime_error(fmt::format("malformed outcome record: {}", e.what()));
  }
}

void write_outcomes(std::ostream& out, const std::vector<PairOutcome>& outcomes) {
  for (const PairOutcome& o : outcomes) out << to_outcome_line(o) << '\n';
}

std::vector<PairOutcome> read_outcomes(std::istream& in) {
  std::vector<PairOutcome> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      out.push_back(from_outcome_line(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(fmt::format("line {}: {}", line_no, e.what()));
    }
  }
  return out;
}

std::vector<PairOutcome> read_outcomes(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  try {
    return read_outcomes(in);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::vector<EndpointPair> read_pairs(const std::filesystem::path& path) {
  std::vector<EndpointPair> pairs;
  const auto lines = split_lines(read_file(path));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t sep = line.find_first_of("\t ,");
    if (sep == std::string_view::npos)
      throw std::runtime_error(fmt::format("{}: line {}: expected two endpoints", path.string(), i + 1));
    const std::string_view a = trim(line.substr(0, sep));
    const std::string_view b = trim(line.substr(sep + 1));
    if (a.empty() || b.empty() || b.find_first_of("\t ,") != std::string_view::npos)
      throw std::runtime_error(fmt::format("{}: line {}: expected two endpoints", path.string(), i + 1));
    pairs.push_back({NodeAddress(std::string(a)), NodeAddress(std::string(b))});
  }
  return pairs;
}

std::string format_pairs(const std::vector<EndpointPair>& pairs) {
  std::string out;
  for (const auto& p : pairs) out += fmt::format("{}\t{}\n", p.a.str(), p.b.str());
  return out;
}

}  // namespace edgedist::transit
