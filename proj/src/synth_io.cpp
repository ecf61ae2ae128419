#include <fmt/format.h>
#include <json.hpp>

#include "edgedist/file_util.hpp"
#include "edgedist/synth.hpp"

namespace edgedist::synth {

using nlohmann::json;

std::string format_topology(const Topology& topo) {
  std::string out = json{{"record", "topology"}, {"seed", topo.seed}}.dump() + "\n";
  std::vector<bool> access(topo.size(), false);
  for (NodeId r : topo.access_routers()) access[r] = true;
  for (NodeId n = 0; n < topo.size(); ++n)
    out += json{{"record", "node"}, {"name", topo.name(n)}, {"access", static_cast<bool>(access[n])}}.dump() + "\n";
  for (NodeId n = 0; n < topo.size(); ++n)
    for (const Arc& a : topo.out(n))
      out += json{{"record", "arc"}, {"from", topo.name(n)}, {"to", topo.name(a.to)}, {"latency_ms", a.latency_ms}}
                 .dump() +
             "\n";
  for (const auto& [host, router] : topo.attachments())
    out += json{{"record", "attach"}, {"host", topo.name(host)}, {"router", topo.name(router)}}.dump() + "\n";
  return out;
}

Topology parse_topology(std::string_view text) {
  Topology topo;
  std::vector<std::pair<NodeId, NodeId>> attachments;
  std::vector<NodeId> access;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    try {
      const json j = json::parse(lines[i]);
      const std::string kind = j.at("record").get<std::string>();
      if (kind == "topology") {
        topo.seed = j.at("seed").get<std::uint64_t>();
      } else if (kind == "node") {
        const NodeId n = topo.add_node(j.at("name").get<std::string>());
        if (j.value("access", false)) access.push_back(n);
      } else if (kind == "arc") {
        topo.add_arc(topo.id(j.at("from").get<std::string>()), topo.id(j.at("to").get<std::string>()),
                     j.at("latency_ms").get<double>());
      } else if (kind == "attach") {
        attachments.emplace_back(topo.id(j.at("host").get<std::string>()), topo.id(j.at("router").get<std::string>()));
      } else {
        throw SynthError(fmt::format("unknown record '{}'", kind));
      }
    } catch (const json::exception& e) {
      throw SynthError(fmt::format("line {}: {}", i + 1, e.what()));
    } catch (const SynthError& e) {
      throw SynthError(fmt::format("line {}: {}", i + 1, e.what()));
    }
  }
  // Generators mark the access tier before hosts attach; replay that order.
  for (NodeId r : access) topo.mark_access(r);
  for (const auto& [h, r] : attachments) topo.set_attachment(h, r);
  return topo;
}

Topology load_topology(const std::filesystem::path& path) {
  try {
    return parse_topology(read_file(path));
  } catch (const SynthError& e) {
    throw SynthError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace edgedist::synth
