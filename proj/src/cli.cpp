#include "edgedist/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "edgedist/file_util.hpp"
#include "edgedist/geo.hpp"
#include "edgedist/handover.hpp"
#include "edgedist/ingest.hpp"
#include "edgedist/random.hpp"
#include "edgedist/stats.hpp"
#include "edgedist/synth.hpp"
#include "edgedist/transit.hpp"

namespace edgedist::cli {

namespace {

// Bad flag values found after parsing; reported before any work starts.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Global {
  std::uint64_t seed = 1;
  std::string output;
  bool quiet = false;
};

double to_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError(fmt::format("{}: '{}' is not a number", what, s));
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string require_output(const Global& g, const char* command) {
  if (g.output.empty()) throw ConfigError(fmt::format("{} needs --output", command));
  return g.output;
}

void check_readable(const std::vector<std::string>& paths) {
  for (const auto& p : paths) {
    std::ifstream f(p);
    if (!f) throw IoError(fmt::format("cannot read {}", p));
  }
}

// ---- ingest ---------------------------------------------------------------

struct IngestArgs {
  std::string format = "traceroute-text";
  std::string origin;
  std::vector<std::string> inputs;
  std::string probe;
  std::string targets;
  unsigned max_parallel = 4;
};

void add_ingest(CLI::App& app, IngestArgs& a) {
  auto* c = app.add_subcommand("ingest", "Convert raw traceroute output or canonical files into a canonical trace file");
  c->add_option("--format", a.format, "Input format")->check(CLI::IsMember({"traceroute-text", "canonical"}));
  c->add_option("--origin", a.origin, "Origin id for traceroute-text input and probing");
  c->add_option("inputs", a.inputs, "Input files");
  c->add_option("--probe", a.probe, "Probe command template containing {target}");
  c->add_option("--targets", a.targets, "File with one probe target per line");
  c->add_option("--max-parallel", a.max_parallel, "Concurrent probes")->check(CLI::PositiveNumber);
}

int cmd_ingest(const IngestArgs& a, const Global& g, std::ostream& out, std::ostream& err) {
  const std::string output = require_output(g, "ingest");
  const bool probing = !a.probe.empty();
  if (probing && a.targets.empty()) throw ConfigError("--probe needs --targets");
  if (!probing && a.inputs.empty()) throw ConfigError("ingest needs input files or --probe");
  if ((probing || a.format == "traceroute-text") && a.origin.empty()) throw ConfigError("--origin is required");
  check_readable(a.inputs);
  if (probing) check_readable({a.targets});

  std::vector<TracePath> traces;
  ingest::ParseReport report;
  for (const auto& path : a.inputs) {
    if (a.format == "canonical") {
      auto t = ingest::read_canonical(std::filesystem::path(path));
      report.parsed += t.size();
      traces.insert(traces.end(), t.begin(), t.end());
    } else {
      auto r = ingest::parse_traceroute_text(read_file(path), a.origin);
      traces.insert(traces.end(), r.traces.begin(), r.traces.end());
      for (auto& w : r.report.warnings) w = path + ": " + w;
      report.merge(r.report);
    }
  }
  if (probing) {
    std::vector<NodeAddress> targets;
    for (const auto& line : split_lines(read_file(a.targets))) {
      const auto t = trim(line);
      if (!t.empty() && t.front() != '#') targets.emplace_back(std::string(t));
    }
    auto r = ingest::probe_external(a.probe, targets, a.origin, {a.max_parallel});
    traces.insert(traces.end(), r.traces.begin(), r.traces.end());
    report.merge(r.report);
  }
  ingest::write_canonical(traces, output);
  for (const auto& w : report.warnings) err << "warning: " << w << "\n";
  if (!g.quiet)
    out << fmt::format("parsed={} skipped_blocks={} skipped_lines={} warnings={}\n", report.parsed,
                       report.skipped_blocks, report.skipped_lines, report.warnings.size());
  return report.clean() ? kExitOk : kExitPartial;
}

// ---- pairs ----------------------------------------------------------------

struct PairsArgs {
  std::vector<std::string> traces;
  std::string pairs_file;
  std::string db;
  std::string region;
  std::string representatives;
  std::size_t sample = 0;
  std::size_t random = 0;
  std::string mode = "access_router";
  bool origin_fallback = false;
  double eps_rtt = 0.0;
  bool couple = false;
  unsigned threads = 0;
};

void add_pairs(CLI::App& app, PairsArgs& a) {
  auto* c = app.add_subcommand("pairs", "Estimate pair distances from multi-origin traces");
  c->add_option("traces", a.traces, "Canonical trace files")->required();
  c->add_option("--pairs", a.pairs_file, "Explicit pair list");
  c->add_option("--db", a.db, "Prefix database CSV");
  c->add_option("--region", a.region, "Cluster region as city[,country]");
  c->add_option("--representatives", a.representatives, "Representative hosts CSV");
  c->add_option("--sample", a.sample, "Sample this many ranges from the cluster");
  c->add_option("--random", a.random, "Random baseline: this many pairs drawn over all regions");
  c->add_option("--mode", a.mode, "Distance endpoints")->check(CLI::IsMember({"host", "access_router"}));
  c->add_flag("--origin-fallback", a.origin_fallback, "Use the origin as transit when paths share no hop");
  c->add_option("--eps-rtt", a.eps_rtt, "Tolerated rtt decrease in ms")->check(CLI::NonNegativeNumber);
  c->add_flag("--couple-metrics", a.couple, "Report rtt from the origin giving the best hop bound");
  c->add_option("--threads", a.threads, "Worker threads (0 = all cores)");
}

std::vector<EndpointPair> pair_source(const PairsArgs& a, const Global& g, std::vector<std::string>& warnings) {
  const int sources = !a.pairs_file.empty() + !a.region.empty() + (a.random > 0);
  if (sources != 1) throw ConfigError("give exactly one of --pairs, --region or --random");
  if (!a.pairs_file.empty()) {
    check_readable({a.pairs_file});
    return transit::read_pairs(a.pairs_file);
  }
  if (a.db.empty() || a.representatives.empty()) throw ConfigError("--region and --random need --db and --representatives");
  check_readable({a.db, a.representatives});
  const geo::PrefixDb db = geo::load_prefix_db(a.db, &warnings);
  const geo::Representatives reps = geo::load_representatives(a.representatives, &warnings);
  if (a.random > 0) {
    std::vector<geo::Cluster> clusters;
    for (const geo::Region& r : db.regions()) clusters.push_back(geo::build_cluster(db, r, reps, &warnings));
    return geo::random_baseline_pairs(clusters, a.random, g.seed);
  }
  const auto parts = split(a.region, ',');
  if (parts.size() > 2 || parts[0].empty()) throw ConfigError(fmt::format("bad region '{}'", a.region));
  geo::Region region{std::string(trim(parts[0])), parts.size() == 2 ? std::string(trim(parts[1])) : ""};
  geo::Cluster cluster = geo::build_cluster(db, region, reps, &warnings);
  if (a.sample > 0) cluster = geo::sample_ranges(cluster, a.sample, g.seed);
  return geo::cluster_pairs(cluster);
}

int cmd_pairs(const PairsArgs& a, const Global& g, std::ostream& out, std::ostream& err) {
  const std::string output = require_output(g, "pairs");
  check_readable(a.traces);
  transit::Options opt;
  opt.mode = *transit::parse_endpoint_mode(a.mode);
  opt.allow_origin_fallback = a.origin_fallback;
  opt.eps_rtt_ms = a.eps_rtt;
  opt.couple_metrics = a.couple;
  opt.threads = a.threads;

  std::vector<std::string> warnings;
  const std::vector<EndpointPair> pairs = pair_source(a, g, warnings);
  std::vector<TracePath> traces;
  for (const auto& p : a.traces) {
    auto t = ingest::read_canonical(std::filesystem::path(p));
    traces.insert(traces.end(), t.begin(), t.end());
  }
  const transit::BatchResult batch = transit::batch_estimate(transit::group_by_origin(std::move(traces)), pairs, opt);
  std::ostringstream file;
  transit::write_outcomes(file, batch.outcomes);
  write_file_atomic(output, file.str());

  for (const auto& w : warnings) err << "warning: " << w << "\n";
  if (!g.quiet) {
    const auto& s = batch.stats;
    out << fmt::format("pairs={} successful={} success_ratio={:.2f}\n", s.total_pairs, s.successful_pairs,
                       s.success_ratio());
    const std::size_t total = s.total_rejections();
    for (RejectKind k : kAllRejectKinds) {
      auto it = s.rejections.find(k);
      const std::size_t n = it == s.rejections.end() ? 0 : it->second;
      out << fmt::format("rejected {} {} ({:.1f}%)\n", to_string(k), n,
                         total == 0 ? 0.0 : 100.0 * static_cast<double>(n) / static_cast<double>(total));
    }
  }
  if (batch.stats.successful_pairs == 0) {
    err << "no pair received a valid estimate\n";
    return kExitPartial;
  }
  return kExitOk;
}

// ---- dist -----------------------------------------------------------------

struct DistArgs {
  std::string outcomes;
  double rtt_bin = stats::kDefaultRttBinMs;
  std::string baseline;
  std::string stability;
};

void add_dist(CLI::App& app, DistArgs& a) {
  auto* c = app.add_subcommand("dist", "Hop and rtt distributions from pair outcomes");
  c->add_option("outcomes", a.outcomes, "Pair outcome file")->required();
  c->add_option("--rtt-bin", a.rtt_bin, "Rtt bin width in ms")->check(CLI::PositiveNumber);
  c->add_option("--baseline", a.baseline, "Outcome file to compare against");
  c->add_option("--stability", a.stability, "Subset stability as SIZE:TRIALS");
}

int cmd_dist(const DistArgs& a, const Global& g, std::ostream& out, std::ostream&) {
  const std::string prefix = require_output(g, "dist");
  std::size_t subset = 0, trials = 0;
  if (!a.stability.empty()) {
    const auto parts = split(a.stability, ':');
    if (parts.size() != 2) throw ConfigError("--stability expects SIZE:TRIALS");
    subset = static_cast<std::size_t>(to_double(parts[0], "--stability size"));
    trials = static_cast<std::size_t>(to_double(parts[1], "--stability trials"));
    if (subset == 0 || trials == 0) throw ConfigError("--stability size and trials must be positive");
  }
  check_readable({a.outcomes});
  if (!a.baseline.empty()) check_readable({a.baseline});

  const auto outcomes = transit::read_outcomes(std::filesystem::path(a.outcomes));
  const auto hop = stats::build_distribution(outcomes, stats::Metric::hop_count, 1.0);
  const auto rtt = stats::build_distribution(outcomes, stats::Metric::rtt_ms, a.rtt_bin);
  std::string summary = fmt::format("hop n={} mean={} std={}\nrtt_ms n={} mean={} std={}\n", hop.n, hop.mean,
                                    hop.stddev, rtt.n, rtt.mean, rtt.stddev);
  if (!a.baseline.empty()) {
    const auto base = transit::read_outcomes(std::filesystem::path(a.baseline));
    const auto bh = stats::build_distribution(base, stats::Metric::hop_count, 1.0);
    const auto br = stats::build_distribution(base, stats::Metric::rtt_ms, a.rtt_bin);
    const auto ch = stats::compare_distributions(hop, bh);
    const auto cr = stats::compare_distributions(rtt, br);
    summary += fmt::format("compare hop mean_shift={} ks={}\n", ch.mean_shift, ch.ks_statistic);
    summary += fmt::format("compare rtt_ms mean_shift={} ks={}\n", cr.mean_shift, cr.ks_statistic);
  }
  if (subset > 0) {
    for (stats::Metric m : {stats::Metric::hop_count, stats::Metric::rtt_ms}) {
      const auto s = stats::resample_stability(outcomes, m, subset, trials, g.seed);
      summary += fmt::format("stability {} subset={} trials={} max_mean_dev={} max_std_dev={}\n", to_string(m),
                             subset, trials, s.max_mean_dev, s.max_std_dev);
    }
  }
  write_file_atomic(prefix + ".hop.tsv", stats::format_distribution(hop));
  write_file_atomic(prefix + ".rtt.tsv", stats::format_distribution(rtt));
  write_file_atomic(prefix + ".summary.txt", summary);
  if (!g.quiet) out << summary;
  return kExitOk;
}

// ---- handover -------------------------------------------------------------

struct HandoverArgs {
  std::string rtt;
  double beta = handover::kDefaultBeta;
  double delay_scale = handover::kDefaultDelayScale;
  std::string grid = "0:100:5";
  std::string loss_table;
  std::string persistence;
  std::string hops;
  double flat_threshold = handover::kDefaultFlatThreshold;
};

void add_handover(CLI::App& app, HandoverArgs& a) {
  auto* c = app.add_subcommand("handover", "Expected handover loss curve and multicast state persistence");
  c->add_option("--rtt", a.rtt, "Rtt distribution TSV");
  c->add_option("--beta", a.beta, "Anticipation cost factor of the default loss model")->check(CLI::NonNegativeNumber);
  c->add_option("--delay-scale", a.delay_scale, "Rtt to handover delay factor")->check(CLI::PositiveNumber);
  c->add_option("--grid", a.grid, "Anticipation grid START:MAX:STEP in ms");
  c->add_option("--loss-table", a.loss_table, "Loss table CSV replacing the default model");
  c->add_option("--persistence", a.persistence, "Persistence table CSV (hop,persist_ratio)");
  c->add_option("--hops", a.hops, "Hop distribution TSV for --persistence");
  c->add_option("--flat-threshold", a.flat_threshold, "Relative depth below which the curve counts as flat")
      ->check(CLI::NonNegativeNumber);
}

std::vector<double> parse_grid(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw ConfigError("--grid expects START:MAX:STEP");
  const double start = to_double(parts[0], "--grid start");
  const double max = to_double(parts[1], "--grid max");
  const double step = to_double(parts[2], "--grid step");
  if (start < 0.0 || max < start || step <= 0.0) throw ConfigError("--grid needs 0 <= START <= MAX and STEP > 0");
  std::vector<double> grid;
  for (double a : handover::make_grid(max - start, step)) grid.push_back(start + a);
  return grid;
}

int cmd_handover(const HandoverArgs& a, const Global& g, std::ostream& out, std::ostream&) {
  if (a.rtt.empty() && a.persistence.empty()) throw ConfigError("handover needs --rtt and/or --persistence");
  if (!a.persistence.empty() && a.hops.empty()) throw ConfigError("--persistence needs --hops");
  const std::vector<double> grid = parse_grid(a.grid);
  if (!a.rtt.empty() && g.output.empty()) throw ConfigError("handover --rtt needs --output for the curve");
  std::vector<std::string> inputs;
  for (const auto* p : {&a.rtt, &a.loss_table, &a.persistence, &a.hops})
    if (!p->empty()) inputs.push_back(*p);
  check_readable(inputs);

  std::string report;
  std::string curve_tsv;
  if (!a.rtt.empty()) {
    const auto model = a.loss_table.empty() ? handover::LossModel::parametric(a.beta)
                                            : handover::LossModel::from_table(handover::load_loss_table(a.loss_table));
    const auto dist = stats::read_distribution(a.rtt);
    const auto curve = handover::expected_loss_curve(dist, model, grid, a.delay_scale);
    const auto best = handover::argmin_anticipation(curve, a.flat_threshold);
    curve_tsv = handover::format_curve(curve);
    report += fmt::format("argmin_anticipation_ms={} expected_loss_ms={} expected_packets={}{}\n",
                          best.anticipation_ms, best.expected_loss_ms,
                          best.expected_loss_ms / handover::kPacketIntervalMs, best.flat ? " flat_flag" : "");
  }
  if (!a.persistence.empty()) {
    const auto table = handover::load_persistence_table(a.persistence);
    const auto hops = stats::read_distribution(a.hops);
    const double p = handover::multicast_persistence(hops, table);
    report += fmt::format("expected_persistence={} expected_invalidation={}\n", p, 1.0 - p);
  }
  if (!curve_tsv.empty()) {
    write_file_atomic(g.output, curve_tsv);
    write_file_atomic(g.output + ".report.txt", report);
  }
  if (!g.quiet) out << report;
  return kExitOk;
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string model = "two_tier";
  std::size_t nodes = 100;
  std::size_t cores = 4;
  std::size_t leaves = 4;
  double radius = 0.25;
  bool dense_peering = false;
  std::size_t hosts_per_access = 1;
  std::size_t origins = 5;
  std::size_t pairs = 50;
  std::string inject;
  double jitter = 0.0;
  std::string mode = "access_router";
  bool origin_fallback = false;
  double eps_rtt = 0.0;
  unsigned threads = 0;
  std::string topology_in;
  std::string traces_out;
  std::string pairs_out;
  std::string outcomes_out;
  std::string topology_out;
};

void add_simulate(CLI::App& app, SimulateArgs& a) {
  auto* c = app.add_subcommand("simulate", "Synthetic topology, simulated traces and verification report");
  c->add_option("--model", a.model, "Topology model")
      ->check(CLI::IsMember({"ring_of_stars", "random_geometric", "two_tier"}));
  c->add_option("--nodes", a.nodes, "Router count (random_geometric, two_tier)");
  c->add_option("--cores", a.cores, "Core routers (ring_of_stars)");
  c->add_option("--leaves", a.leaves, "Leaves per core (ring_of_stars)");
  c->add_option("--radius", a.radius, "Link radius (random_geometric)")->check(CLI::PositiveNumber);
  c->add_flag("--dense-peering", a.dense_peering, "Add peering links between access routers (two_tier)");
  c->add_option("--hosts-per-access", a.hosts_per_access, "Hosts behind every access router")->check(CLI::PositiveNumber);
  c->add_option("--topology", a.topology_in, "Load the topology instead of generating one");
  c->add_option("--origins", a.origins, "Number of origins")->check(CLI::PositiveNumber);
  c->add_option("--pairs", a.pairs, "Number of host pairs")->check(CLI::PositiveNumber);
  c->add_option("--inject", a.inject, "Faults as asymmetry=F,delta=MS,loops=P,block=P");
  c->add_option("--jitter", a.jitter, "Uniform rtt jitter half-width in ms")->check(CLI::NonNegativeNumber);
  c->add_option("--mode", a.mode, "Distance endpoints")->check(CLI::IsMember({"host", "access_router"}));
  c->add_flag("--origin-fallback", a.origin_fallback, "Use the origin as transit when paths share no hop");
  c->add_option("--eps-rtt", a.eps_rtt, "Tolerated rtt decrease in ms")->check(CLI::NonNegativeNumber);
  c->add_option("--threads", a.threads, "Worker threads (0 = all cores)");
  c->add_option("--traces-out", a.traces_out, "Write simulated traces (canonical)");
  c->add_option("--pairs-out", a.pairs_out, "Write the host pair list");
  c->add_option("--outcomes-out", a.outcomes_out, "Write pair outcomes");
  c->add_option("--topology-out", a.topology_out, "Write the topology");
}

void apply_inject(const std::string& faults, synth::SimOptions& sim) {
  if (faults.empty()) return;
  for (const auto& item : split(faults, ',')) {
    const auto kv = split(item, '=');
    if (kv.size() != 2) throw ConfigError(fmt::format("--inject: bad item '{}'", item));
    const double v = to_double(kv[1], "--inject " + kv[0]);
    if (kv[0] == "asymmetry") sim.asymmetry_fraction = v;
    else if (kv[0] == "delta") sim.asymmetry_delta_ms = v;
    else if (kv[0] == "loops") sim.loop_injection = v;
    else if (kv[0] == "block") sim.block_probability = v;
    else throw ConfigError(fmt::format("--inject: unknown fault '{}'", kv[0]));
  }
}

int cmd_simulate(const SimulateArgs& a, const Global& g, std::ostream& out, std::ostream&) {
  synth::ExperimentOptions opt;
  opt.sim.seed = g.seed;
  opt.sim.rtt_jitter_ms = a.jitter;
  apply_inject(a.inject, opt.sim);
  try {
    opt.sim.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  opt.transit.mode = *transit::parse_endpoint_mode(a.mode);
  opt.transit.allow_origin_fallback = a.origin_fallback;
  opt.transit.eps_rtt_ms = a.eps_rtt;
  opt.transit.threads = a.threads;
  if (!a.topology_in.empty()) check_readable({a.topology_in});

  synth::Topology topo;
  if (!a.topology_in.empty()) {
    topo = synth::load_topology(a.topology_in);
  } else {
    synth::TopologyParams params;
    params.nodes = a.nodes;
    params.cores = a.cores;
    params.leaves_per_core = a.leaves;
    params.radius = a.radius;
    params.dense_peering = a.dense_peering;
    params.hosts_per_access = a.hosts_per_access;
    topo = synth::generate_topology(*synth::parse_model(a.model), params, derive_seed(g.seed, "topology"));
  }
  const auto origins = synth::pick_origins(topo, a.origins, g.seed);
  const auto pairs = synth::pick_host_pairs(topo, a.pairs, g.seed);
  const synth::ExperimentReport report = synth::run_experiment(topo, origins, pairs, opt);

  const std::string text = synth::format_report(report);
  if (!a.traces_out.empty()) {
    std::ostringstream s;
    ingest::write_canonical(s, report.traces);
    write_file_atomic(a.traces_out, s.str());
  }
  if (!a.pairs_out.empty()) {
    std::vector<EndpointPair> ep;
    for (const auto& [x, y] : pairs) ep.push_back({topo.address(x), topo.address(y)});
    write_file_atomic(a.pairs_out, transit::format_pairs(ep));
  }
  if (!a.outcomes_out.empty()) {
    std::ostringstream s;
    transit::write_outcomes(s, report.outcomes);
    write_file_atomic(a.outcomes_out, s.str());
  }
  if (!a.topology_out.empty()) write_file_atomic(a.topology_out, synth::format_topology(topo));
  if (!g.output.empty()) write_file_atomic(g.output, text);
  if (!g.quiet) out << text;
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Edge distance estimation from multi-origin traceroute data", "edgedist"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--seed", g.seed, "Seed for every random choice");
  app.add_option("-o,--output", g.output, "Output file (or prefix for dist)");
  app.add_flag("-q,--quiet", g.quiet, "Print nothing on success");

  IngestArgs ingest_args;
  PairsArgs pairs_args;
  DistArgs dist_args;
  HandoverArgs handover_args;
  SimulateArgs simulate_args;
  add_ingest(app, ingest_args);
  add_pairs(app, pairs_args);
  add_dist(app, dist_args);
  add_handover(app, handover_args);
  add_simulate(app, simulate_args);

  std::vector<std::string> argv_store{"edgedist"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitFatal;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "ingest") return cmd_ingest(ingest_args, g, out, err);
    if (name == "pairs") return cmd_pairs(pairs_args, g, out, err);
    if (name == "dist") return cmd_dist(dist_args, g, out, err);
    if (name == "handover") return cmd_handover(handover_args, g, out, err);
    return cmd_simulate(simulate_args, g, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFatal;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace edgedist::cli
