#include "edgedist/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "edgedist/file_util.hpp"
#include "edgedist/random.hpp"

namespace edgedist::stats {

std::string_view to_string(Metric m) noexcept { return m == Metric::hop_count ? "hop_count" : "rtt_ms"; }

std::optional<Metric> parse_metric(std::string_view text) noexcept {
  if (text == "hop_count") return Metric::hop_count;
  if (text == "rtt_ms") return Metric::rtt_ms;
  return std::nullopt;
}

namespace {

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
};

// Welford's single-pass update.
Moments moments(const std::vector<double>& xs) {
  double mean = 0.0, m2 = 0.0;
  std::size_t k = 0;
  for (double x : xs) {
    ++k;
    const double delta = x - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (x - mean);
  }
  if (k == 0) return {};
  return {mean, std::sqrt(std::max(0.0, m2 / static_cast<double>(k)))};
}

long long bin_index(double v, double w) { return static_cast<long long>(std::floor(v / w)); }

}  // namespace

EdgeDistribution from_samples(Metric metric, std::vector<double> samples, double bin_width,
                              std::size_t excluded) {
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) throw StatsError("bin width must be positive");
  if (samples.empty()) throw StatsError("empty distribution");
  for (double v : samples)
    if (!std::isfinite(v)) throw StatsError("non-finite sample");
  std::sort(samples.begin(), samples.end());

  EdgeDistribution d;
  d.metric = metric;
  d.bin_width = bin_width;
  d.n = samples.size();
  d.excluded = excluded;
  const Moments m = moments(samples);
  d.mean = m.mean;
  d.stddev = m.stddev;

  const long long lo = bin_index(samples.front(), bin_width);
  const long long hi = bin_index(samples.back(), bin_width);
  d.bins.resize(static_cast<std::size_t>(hi - lo + 1));
  std::vector<double> sums(d.bins.size(), 0.0);
  for (std::size_t k = 0; k < d.bins.size(); ++k)
    d.bins[k].lower_edge = static_cast<double>(lo + static_cast<long long>(k)) * bin_width;
  for (double v : samples) {
    const auto k = static_cast<std::size_t>(bin_index(v, bin_width) - lo);
    ++d.bins[k].count;
    sums[k] += v;
  }
  for (std::size_t k = 0; k < d.bins.size(); ++k) {
    Bin& b = d.bins[k];
    b.mean = b.count > 0 ? sums[k] / static_cast<double>(b.count) : b.lower_edge + bin_width / 2.0;
  }
  d.samples = std::move(samples);
  return d;
}

std::vector<double> accepted_samples(const std::vector<transit::PairOutcome>& outcomes, Metric metric) {
  std::vector<double> xs;
  for (const auto& o : outcomes) {
    if (metric == Metric::hop_count && o.best_hop) xs.push_back(o.best_hop->hop_bound);
    if (metric == Metric::rtt_ms && o.best_rtt) xs.push_back(o.best_rtt->rtt_bound_ms);
  }
  return xs;
}

EdgeDistribution build_distribution(const std::vector<transit::PairOutcome>& outcomes, Metric metric,
                                    double bin_width) {
  if (!(bin_width > 0.0)) throw StatsError("bin width must be positive");
  auto xs = accepted_samples(outcomes, metric);
  const std::size_t excluded = outcomes.size() - xs.size();
  return from_samples(metric, std::move(xs), bin_width, excluded);
}

std::vector<std::pair<double, std::size_t>> weighted_support(const EdgeDistribution& dist) {
  std::vector<std::pair<double, std::size_t>> out;
  if (!dist.samples.empty()) {
    for (double v : dist.samples) {
      if (!out.empty() && out.back().first == v)
        ++out.back().second;
      else
        out.emplace_back(v, 1);
    }
    return out;
  }
  for (const Bin& b : dist.bins)
    if (b.count > 0) out.emplace_back(b.mean, b.count);
  return out;
}

Stability resample_stability(const std::vector<double>& samples, std::size_t subset_size,
                             std::size_t trials, std::uint64_t seed) {
  if (trials < 2) throw StatsError("stability needs at least two trials");
  if (subset_size == 0 || subset_size > samples.size())
    throw StatsError(fmt::format("subset size {} exceeds the {} accepted samples", subset_size, samples.size()));
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const Moments full = moments(sorted);

  Rng rng(seed);
  Stability s;
  std::vector<std::size_t> idx(sorted.size());
  std::vector<double> subset;
  for (std::size_t t = 0; t < trials; ++t) {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < subset_size; ++i) std::swap(idx[i], idx[i + rng.index(idx.size() - i)]);
    // Index order keeps the summation order of the full sample, so the
    // whole-set subset reproduces the full moments bit for bit.
    std::sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(subset_size));
    subset.clear();
    for (std::size_t i = 0; i < subset_size; ++i) subset.push_back(sorted[idx[i]]);
    const Moments m = moments(subset);
    s.max_mean_dev = std::max(s.max_mean_dev, std::abs(m.mean - full.mean));
    s.max_std_dev = std::max(s.max_std_dev, std::abs(m.stddev - full.stddev));
  }
  return s;
}

Stability resample_stability(const std::vector<transit::PairOutcome>& outcomes, Metric metric,
                             std::size_t subset_size, std::size_t trials, std::uint64_t seed) {
  return resample_stability(accepted_samples(outcomes, metric), subset_size, trials, seed);
}

std::vector<CcdfPoint> ccdf(const EdgeDistribution& dist) {
  if (dist.n == 0 || dist.bins.empty()) throw StatsError("ccdf of an empty distribution");
  const auto support = weighted_support(dist);
  const double n = static_cast<double>(dist.n);
  std::vector<CcdfPoint> out;
  std::size_t above = dist.n;  // samples > current threshold
  std::size_t s = 0;
  auto advance = [&](double t) {
    while (s < support.size() && support[s].first <= t) above -= support[s++].second;
  };
  for (const Bin& b : dist.bins) {
    advance(b.lower_edge);
    out.push_back({b.lower_edge, static_cast<double>(above) / n});
  }
  const double last = dist.bins.back().lower_edge + dist.bin_width;
  advance(last);
  out.push_back({last, static_cast<double>(above) / n});
  return out;
}

Comparison compare_distributions(const EdgeDistribution& a, const EdgeDistribution& b) {
  if (a.metric != b.metric)
    throw StatsError(fmt::format("metric mismatch: {} vs {}", to_string(a.metric), to_string(b.metric)));
  if (a.bin_width != b.bin_width)
    throw StatsError(fmt::format("bin width mismatch: {} vs {}", a.bin_width, b.bin_width));
  if (a.n == 0 || b.n == 0) throw StatsError("comparison with an empty distribution");

  const auto sa = weighted_support(a);
  const auto sb = weighted_support(b);
  const double na = static_cast<double>(a.n), nb = static_cast<double>(b.n);
  // Merge walk over the pooled support; both CDFs are step functions so the
  // supremum is attained at a support point.
  std::size_t i = 0, j = 0, ca = 0, cb = 0;
  double ks = 0.0;
  while (i < sa.size() || j < sb.size()) {
    double x;
    if (j >= sb.size() || (i < sa.size() && sa[i].first <= sb[j].first))
      x = sa[i].first;
    else
      x = sb[j].first;
    while (i < sa.size() && sa[i].first == x) ca += sa[i++].second;
    while (j < sb.size() && sb[j].first == x) cb += sb[j++].second;
    ks = std::max(ks, std::abs(static_cast<double>(ca) / na - static_cast<double>(cb) / nb));
  }
  return {a.mean - b.mean, ks};
}

std::string format_distribution(const EdgeDistribution& d) {
  std::string out = fmt::format("# metric={} bin_width={} n={} mean={} std={} excluded={}\n", to_string(d.metric),
                                d.bin_width, d.n, d.mean, d.stddev, d.excluded);
  out += "# lower_edge\tcount\tfraction\tbin_mean\n";
  for (const Bin& b : d.bins)
    out += fmt::format("{}\t{}\t{}\t{}\n", b.lower_edge, b.count,
                       static_cast<double>(b.count) / static_cast<double>(d.n), b.mean);
  return out;
}

namespace {

double to_double(std::string_view s, std::size_t line_no) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw StatsError(fmt::format("line {}: bad number '{}'", line_no, s));
  return v;
}

std::size_t to_count(std::string_view s, std::size_t line_no) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw StatsError(fmt::format("line {}: bad count '{}'", line_no, s));
  return v;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(trim(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start)));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

}  // namespace

EdgeDistribution parse_distribution(std::string_view tsv) {
  EdgeDistribution d;
  std::map<std::string, std::string, std::less<>> header;
  const auto lines = split_lines(tsv);
  std::size_t total = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = trim(lines[i]);
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::string_view rest = line.substr(1);
      while (!rest.empty()) {
        rest = trim(rest);
        const std::size_t sp = rest.find(' ');
        const std::string_view tok = rest.substr(0, sp);
        if (const std::size_t eq = tok.find('='); eq != std::string_view::npos)
          header.emplace(std::string(tok.substr(0, eq)), std::string(tok.substr(eq + 1)));
        if (sp == std::string_view::npos) break;
        rest.remove_prefix(sp + 1);
      }
      continue;
    }
    const auto f = split_tabs(line);
    if (f.size() < 2) throw StatsError(fmt::format("line {}: expected lower_edge and count", i + 1));
    Bin b;
    b.lower_edge = to_double(f[0], i + 1);
    b.count = to_count(f[1], i + 1);
    b.mean = f.size() >= 4 ? to_double(f[3], i + 1) : std::nan("");
    d.bins.push_back(b);
    total += b.count;
  }
  auto get = [&](std::string_view key) -> const std::string& {
    auto it = header.find(key);
    if (it == header.end()) throw StatsError(fmt::format("distribution header lacks '{}'", key));
    return it->second;
  };
  auto metric = parse_metric(get("metric"));
  if (!metric) throw StatsError(fmt::format("unknown metric '{}'", get("metric")));
  d.metric = *metric;
  d.bin_width = to_double(get("bin_width"), 1);
  d.n = to_count(get("n"), 1);
  d.mean = to_double(get("mean"), 1);
  d.stddev = to_double(get("std"), 1);
  if (header.count("excluded")) d.excluded = to_count(get("excluded"), 1);
  if (!(d.bin_width > 0.0)) throw StatsError("bin width must be positive");
  if (total != d.n) throw StatsError(fmt::format("bin counts sum to {} but header says n={}", total, d.n));
  // Hop values are integers sitting on their bin's lower edge.
  const double offset = d.metric == Metric::hop_count ? 0.0 : d.bin_width / 2.0;
  for (Bin& b : d.bins)
    if (std::isnan(b.mean)) b.mean = b.lower_edge + offset;
  return d;
}

EdgeDistribution read_distribution(const std::filesystem::path& path) {
  try {
    return parse_distribution(read_file(path));
  } catch (const StatsError& e) {
    throw StatsError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace edgedist::stats
