#include "edgedist/handover.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "edgedist/file_util.hpp"

namespace edgedist::handover {

namespace {

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

double parse_double(std::string_view s, std::size_t line_no) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
    throw HandoverError(fmt::format("line {}: bad number '{}'", line_no, s));
  return v;
}

// Bracketing interval for x on a strictly increasing axis; nullopt outside.
std::optional<std::pair<std::size_t, double>> locate(const std::vector<double>& axis, double x) {
  if (axis.size() == 1) {
    if (x == axis[0]) return std::pair<std::size_t, double>{0, 0.0};
    return std::nullopt;
  }
  if (x < axis.front() || x > axis.back()) return std::nullopt;
  auto it = std::upper_bound(axis.begin(), axis.end(), x);
  std::size_t hi = static_cast<std::size_t>(it - axis.begin());
  if (hi == axis.size()) hi = axis.size() - 1;
  const std::size_t lo = hi - 1;
  return std::pair<std::size_t, double>{lo, (x - axis[lo]) / (axis[hi] - axis[lo])};
}

}  // namespace

LossTable::LossTable(std::vector<double> delays, std::vector<double> anticipations, std::vector<double> values)
    : delays_(std::move(delays)), anticipations_(std::move(anticipations)), values_(std::move(values)) {
  if (delays_.empty() || anticipations_.empty()) throw HandoverError("loss table needs both axes");
  if (!strictly_increasing(delays_) || !strictly_increasing(anticipations_))
    throw HandoverError("loss table axes must be strictly increasing");
  if (values_.size() != delays_.size() * anticipations_.size())
    throw HandoverError("loss table size does not match its axes");
  for (double v : values_)
    if (!(v >= 0.0) || !std::isfinite(v)) throw HandoverError("loss table values must be non-negative");
}

double LossTable::at(double delay_ms, double anticipation_ms) const {
  auto d = locate(delays_, delay_ms);
  auto a = locate(anticipations_, anticipation_ms);
  if (!d || !a)
    throw HandoverError(fmt::format("loss table queried outside its axes at delay {} ms, anticipation {} ms",
                                    delay_ms, anticipation_ms));
  const std::size_t cols = anticipations_.size();
  auto v = [&](std::size_t r, std::size_t c) {
    r = std::min(r, delays_.size() - 1);
    c = std::min(c, cols - 1);
    return values_[r * cols + c];
  };
  const auto [r, fr] = *d;
  const auto [c, fc] = *a;
  const double top = v(r, c) * (1.0 - fc) + v(r, c + 1) * fc;
  const double bottom = v(r + 1, c) * (1.0 - fc) + v(r + 1, c + 1) * fc;
  return top * (1.0 - fr) + bottom * fr;
}

LossTable parse_loss_table(std::string_view csv) {
  const auto lines = split_lines(csv);
  std::vector<double> delays, anticipations, values;
  bool header = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const auto f = split_csv(lines[i]);
    if (!header) {
      if (f.size() < 2) throw HandoverError(fmt::format("line {}: anticipation axis missing", i + 1));
      for (std::size_t k = 1; k < f.size(); ++k) anticipations.push_back(parse_double(f[k], i + 1));
      header = true;
      continue;
    }
    if (f.size() != anticipations.size() + 1)
      throw HandoverError(fmt::format("line {}: expected {} fields, got {}", i + 1, anticipations.size() + 1, f.size()));
    delays.push_back(parse_double(f[0], i + 1));
    for (std::size_t k = 1; k < f.size(); ++k) values.push_back(parse_double(f[k], i + 1));
  }
  return LossTable(std::move(delays), std::move(anticipations), std::move(values));
}

LossTable load_loss_table(const std::filesystem::path& path) {
  try {
    return parse_loss_table(read_file(path));
  } catch (const HandoverError& e) {
    throw HandoverError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

LossModel LossModel::parametric(double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw HandoverError("beta must be non-negative");
  return LossModel(Kind::default_parametric, beta, std::nullopt);
}

LossModel LossModel::from_table(LossTable table) { return LossModel(Kind::table, 0.0, std::move(table)); }

double LossModel::loss(double delay_ms, double anticipation_ms) const {
  if (kind_ == Kind::table) return table_->at(delay_ms, anticipation_ms);
  return std::max(0.0, delay_ms - anticipation_ms) + beta_ * anticipation_ms;
}

std::vector<CurvePoint> expected_loss_curve(const stats::EdgeDistribution& delay_dist, const LossModel& model,
                                            const std::vector<double>& anticipation_grid, double delay_scale) {
  if (delay_dist.metric != stats::Metric::rtt_ms) throw HandoverError("loss curve needs an rtt_ms distribution");
  if (delay_dist.n == 0) throw HandoverError("empty delay distribution");
  if (anticipation_grid.empty()) throw HandoverError("empty anticipation grid");
  for (double a : anticipation_grid)
    if (!(a >= 0.0) || !std::isfinite(a)) throw HandoverError("anticipation times must be non-negative");
  if (!(delay_scale > 0.0) || !std::isfinite(delay_scale)) throw HandoverError("delay scale must be positive");

  const double n = static_cast<double>(delay_dist.n);
  std::vector<CurvePoint> curve;
  curve.reserve(anticipation_grid.size());
  for (double a : anticipation_grid) {
    double expected = 0.0;
    for (const stats::Bin& b : delay_dist.bins) {
      if (b.count == 0) continue;
      expected += static_cast<double>(b.count) / n * model.loss(delay_scale * b.mean, a);
    }
    curve.push_back({a, expected, expected / kPacketIntervalMs});
  }
  return curve;
}

std::vector<double> make_grid(double max, double step) {
  if (!(step > 0.0) || !(max >= 0.0)) throw HandoverError("grid needs max >= 0 and step > 0");
  std::vector<double> grid;
  const auto count = static_cast<std::size_t>(std::floor(max / step + 1e-9));
  for (std::size_t k = 0; k <= count; ++k) grid.push_back(static_cast<double>(k) * step);
  return grid;
}

AnticipationOptimum argmin_anticipation(const std::vector<CurvePoint>& curve, double flat_threshold) {
  if (curve.empty()) throw HandoverError("empty curve");
  std::size_t best = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    sum += curve[i].expected_loss_ms;
    if (curve[i].expected_loss_ms < curve[best].expected_loss_ms ||
        (curve[i].expected_loss_ms == curve[best].expected_loss_ms &&
         curve[i].anticipation_ms < curve[best].anticipation_ms))
      best = i;
  }
  const double mean = sum / static_cast<double>(curve.size());
  const double minimum = curve[best].expected_loss_ms;
  const double depth = std::min(curve.front().expected_loss_ms, curve.back().expected_loss_ms) - minimum;
  const bool flat = mean <= 0.0 || depth < flat_threshold * mean;
  return {curve[best].anticipation_ms, minimum, flat};
}

void PersistenceTable::validate() const {
  for (const auto& [hop, ratio] : entries) {
    if (hop < 0) throw HandoverError(fmt::format("negative hop distance {}", hop));
    if (!(ratio >= 0.0 && ratio <= 1.0))
      throw HandoverError(fmt::format("persist ratio {} at hop {} outside [0,1]", ratio, hop));
  }
}

PersistenceTable parse_persistence_table(std::string_view csv) {
  PersistenceTable t;
  const auto lines = split_lines(csv);
  bool header = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const auto f = split_csv(lines[i]);
    if (!header) {
      if (f.size() != 2 || f[0] != "hop" || f[1] != "persist_ratio")
        throw HandoverError(fmt::format("line {}: expected header hop,persist_ratio", i + 1));
      header = true;
      continue;
    }
    if (f.size() != 2) throw HandoverError(fmt::format("line {}: expected 2 fields", i + 1));
    int hop = 0;
    auto [p, ec] = std::from_chars(f[0].data(), f[0].data() + f[0].size(), hop);
    if (ec != std::errc() || p != f[0].data() + f[0].size())
      throw HandoverError(fmt::format("line {}: bad hop '{}'", i + 1, f[0]));
    t.entries[hop] = parse_double(f[1], i + 1);
  }
  if (!header) throw HandoverError("missing header hop,persist_ratio");
  t.validate();
  return t;
}

PersistenceTable load_persistence_table(const std::filesystem::path& path) {
  try {
    return parse_persistence_table(read_file(path));
  } catch (const HandoverError& e) {
    throw HandoverError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

double multicast_persistence(const stats::EdgeDistribution& hop_dist, const PersistenceTable& table) {
  if (hop_dist.metric != stats::Metric::hop_count)
    throw HandoverError("multicast persistence needs a hop_count distribution");
  if (hop_dist.n == 0) throw HandoverError("empty hop distribution");
  table.validate();

  const auto support = stats::weighted_support(hop_dist);
  std::vector<std::string> missing;
  double expected = 0.0;
  for (const auto& [value, count] : support) {
    const double rounded = std::round(value);
    if (std::abs(value - rounded) > 1e-9)
      throw HandoverError(fmt::format("hop value {} is not an integer", value));
    auto it = table.entries.find(static_cast<int>(rounded));
    if (it == table.entries.end()) {
      missing.push_back(fmt::format("{}", static_cast<int>(rounded)));
      continue;
    }
    expected += static_cast<double>(count) / static_cast<double>(hop_dist.n) * it->second;
  }
  if (!missing.empty())
    throw HandoverError(fmt::format("persistence table lacks hop values: {}", fmt::join(missing, ", ")));
  return expected;
}

std::string format_curve(const std::vector<CurvePoint>& curve) {
  std::string out = "# anticipation_ms\texpected_loss_ms\texpected_packets\n";
  for (const auto& p : curve)
    out += fmt::format("{}\t{}\t{}\n", p.anticipation_ms, p.expected_loss_ms, p.expected_packets);
  return out;
}

}  // namespace edgedist::handover
