#include <doctest.h>

#include "edgedist/handover.hpp"
#include "edgedist/random.hpp"
#include "support.hpp"

using namespace edgedist;
using namespace edgedist::handover;
using stats::Metric;

namespace {

// Rtt samples at twice the given one-way delays.
stats::EdgeDistribution rtt_of(const std::vector<double>& one_way) {
  std::vector<double> rtt;
  for (double d : one_way) rtt.push_back(2.0 * d);
  return stats::from_samples(Metric::rtt_ms, rtt, stats::kDefaultRttBinMs);
}

std::vector<CurvePoint> points(const std::vector<std::pair<double, double>>& xy) {
  std::vector<CurvePoint> out;
  for (auto [a, l] : xy) out.push_back({a, l, l / kPacketIntervalMs});
  return out;
}

}  // namespace

TEST_CASE("default model") {
  const LossModel m = LossModel::parametric(0.1);
  CHECK(m.loss(30, 0) == 30.0);
  CHECK(m.loss(30, 30) == doctest::Approx(3.0));
  CHECK(m.loss(30, 40) == doctest::Approx(4.0));
  CHECK_THROWS_AS(LossModel::parametric(-0.1), HandoverError);
}

TEST_CASE("exact anticipation loses nothing") {
  const auto curve = expected_loss_curve(rtt_of({30}), LossModel::parametric(0.0), {30.0});
  CHECK(curve[0].expected_loss_ms == 0.0);
  CHECK(curve[0].expected_packets == 0.0);
}

TEST_CASE("reactive anchor: loss at a=0 is the mean one-way delay") {
  Rng rng(2);
  for (int iter = 0; iter < 50; ++iter) {
    std::vector<double> rtt;
    for (std::size_t i = 0, n = 1 + rng.index(400); i < n; ++i) rtt.push_back(rng.uniform(1.0, 300.0));
    const auto dist = stats::from_samples(Metric::rtt_ms, rtt, 5.0);
    for (double scale : {0.5, 1.0}) {
      const auto c = expected_loss_curve(dist, LossModel::parametric(0.1), {0.0}, scale);
      CHECK(c[0].expected_loss_ms == doctest::Approx(scale * dist.mean).epsilon(1e-12));
    }
  }
}

TEST_CASE("uniform one-way delays {10,20,30}") {
  const std::vector<double> d{10, 20, 30};
  const auto grid = make_grid(100, 5);
  CHECK(grid.size() == 21);
  const auto curve = expected_loss_curve(rtt_of(d), LossModel::parametric(0.1), grid);
  for (const auto& p : curve) {
    CHECK(p.expected_loss_ms == doctest::Approx(testing::parametric_loss(d, p.anticipation_ms, 0.1)).epsilon(1e-12));
    CHECK(p.expected_packets == p.expected_loss_ms / 10.0);
  }
  const auto best = argmin_anticipation(curve);
  CHECK(best.anticipation_ms == 30.0);
  CHECK(best.expected_loss_ms == doctest::Approx(3.0));
  CHECK(best.expected_loss_ms / kPacketIntervalMs == doctest::Approx(0.3));
  CHECK_FALSE(best.flat);
}

TEST_CASE("argmin and flatness") {
  const auto convex = argmin_anticipation(points({{0, 10}, {5, 4}, {10, 1}, {15, 4}, {20, 10}}));
  CHECK(convex.anticipation_ms == 10.0);
  CHECK_FALSE(convex.flat);

  const auto constant = argmin_anticipation(points({{0, 5}, {5, 5}, {10, 5}}));
  CHECK(constant.flat);
  CHECK(constant.anticipation_ms == 0.0);

  CHECK(argmin_anticipation(points({{0, 0}, {5, 0}})).flat);
  CHECK(argmin_anticipation(points({{0, 10}, {5, 8}, {10, 6}})).flat);  // minimum at the grid end
  CHECK_THROWS_AS(argmin_anticipation({}), HandoverError);
}

TEST_CASE("quantile law for on-grid delays") {
  Rng rng(17);
  const double step = 5.0;
  const auto grid = make_grid(150, step);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<double> d;
    for (std::size_t i = 0, n = 1 + rng.index(60); i < n; ++i) d.push_back(step * static_cast<double>(rng.index(25)));
    for (double beta : {0.05, 0.1, 0.2}) {
      const auto best = argmin_anticipation(expected_loss_curve(rtt_of(d), LossModel::parametric(beta), grid));
      const double a = best.anticipation_ms;
      CHECK(testing::fraction_above(d, a) <= beta + 1e-12);
      if (a > 0.0) CHECK(beta <= testing::fraction_above(d, a - step) + 1e-12);
    }
  }
}

TEST_CASE("loss tables") {
  const LossTable t = parse_loss_table("delay\\anticipation,0,10,20\n0,0,1,2\n10,10,1,2\n20,20,11,2\n");
  CHECK(t.at(10, 10) == 1.0);
  CHECK(t.at(5, 0) == 5.0);
  CHECK(t.at(15, 15) == doctest::Approx((1 + 2 + 11 + 2) / 4.0));
  CHECK(t.at(20, 20) == 2.0);
  CHECK_THROWS_AS(t.at(25, 0), HandoverError);
  CHECK_THROWS_AS(t.at(0, -1), HandoverError);

  const LossModel m = LossModel::from_table(t);
  CHECK(m.kind() == LossModel::Kind::table);
  const auto curve = expected_loss_curve(rtt_of({10, 20}), m, {0, 10, 20});
  CHECK(curve[0].expected_loss_ms == doctest::Approx(15.0));
  CHECK(curve[1].expected_loss_ms == doctest::Approx(6.0));
  CHECK_THROWS_AS(expected_loss_curve(rtt_of({30}), m, {0}), HandoverError);

  CHECK_THROWS_AS(parse_loss_table("x,0,10\n0,1\n"), HandoverError);
  CHECK_THROWS_AS(parse_loss_table("x,10,0\n0,1,1\n"), HandoverError);
  CHECK_THROWS_AS(parse_loss_table("x,0\n0,-1\n"), HandoverError);
}

TEST_CASE("curve input checks") {
  const auto hops = stats::from_samples(Metric::hop_count, {8}, 1.0);
  CHECK_THROWS_AS(expected_loss_curve(hops, LossModel::parametric(), {0}), HandoverError);
  CHECK_THROWS_AS(expected_loss_curve(rtt_of({10}), LossModel::parametric(), {}), HandoverError);
  CHECK_THROWS_AS(expected_loss_curve(rtt_of({10}), LossModel::parametric(), {-5}), HandoverError);
  CHECK_THROWS_AS(expected_loss_curve(rtt_of({10}), LossModel::parametric(), {0}, 0.0), HandoverError);
  CHECK(format_curve(expected_loss_curve(rtt_of({10}), LossModel::parametric(0.1), {0, 5})) ==
        "# anticipation_ms\texpected_loss_ms\texpected_packets\n0\t10\t1\n5\t5.5\t0.55\n");
}

TEST_CASE("multicast persistence") {
  const PersistenceTable t2{{{2, 0.8}}};
  CHECK(multicast_persistence(stats::from_samples(Metric::hop_count, {2}, 1.0), t2) == doctest::Approx(0.8));
  const PersistenceTable t12{{{1, 1.0}, {2, 0.8}}};
  CHECK(multicast_persistence(stats::from_samples(Metric::hop_count, {1, 2}, 1.0), t12) == doctest::Approx(0.9));

  CHECK_THROWS_WITH_AS(multicast_persistence(stats::from_samples(Metric::hop_count, {1, 2, 3, 5}, 1.0), t12),
                       doctest::Contains("3, 5"), HandoverError);
  CHECK_THROWS_AS(multicast_persistence(stats::from_samples(Metric::rtt_ms, {1}, 1.0), t12), HandoverError);
  CHECK_THROWS_AS(PersistenceTable({{{1, 1.5}}}).validate(), HandoverError);

  const auto parsed = parse_persistence_table("hop,persist_ratio\n1,1.0\n2,0.8\n");
  CHECK(parsed.entries == t12.entries);
  CHECK_THROWS_AS(parse_persistence_table("1,1.0\n"), HandoverError);
}

TEST_CASE("geometric tail matches direct summation") {
  // P(h) proportional to 0.7^(h-1) on 1..40; table 0.97^h.
  std::vector<double> samples;
  for (int h = 1; h <= 40; ++h) {
    const auto copies = static_cast<int>(std::round(10000.0 * std::pow(0.7, h - 1)));
    samples.insert(samples.end(), static_cast<std::size_t>(copies), static_cast<double>(h));
  }
  PersistenceTable table;
  for (int h = 0; h <= 40; ++h) table.entries[h] = std::pow(0.97, h);
  double direct = 0.0;
  for (double h : samples) direct += table.entries.at(static_cast<int>(h));
  direct /= static_cast<double>(samples.size());
  const auto dist = stats::from_samples(Metric::hop_count, samples, 1.0);
  CHECK(std::abs(multicast_persistence(dist, table) - direct) < 1e-12);
  CHECK(std::abs(multicast_persistence(stats::parse_distribution(stats::format_distribution(dist)), table) - direct) < 1e-12);
}

TEST_CASE("stochastic dominance and decreasing tables") {
  Rng rng(23);
  for (int iter = 0; iter < 100; ++iter) {
    PersistenceTable table;
    double r = 1.0;
    for (int h = 0; h <= 60; ++h) table.entries[h] = r *= rng.uniform(0.85, 1.0);
    std::vector<double> b, a;
    for (std::size_t i = 0, n = 5 + rng.index(200); i < n; ++i) {
      const double h = static_cast<double>(1 + rng.index(30));
      b.push_back(h);
      a.push_back(h + static_cast<double>(rng.index(5)));  // A dominates B
    }
    const double pa = multicast_persistence(stats::from_samples(Metric::hop_count, a, 1.0), table);
    const double pb = multicast_persistence(stats::from_samples(Metric::hop_count, b, 1.0), table);
    CHECK(pa <= pb + 1e-15);
  }
}
