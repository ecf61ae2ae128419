#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "edgedist/stats.hpp"

/// Handover performance derived from edge-distance distributions: expected
/// loss as a function of anticipation time, and expected multicast
/// forwarding-state persistence.
namespace edgedist::handover {

class HandoverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Packets arrive at a constant bit rate of one per this many milliseconds.
inline constexpr double kPacketIntervalMs = 10.0;
inline constexpr double kDefaultDelayScale = 0.5;
inline constexpr double kDefaultBeta = 0.1;
inline constexpr double kDefaultFlatThreshold = 0.05;

/// Loss duration grid E[loss_ms | delay_ms, anticipation_ms], bilinearly
/// interpolated. No extrapolation beyond the axes.
class LossTable {
 public:
  LossTable(std::vector<double> delays, std::vector<double> anticipations, std::vector<double> values);

  double at(double delay_ms, double anticipation_ms) const;

  const std::vector<double>& delays() const noexcept { return delays_; }
  const std::vector<double>& anticipations() const noexcept { return anticipations_; }

 private:
  std::vector<double> delays_;
  std::vector<double> anticipations_;
  std::vector<double> values_;  // row-major, one row per delay
};

/// First row: corner cell then the anticipation axis; every further row: a
/// delay followed by its loss values.
LossTable parse_loss_table(std::string_view csv);
LossTable load_loss_table(const std::filesystem::path& path);

class LossModel {
 public:
  enum class Kind { table, default_parametric };

  /// L(d, a) = max(0, d - a) + beta * a. Late anticipation loses in-flight
  /// packets; anticipation itself costs proportionally.
  static LossModel parametric(double beta = kDefaultBeta);
  static LossModel from_table(LossTable table);

  double loss(double delay_ms, double anticipation_ms) const;

  Kind kind() const noexcept { return kind_; }
  double beta() const noexcept { return beta_; }

 private:
  LossModel(Kind kind, double beta, std::optional<LossTable> table)
      : kind_(kind), beta_(beta), table_(std::move(table)) {}

  Kind kind_;
  double beta_;
  std::optional<LossTable> table_;
};

struct CurvePoint {
  double anticipation_ms;
  double expected_loss_ms;
  double expected_packets;
};

/// Sum over occupied bins of P(bin) * L(delay_scale * bin_mean, a) for each
/// grid point. The distribution must be an RTT distribution.
std::vector<CurvePoint> expected_loss_curve(const stats::EdgeDistribution& delay_dist, const LossModel& model,
                                            const std::vector<double>& anticipation_grid,
                                            double delay_scale = kDefaultDelayScale);

/// 0, step, 2*step, ... up to and including `max` (within rounding).
std::vector<double> make_grid(double max, double step);

struct AnticipationOptimum {
  double anticipation_ms;
  double expected_loss_ms;
  // No pronounced minimum: the smaller curve end lies less than
  // threshold * mean(curve) above the minimum. Covers constant curves and
  // curves whose minimum sits on the grid boundary.
  bool flat;
};

AnticipationOptimum argmin_anticipation(const std::vector<CurvePoint>& curve,
                                        double flat_threshold = kDefaultFlatThreshold);

struct PersistenceTable {
  std::map<int, double> entries;  // hop distance -> persist ratio in [0, 1]

  void validate() const;
};

PersistenceTable parse_persistence_table(std::string_view csv);
PersistenceTable load_persistence_table(const std::filesystem::path& path);

/// Sum over hop values h of P(h) * persist_ratio(h). Every hop value with
/// probability mass must be in the table.
double multicast_persistence(const stats::EdgeDistribution& hop_dist, const PersistenceTable& table);

std::string format_curve(const std::vector<CurvePoint>& curve);

}  // namespace edgedist::handover
