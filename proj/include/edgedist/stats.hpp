#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "edgedist/transit.hpp"

/// Empirical edge-distance distributions.
namespace edgedist::stats {

class StatsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Metric { hop_count, rtt_ms };

std::string_view to_string(Metric m) noexcept;
std::optional<Metric> parse_metric(std::string_view text) noexcept;

inline constexpr double kDefaultRttBinMs = 5.0;

struct Bin {
  double lower_edge = 0.0;
  std::size_t count = 0;
  // Mean of the samples in this bin; centre when empty. Files without the
  // column get the lower edge for hops and the centre for rtt.
  double mean = 0.0;

  friend bool operator==(const Bin&, const Bin&) = default;
};

/// Histogram plus summary statistics. Bins are contiguous from the lowest
/// to the highest occupied one; bin k covers [k*w, (k+1)*w). mean and std
/// are computed from the raw samples (population std).
struct EdgeDistribution {
  Metric metric = Metric::hop_count;
  double bin_width = 1.0;
  std::vector<Bin> bins;
  std::size_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t excluded = 0;     // pairs without an accepted estimate
  std::vector<double> samples;  // sorted; empty when loaded from a TSV export
};

EdgeDistribution from_samples(Metric metric, std::vector<double> samples, double bin_width,
                              std::size_t excluded = 0);

/// Uses best_hop / best_rtt of every accepted outcome; throws StatsError
/// "empty distribution" when nothing was accepted.
EdgeDistribution build_distribution(const std::vector<transit::PairOutcome>& outcomes, Metric metric,
                                    double bin_width);

std::vector<double> accepted_samples(const std::vector<transit::PairOutcome>& outcomes, Metric metric);

/// (value, multiplicity) pairs, ascending: the raw samples when available,
/// otherwise one entry per occupied bin at its bin mean.
std::vector<std::pair<double, std::size_t>> weighted_support(const EdgeDistribution& dist);

struct Stability {
  double max_mean_dev = 0.0;
  double max_std_dev = 0.0;
};

/// Largest absolute deviation of mean and std over `trials` random subsets
/// of `subset_size` samples, relative to the full sample.
Stability resample_stability(const std::vector<double>& samples, std::size_t subset_size,
                             std::size_t trials, std::uint64_t seed);
Stability resample_stability(const std::vector<transit::PairOutcome>& outcomes, Metric metric,
                             std::size_t subset_size, std::size_t trials, std::uint64_t seed);

struct CcdfPoint {
  double threshold;
  double fraction;  // share of samples strictly above threshold
};

/// One point per bin lower edge plus the upper edge of the last bin.
std::vector<CcdfPoint> ccdf(const EdgeDistribution& dist);

struct Comparison {
  double mean_shift = 0.0;    // mean(a) - mean(b)
  double ks_statistic = 0.0;  // sup |F_a - F_b|
};

Comparison compare_distributions(const EdgeDistribution& a, const EdgeDistribution& b);

// Export: "# key=value ..." header, then lower_edge<TAB>count<TAB>fraction<TAB>bin_mean.
std::string format_distribution(const EdgeDistribution& dist);
EdgeDistribution parse_distribution(std::string_view tsv);
EdgeDistribution read_distribution(const std::filesystem::path& path);

}  // namespace edgedist::stats
