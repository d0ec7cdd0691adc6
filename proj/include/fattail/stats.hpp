#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace fattail {

inline constexpr double default_confidence = 0.997;
inline constexpr std::size_t default_resamples = 2000;
inline constexpr std::size_t jackknife_block_threshold = 10000;

/// (1/M) sum x^n, n in 1..4.
double raw_moment(std::span<const double> sample, int n);
/// m4 / m2^2 - 3 with central moments.
double excess_kurtosis_sample(std::span<const double> sample);

struct EmpiricalCCDF {
  std::vector<double> thresholds;
  std::vector<double> probabilities;  // fraction of the sample >= threshold
};

EmpiricalCCDF empirical_ccdf(std::span<const double> sample, std::span<const double> thresholds);

/// Least-squares slope of log P against log x over thresholds in
/// [x_lo, x_hi] with P > 0. Needs at least 10 such points.
double tail_slope(const EmpiricalCCDF& ccdf, double x_lo, double x_hi);

/// n log-spaced points from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, std::size_t n);

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;     // every value offered, in range or not
  std::uint64_t in_range = 0;

  std::size_t bins() const { return counts.size(); }
  double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }
  double bin_center(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * bin_width(); }
  /// Density normalized over the in-range values, so sum(density * width) = 1.
  std::vector<double> density() const;
};

Histogram make_histogram(std::span<const double> sample, double lo, double hi, std::size_t bins);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Asymptotic Kolmogorov distribution tail Q(lambda) = P(K > lambda).
double kolmogorov_sf(double lambda);

KsResult ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf);
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

struct BootstrapCI {
  double point_estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double confidence = default_confidence;
  std::size_t n_resamples = 0;
  std::string method = "BCa";
  double bias_correction = 0.0;  // z0
  double acceleration = 0.0;     // a
  std::string jackknife;          // "leave-one-out" or "leave-block-out:<blocks>"
  bool degenerate = false;

  bool contains(double v) const { return lower <= v && v <= upper; }
};

using SampleStatistic = std::function<double(std::span<const double>)>;

/// Raw power sums normalized by the count: m[0] = 1, m[k] = (1/n) sum x^k.
using MomentVector = std::array<double, 5>;
using MomentStatistic = std::function<double(const MomentVector&)>;

/// BCa interval for an arbitrary statistic. Resample b draws its indices from
/// RngStream(seed, b, rng_domain::bootstrap), so the result does not depend
/// on the order in which resamples are evaluated or on `threads`
/// (0 = hardware concurrency).
BootstrapCI bca_interval(std::span<const double> sample, const SampleStatistic& statistic,
                         double confidence, std::size_t n_resamples, std::uint64_t seed,
                         unsigned threads = 0);

/// Same interval for statistics that are functions of the first four raw
/// moments; O(n) per resample, no copies.
BootstrapCI bca_moment_interval(std::span<const double> sample, const MomentStatistic& statistic,
                                double confidence, std::size_t n_resamples, std::uint64_t seed,
                                unsigned threads = 0);

/// Several moment statistics over one shared set of resamples.
std::vector<BootstrapCI> bca_moment_intervals(std::span<const double> sample,
                                              std::span<const MomentStatistic> statistics,
                                              double confidence, std::size_t n_resamples,
                                              std::uint64_t seed, unsigned threads = 0);

/// Convenience: BCa interval for the mean of `values`.
BootstrapCI bca_mean_interval(std::span<const double> values, double confidence,
                              std::size_t n_resamples, std::uint64_t seed, unsigned threads = 0);

/// Excess kurtosis m4/m2^2 - 3 (central moments) from a raw moment vector.
double kurtosis_from_moments(const MomentVector& m);

}  // namespace fattail
