#include "fattail/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fattail/error.hpp"
#include "fattail/rng.hpp"
#include "fattail/special.hpp"
#include "parallel.hpp"

namespace fattail {

using special::normal_cdf;
using special::normal_quantile;
namespace {

constexpr std::size_t min_bootstrap_size = 10;

void require_nonempty(std::span<const double> sample, const char* what) {
  if (sample.empty()) throw DegenerateInputError(std::string(what) + ": empty sample");
}

// Linear interpolation between order statistics (Hyndman-Fan type 7).
double sorted_quantile(const std::vector<double>& sorted, double p) {
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

struct JackknifeSpec {
  std::size_t groups;
  bool leave_one_out;
  std::size_t begin(std::size_t g, std::size_t n) const { return n * g / groups; }
  std::size_t end(std::size_t g, std::size_t n) const { return n * (g + 1) / groups; }
  std::string label() const {
    return leave_one_out ? "leave-one-out" : "leave-block-out:" + std::to_string(groups);
  }
};

JackknifeSpec jackknife_spec(std::size_t n) {
  if (n <= jackknife_block_threshold) return {n, true};
  return {jackknife_block_threshold, false};
}

double acceleration(const std::vector<double>& jack) {
  double mean = 0.0;
  for (double v : jack) mean += v;
  mean /= static_cast<double>(jack.size());
  double s2 = 0.0, s3 = 0.0;
  for (double v : jack) {
    const double d = mean - v;
    s2 += d * d;
    s3 += d * d * d;
  }
  if (!(s2 > 0.0)) return 0.0;
  return s3 / (6.0 * std::pow(s2, 1.5));
}

// Assembles the BCa interval from the point estimate, the bootstrap
// replicates and the jackknife replicates.
BootstrapCI assemble(double theta, std::vector<double> boot, const std::vector<double>& jack,
                     double confidence, const std::string& jack_label) {
  BootstrapCI ci;
  ci.point_estimate = theta;
  ci.confidence = confidence;
  ci.n_resamples = boot.size();
  ci.jackknife = jack_label;
  std::sort(boot.begin(), boot.end());
  if (boot.front() == boot.back()) {
    ci.lower = ci.upper = theta;
    ci.degenerate = true;
    return ci;
  }
  const double b = static_cast<double>(boot.size());
  const auto below = std::lower_bound(boot.begin(), boot.end(), theta) - boot.begin();
  const auto upto = std::upper_bound(boot.begin(), boot.end(), theta) - boot.begin();
  double frac = (static_cast<double>(below) + 0.5 * static_cast<double>(upto - below)) / b;
  frac = std::clamp(frac, 0.5 / b, 1.0 - 0.5 / b);
  const double z0 = normal_quantile(frac);
  const double a = acceleration(jack);
  ci.bias_correction = z0;
  ci.acceleration = a;

  auto adjusted = [&](double tail) {
    const double z = z0 + normal_quantile(tail);
    const double denom = 1.0 - a * z;
    if (!(denom > 0.0)) return z > 0.0 ? 1.0 : 0.0;
    return normal_cdf(z0 + z / denom);
  };
  const double alpha = 0.5 * (1.0 - confidence);
  ci.lower = sorted_quantile(boot, adjusted(alpha));
  ci.upper = sorted_quantile(boot, adjusted(1.0 - alpha));
  return ci;
}

void validate_bootstrap(std::span<const double> sample, double confidence, std::size_t n_resamples) {
  if (sample.size() < min_bootstrap_size)
    throw InsufficientDataError("bootstrap: sample size must be >= " + std::to_string(min_bootstrap_size));
  if (!(confidence > 0.0 && confidence < 1.0)) throw ParameterDomainError("bootstrap: confidence must lie in (0, 1)");
  if (n_resamples < 2) throw ParameterDomainError("bootstrap: need at least 2 resamples");
}

MomentVector moments_of_sums(const std::array<double, 5>& sums, double count) {
  MomentVector m{1.0, 0.0, 0.0, 0.0, 0.0};
  for (int k = 1; k <= 4; ++k) m[k] = sums[k] / count;
  return m;
}

}  // namespace

double raw_moment(std::span<const double> sample, int n) {
  require_nonempty(sample, "raw_moment");
  if (n < 1 || n > 4) throw ParameterDomainError("raw_moment: order must be 1..4");
  double s = 0.0;
  for (double x : sample) {
    double p = x;
    for (int k = 1; k < n; ++k) p *= x;
    s += p;
  }
  return s / static_cast<double>(sample.size());
}

double excess_kurtosis_sample(std::span<const double> sample) {
  if (sample.size() < 2) throw DegenerateInputError("excess_kurtosis_sample: need at least 2 values");
  const double mean = raw_moment(sample, 1);
  double m2 = 0.0, m4 = 0.0;
  for (double x : sample) {
    const double d2 = (x - mean) * (x - mean);
    m2 += d2;
    m4 += d2 * d2;
  }
  const double n = static_cast<double>(sample.size());
  m2 /= n;
  m4 /= n;
  if (!(m2 > 0.0)) throw DegenerateInputError("excess_kurtosis_sample: zero variance");
  return m4 / (m2 * m2) - 3.0;
}

EmpiricalCCDF empirical_ccdf(std::span<const double> sample, std::span<const double> thresholds) {
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  EmpiricalCCDF out;
  out.thresholds.assign(thresholds.begin(), thresholds.end());
  out.probabilities.reserve(thresholds.size());
  const double n = static_cast<double>(sorted.size());
  for (double t : thresholds) {
    const auto at_or_above = sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), t);
    out.probabilities.push_back(sorted.empty() ? 0.0 : static_cast<double>(at_or_above) / n);
  }
  return out;
}

double tail_slope(const EmpiricalCCDF& ccdf, double x_lo, double x_hi) {
  std::vector<double> lx, lp;
  for (std::size_t i = 0; i < ccdf.thresholds.size(); ++i) {
    const double x = ccdf.thresholds[i];
    const double p = ccdf.probabilities[i];
    if (x >= x_lo && x <= x_hi && x > 0.0 && p > 0.0) {
      lx.push_back(std::log(x));
      lp.push_back(std::log(p));
    }
  }
  if (lx.size() < 10)
    throw InsufficientDataError("tail_slope: fewer than 10 thresholds with nonzero probability in range");
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += lp[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (lp[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxy / sxx;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0 && hi > lo) || n < 2) throw ParameterDomainError("log_spaced: need 0 < lo < hi and n >= 2");
  std::vector<double> out(n);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> Histogram::density() const {
  std::vector<double> d(counts.size(), 0.0);
  if (in_range == 0) return d;
  const double norm = static_cast<double>(in_range) * bin_width();
  for (std::size_t i = 0; i < counts.size(); ++i) d[i] = static_cast<double>(counts[i]) / norm;
  return d;
}

Histogram make_histogram(std::span<const double> sample, double lo, double hi, std::size_t bins) {
  if (!(hi > lo) || bins == 0) throw ParameterDomainError("make_histogram: need hi > lo and bins >= 1");
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.counts.assign(bins, 0);
  const double scale = static_cast<double>(bins) / (hi - lo);
  for (double x : sample) {
    ++h.total;
    if (!(x >= lo && x <= hi)) continue;
    auto i = static_cast<std::size_t>((x - lo) * scale);
    if (i >= bins) i = bins - 1;
    ++h.counts[i];
    ++h.in_range;
  }
  return h;
}

double kolmogorov_sf(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.18) {
    // Jacobi theta form of the CDF converges fast for small lambda.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double cdf = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double odd = 2.0 * k - 1.0;
      cdf += std::exp(-odd * odd * pi2 / (8.0 * lambda * lambda));
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sf = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sf += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(sf, 0.0, 1.0);
}

namespace {

double ks_p_value(double d, double ne) {
  if (d == 0.0) return 1.0;
  const double root = std::sqrt(ne);
  return kolmogorov_sf((root + 0.12 + 0.11 / root) * d);
}

}  // namespace

KsResult ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf) {
  require_nonempty(sample, "ks_one_sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double f = cdf(sorted[i]);
    d = std::max(d, std::max(f - static_cast<double>(i) / n, static_cast<double>(j) / n - f));
    i = j;
  }
  return {d, ks_p_value(d, n)};
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a, "ks_two_sample");
  require_nonempty(b, "ks_two_sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {d, ks_p_value(d, na * nb / (na + nb))};
}

BootstrapCI bca_interval(std::span<const double> sample, const SampleStatistic& statistic,
                         double confidence, std::size_t n_resamples, std::uint64_t seed, unsigned threads) {
  validate_bootstrap(sample, confidence, n_resamples);
  const std::size_t n = sample.size();
  const double theta = statistic(sample);

  std::vector<double> boot(n_resamples);
  detail::parallel_for(n_resamples, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> buf(n);
    for (std::size_t b = begin; b < end; ++b) {
      RngStream rng(seed, b, rng_domain::bootstrap);
      for (auto& v : buf) v = sample[rng.below(n)];
      boot[b] = statistic(buf);
    }
  });

  const JackknifeSpec spec = jackknife_spec(n);
  std::vector<double> jack(spec.groups);
  detail::parallel_for(spec.groups, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> buf;
    buf.reserve(n);
    for (std::size_t g = begin; g < end; ++g) {
      buf.clear();
      buf.insert(buf.end(), sample.begin(), sample.begin() + static_cast<std::ptrdiff_t>(spec.begin(g, n)));
      buf.insert(buf.end(), sample.begin() + static_cast<std::ptrdiff_t>(spec.end(g, n)), sample.end());
      jack[g] = statistic(buf);
    }
  });
  return assemble(theta, std::move(boot), jack, confidence, spec.label());
}

std::vector<BootstrapCI> bca_moment_intervals(std::span<const double> sample,
                                              std::span<const MomentStatistic> statistics,
                                              double confidence, std::size_t n_resamples,
                                              std::uint64_t seed, unsigned threads) {
  validate_bootstrap(sample, confidence, n_resamples);
  const std::size_t n = sample.size();
  const double count = static_cast<double>(n);
  const std::size_t k = statistics.size();

  auto add_powers = [](std::array<double, 5>& s, double x) {
    const double x2 = x * x;
    s[1] += x;
    s[2] += x2;
    s[3] += x2 * x;
    s[4] += x2 * x2;
  };

  std::array<double, 5> total{};
  for (double x : sample) add_powers(total, x);
  const MomentVector full = moments_of_sums(total, count);

  std::vector<double> boot(n_resamples * k);
  detail::parallel_for(n_resamples, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t b = begin; b < end; ++b) {
      RngStream rng(seed, b, rng_domain::bootstrap);
      std::array<double, 5> s{};
      for (std::size_t i = 0; i < n; ++i) add_powers(s, sample[rng.below(n)]);
      const MomentVector m = moments_of_sums(s, count);
      for (std::size_t j = 0; j < k; ++j) boot[j * n_resamples + b] = statistics[j](m);
    }
  });

  const JackknifeSpec spec = jackknife_spec(n);
  std::vector<double> jack(spec.groups * k);
  for (std::size_t g = 0; g < spec.groups; ++g) {
    std::array<double, 5> left{};
    const std::size_t lo = spec.begin(g, n), hi = spec.end(g, n);
    for (std::size_t i = lo; i < hi; ++i) add_powers(left, sample[i]);
    std::array<double, 5> rest{};
    for (int p = 1; p <= 4; ++p) rest[p] = total[p] - left[p];
    const MomentVector m = moments_of_sums(rest, count - static_cast<double>(hi - lo));
    for (std::size_t j = 0; j < k; ++j) jack[j * spec.groups + g] = statistics[j](m);
  }

  std::vector<BootstrapCI> out;
  out.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> bj(boot.begin() + static_cast<std::ptrdiff_t>(j * n_resamples),
                           boot.begin() + static_cast<std::ptrdiff_t>((j + 1) * n_resamples));
    std::vector<double> jj(jack.begin() + static_cast<std::ptrdiff_t>(j * spec.groups),
                           jack.begin() + static_cast<std::ptrdiff_t>((j + 1) * spec.groups));
    out.push_back(assemble(statistics[j](full), std::move(bj), jj, confidence, spec.label()));
  }
  return out;
}

BootstrapCI bca_moment_interval(std::span<const double> sample, const MomentStatistic& statistic,
                                double confidence, std::size_t n_resamples, std::uint64_t seed, unsigned threads) {
  const MomentStatistic stats[] = {statistic};
  return bca_moment_intervals(sample, stats, confidence, n_resamples, seed, threads).front();
}

BootstrapCI bca_mean_interval(std::span<const double> values, double confidence,
                              std::size_t n_resamples, std::uint64_t seed, unsigned threads) {
  return bca_moment_interval(
      values, [](const MomentVector& m) { return m[1]; }, confidence, n_resamples, seed, threads);
}

double kurtosis_from_moments(const MomentVector& m) {
  const double mean = m[1];
  const double m2 = m[2] - mean * mean;
  const double m4 = m[4] - 4.0 * mean * m[3] + 6.0 * mean * mean * m[2] - 3.0 * mean * mean * mean * mean;
  return m4 / (m2 * m2) - 3.0;
}

}  // namespace fattail
