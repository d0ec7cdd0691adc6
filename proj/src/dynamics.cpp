#include "fattail/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <string>

#include "fattail/error.hpp"
#include "fattail/special.hpp"
#include "parallel.hpp"

namespace fattail {

using special::normal_cdf;
using special::normal_pdf;
namespace {

constexpr double absorption_floor = 1e-12;

// Welford accumulator merged with Chan's pairwise formula.
struct RunningStats {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    count += 1.0;
    const double d = x - mean;
    mean += d / count;
    m2 += d * (x - mean);
  }

  void merge(const RunningStats& o) {
    if (o.count == 0.0) return;
    const double n = count + o.count;
    const double d = o.mean - mean;
    mean += d * o.count / n;
    m2 += o.m2 + d * d * count * o.count / n;
    count = n;
  }
};

std::vector<std::size_t> resolve_steps(const WalkConfig& config, const EnsembleOptions& options) {
  std::vector<std::size_t> steps;
  if (options.full_paths) {
    steps.resize(config.n_steps + 1);
    std::iota(steps.begin(), steps.end(), std::size_t{0});
    return steps;
  }
  steps = options.record_steps.empty() ? std::vector<std::size_t>{config.n_steps} : options.record_steps;
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
  for (auto k : steps)
    if (k > config.n_steps)
      throw ConfigError("simulate_ensemble: record step " + std::to_string(k) + " exceeds N = " +
                        std::to_string(config.n_steps));
  return steps;
}

}  // namespace

void WalkConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterDomainError("walk: dt must be positive");
  if (n_steps < 1) throw ParameterDomainError("walk: N must be >= 1");
  if (!(s0 > 0.0) || !std::isfinite(s0)) throw ParameterDomainError("walk: S(0) must be positive");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ParameterDomainError("walk: sigma must be >= 0");
  if (!std::isfinite(mu)) throw ParameterDomainError("walk: mu must be finite");
  if (n_paths < 1) throw ParameterDomainError("walk: M must be >= 1");
  if (!(bound > 0.0)) throw ParameterDomainError("walk: support bound must be positive");
}

double step_additive(double ln_s, double xi, const WalkConfig& c) {
  return ln_s + (c.mu - 0.5 * c.sigma * c.sigma) * c.dt + c.sigma * xi * std::sqrt(c.dt);
}

double step_multiplicative(double s, double xi, const WalkConfig& c) {
  return s * (1.0 + c.mu * c.dt + c.sigma * xi * std::sqrt(c.dt));
}

std::vector<double> PathEnsemble::column(std::size_t col) const {
  std::vector<double> out(n_paths());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i, col);
  return out;
}

PathEnsemble simulate_ensemble(const WalkConfig& config, std::uint64_t seed, const EnsembleOptions& options) {
  config.validate();
  const std::size_t m = config.n_paths;
  const std::size_t n = config.n_steps;

  PathEnsemble ens;
  ens.config = config;
  ens.seed = seed;
  ens.steps = resolve_steps(config, options);
  const std::size_t cols = ens.steps.size();
  ens.values.assign(m * cols, 0.0);
  if (options.track_running_max) ens.running_max.assign(m, 0.0);

  const ShockSource source(config.shock_model, config.bound);
  const bool normalize = source.needs_normalization();
  const bool materialize =
      normalize && (options.shock_mode == ShockMode::materialized ||
                    (options.shock_mode == ShockMode::automatic &&
                     static_cast<double>(m) * static_cast<double>(n) <= static_cast<double>(materialize_limit)));
  ens.diagnostics.materialized = materialize;

  // Pass 1: sample std of all raw shocks, reduced in path order.
  std::vector<double> pool;
  double s = 1.0;
  if (normalize) {
    if (materialize) pool.resize(m * n);
    std::vector<RunningStats> per_path(m);
    detail::parallel_for(m, options.threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        RngStream rng(seed, i, rng_domain::shocks);
        for (std::size_t k = 0; k < n; ++k) {
          const double x = source.draw_raw(rng);
          per_path[i].add(x);
          if (materialize) pool[i * n + k] = x;
        }
      }
    });
    RunningStats total;
    for (const auto& p : per_path) total.merge(p);
    s = std::sqrt(total.m2 / total.count);
    if (!(s > 0.0) || !std::isfinite(s)) throw DegenerateInputError("simulate_ensemble: zero shock variance");
  }
  ens.normalization_s = s;

  std::atomic<std::uint64_t> resampled{0}, absorbed{0};
  const bool additive = config.mode == WalkMode::additive;
  const double floor = absorption_floor * config.s0;

  detail::parallel_for(m, options.threads, [&](std::size_t begin, std::size_t end) {
    std::uint64_t local_resampled = 0, local_absorbed = 0;
    for (std::size_t i = begin; i < end; ++i) {
      RngStream rng(seed, i, rng_domain::shocks);
      std::optional<RngStream> resample;
      double x = additive ? std::log(config.s0) : config.s0;
      double running = -std::numeric_limits<double>::infinity();
      bool dead = false;
      std::size_t col = 0;
      double* row = ens.values.data() + i * cols;
      if (col < cols && ens.steps[col] == 0) row[col++] = x;
      for (std::size_t k = 1; k <= n; ++k) {
        const double raw = materialize ? pool[i * n + (k - 1)] : source.draw_raw(rng);
        if (!dead) {
          const double xi = raw / s;
          if (additive) {
            x = step_additive(x, xi, config);
          } else {
            double next = step_multiplicative(x, xi, config);
            if (next <= 0.0) {
              ++local_resampled;
              if (!resample) resample.emplace(seed, i, rng_domain::shock_resample);
              next = step_multiplicative(x, source.draw_raw(*resample) / s, config);
              if (next <= 0.0) {
                ++local_absorbed;
                next = floor;
                dead = true;
              }
            }
            x = next;
          }
          if (!std::isfinite(x))
            throw NumericalError("simulate_ensemble: non-finite state on path " + std::to_string(i) + " at step " +
                                 std::to_string(k));
        }
        running = std::max(running, x);
        if (col < cols && ens.steps[col] == k) row[col++] = x;
      }
      if (options.track_running_max) ens.running_max[i] = running;
    }
    resampled += local_resampled;
    absorbed += local_absorbed;
  });
  ens.diagnostics.resampled_steps = resampled;
  ens.diagnostics.absorbed_paths = absorbed;
  return ens;
}

namespace {

enum class Limit { normal, log_normal };

ConvergenceReport convergence_report(const Distribution& shock_model, std::span<const std::size_t> n_list,
                                     std::size_t m, std::uint64_t seed, const ConvergenceOptions& options,
                                     Limit limit) {
  if (n_list.empty()) throw ConfigError("convergence report: empty N list");
  WalkConfig config;
  config.mode = limit == Limit::normal ? WalkMode::additive : WalkMode::multiplicative;
  config.mu = 0.5;
  config.sigma = 1.0;
  config.dt = options.dt;
  config.s0 = 1.0;
  config.shock_model = shock_model;
  config.n_paths = m;
  config.bound = options.bound;
  config.n_steps = *std::max_element(n_list.begin(), n_list.end());
  if (*std::min_element(n_list.begin(), n_list.end()) < 1) throw ConfigError("convergence report: N must be >= 1");

  EnsembleOptions eo;
  eo.record_steps.assign(n_list.begin(), n_list.end());
  eo.threads = options.threads;
  const PathEnsemble ens = simulate_ensemble(config, seed, eo);

  ConvergenceReport report;
  report.diagnostics = ens.diagnostics;
  report.normalization_s = ens.normalization_s;
  report.crossover = excess_kurtosis(shock_model);
  report.validity_horizon = std::log(static_cast<double>(m));

  const std::vector<int> orders = limit == Limit::normal ? std::vector<int>{2, 4} : std::vector<int>{1, 2, 3, 4};
  std::vector<MomentStatistic> stats;
  for (int order : orders) stats.push_back([order](const MomentVector& v) { return v[order]; });

  for (std::size_t col = 0; col < ens.steps.size(); ++col) {
    const std::size_t steps = ens.steps[col];
    const double t = ens.time(col);
    const std::vector<double> x = ens.column(col);
    const auto cis = bca_moment_intervals(x, stats, options.confidence, options.n_resamples, seed + col, options.threads);
    for (std::size_t j = 0; j < orders.size(); ++j) {
      const int order = orders[j];
      MomentCheck mc;
      mc.n_steps = steps;
      mc.time = t;
      mc.order = order;
      mc.sample_value = cis[j].point_estimate;
      mc.ci = cis[j];
      if (limit == Limit::normal)
        mc.prediction = order == 2 ? t : 3.0 * t * t;
      else
        mc.prediction = std::exp(order * order * t / 2.0);
      mc.pass = mc.ci.contains(mc.prediction);
      report.moments.push_back(mc);
    }

    const double root_t = std::sqrt(t);
    LimitHistogram lh;
    lh.n_steps = steps;
    if (limit == Limit::normal) {
      lh.histogram = make_histogram(x, -6.0 * root_t, 6.0 * root_t, options.histogram_bins);
      for (std::size_t b = 0; b < lh.histogram.bins(); ++b)
        lh.limit_density.push_back(normal_pdf(lh.histogram.bin_center(b) / root_t) / root_t);
      report.ks.push_back({steps, ks_one_sample(x, [root_t](double v) { return normal_cdf(v / root_t); })});
    } else {
      lh.histogram = make_histogram(x, 0.0, std::exp(6.0 * root_t), options.histogram_bins);
      for (std::size_t b = 0; b < lh.histogram.bins(); ++b) {
        const double c = lh.histogram.bin_center(b);
        lh.limit_density.push_back(normal_pdf(std::log(c) / root_t) / (root_t * c));
      }
      report.ks.push_back(
          {steps, ks_one_sample(x, [root_t](double v) { return v > 0.0 ? normal_cdf(std::log(v) / root_t) : 0.0; })});
    }
    report.histograms.push_back(std::move(lh));
  }
  return report;
}

}  // namespace

ConvergenceReport clt_report(const Distribution& shock_model, std::span<const std::size_t> n_list, std::size_t m,
                             std::uint64_t seed, const ConvergenceOptions& options) {
  return convergence_report(shock_model, n_list, m, seed, options, Limit::normal);
}

ConvergenceReport mclt_report(const Distribution& shock_model, std::span<const std::size_t> n_list, std::size_t m,
                              std::uint64_t seed, const ConvergenceOptions& options) {
  return convergence_report(shock_model, n_list, m, seed, options, Limit::log_normal);
}

}  // namespace fattail
