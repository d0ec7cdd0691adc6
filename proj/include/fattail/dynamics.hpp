#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fattail/distributions.hpp"
#include "fattail/sampler.hpp"
#include "fattail/stats.hpp"

namespace fattail {

enum class WalkMode { additive, multiplicative };

/// Euler-Maruyama random walk. In additive mode the state is ln S, in
/// multiplicative mode it is S itself.
struct WalkConfig {
  WalkMode mode = WalkMode::multiplicative;
  double mu = 0.0;
  double sigma = 1.0;
  double dt = 1e-3;
  std::size_t n_steps = 1000;
  double s0 = 1.0;
  Distribution shock_model = Distribution::gaussian();
  std::size_t n_paths = 1;
  double bound = default_support_bound;  // support of non-Gaussian shocks

  void validate() const;
};

/// ln S' = ln S + (mu - sigma^2/2) dt + sigma xi sqrt(dt)
double step_additive(double ln_s, double xi, const WalkConfig& config);
/// S' = S (1 + mu dt + sigma xi sqrt(dt)); may return <= 0 for extreme xi.
double step_multiplicative(double s, double xi, const WalkConfig& config);

enum class ShockMode { automatic, materialized, just_in_time };

inline constexpr std::uint64_t materialize_limit = 100'000'000;

struct EnsembleOptions {
  /// Steps k (1..N) at which the state is recorded; empty means {N}.
  std::vector<std::size_t> record_steps;
  bool full_paths = false;        // record every step 0..N
  bool track_running_max = false; // max of the state over steps 1..N
  ShockMode shock_mode = ShockMode::automatic;
  unsigned threads = 0;           // 0 = hardware concurrency
};

struct EnsembleDiagnostics {
  std::uint64_t resampled_steps = 0;
  std::uint64_t absorbed_paths = 0;
  bool materialized = false;
};

/// M paths observed at `steps`; values are row-major, one row per path.
struct PathEnsemble {
  WalkConfig config;
  std::uint64_t seed = 0;
  std::vector<std::size_t> steps;
  std::vector<double> values;
  std::vector<double> running_max;  // empty unless requested
  double normalization_s = 1.0;
  EnsembleDiagnostics diagnostics;

  std::size_t n_paths() const { return config.n_paths; }
  double time(std::size_t column) const { return static_cast<double>(steps[column]) * config.dt; }
  double at(std::size_t path, std::size_t column) const { return values[path * steps.size() + column]; }
  /// All paths at one recorded column.
  std::vector<double> column(std::size_t column) const;
};

/// Simulates `config.n_paths` independent paths. Path i draws its shocks
/// from RngStream(seed, i, rng_domain::shocks). Non-Gaussian shocks are
/// divided by the sample standard deviation of all M x N raw shocks of the
/// ensemble. A multiplicative step that would reach S <= 0 is redrawn once
/// from the path's resample stream; if it is still non-positive the path is
/// absorbed at 1e-12 S(0). Output is independent of the thread count.
PathEnsemble simulate_ensemble(const WalkConfig& config, std::uint64_t seed,
                               const EnsembleOptions& options = {});

struct MomentCheck {
  std::size_t n_steps = 0;
  double time = 0.0;
  int order = 0;
  double sample_value = 0.0;
  BootstrapCI ci;
  double prediction = 0.0;
  bool pass = false;
};

struct LimitHistogram {
  std::size_t n_steps = 0;
  Histogram histogram;
  std::vector<double> limit_density;  // asymptotic density at the bin centers
};

struct LimitKs {
  std::size_t n_steps = 0;
  KsResult ks;
};

struct ConvergenceOptions {
  double dt = 1e-3;
  double confidence = default_confidence;
  std::size_t n_resamples = default_resamples;
  double bound = default_support_bound;
  std::size_t histogram_bins = 100;
  unsigned threads = 0;
};

struct ConvergenceReport {
  std::vector<MomentCheck> moments;
  std::vector<LimitHistogram> histograms;
  std::vector<LimitKs> ks;
  /// CLT crossover N* = excess kurtosis of the shocks (infinite for pure
  /// power-law tails).
  ExcessKurtosis crossover = ExcessKurtosis::finite(0.0);
  /// Ensemble-average validity horizon tau ~ ln M (multiplicative case).
  double validity_horizon = 0.0;
  EnsembleDiagnostics diagnostics;
  double normalization_s = 1.0;
};

/// Additive walk ln S(t+dt) = ln S(t) + xi sqrt(dt) from ln S(0) = 0:
/// 2nd and 4th raw moments of ln S against t and 3t^2 with BCa intervals,
/// histograms and KS against N(0, t).
ConvergenceReport clt_report(const Distribution& shock_model, std::span<const std::size_t> n_list,
                             std::size_t m, std::uint64_t seed, const ConvergenceOptions& options = {});

/// Multiplicative walk S(t+dt) = S + S dt/2 + S xi sqrt(dt) from S(0) = 1:
/// raw moments n = 1..4 against exp(n^2 t / 2), histograms and KS against
/// the log-normal with ln S ~ N(0, t).
ConvergenceReport mclt_report(const Distribution& shock_model, std::span<const std::size_t> n_list,
                              std::size_t m, std::uint64_t seed, const ConvergenceOptions& options = {});

}  // namespace fattail
