#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fattail/distributions.hpp"
#include "fattail/rng.hpp"

namespace fattail {

inline constexpr double default_support_bound = 30.0;
inline constexpr std::size_t default_envelope_cells = 4096;
inline constexpr double envelope_safety = 1.02;

/// A batch of deviates with provenance. For rejection pools `values` are
/// already divided by `normalization_s`; multiply back to recover raw draws.
struct SamplePool {
  std::vector<double> values;
  std::string model;  // Distribution::describe()
  std::string generator;
  double bound = std::numeric_limits<double>::infinity();
  double normalization_s = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  double acceptance_rate = 1.0;

  std::size_t size() const { return values.size(); }
};

/// Acceptance-rejection sampler for a symmetric density restricted to
/// [-B, B]. The majorant is piecewise constant over `cells` uniform
/// sub-intervals, each 1.02 x the largest pdf value found on a dense grid;
/// cells touching an origin singularity use a power-law majorant instead.
/// Cells are picked with a Walker alias table.
class RejectionSampler {
 public:
  RejectionSampler(Distribution d, double bound, std::size_t cells = default_envelope_cells);

  /// One raw draw; `attempts` (if given) is incremented per proposal.
  double draw(RngStream& rng, std::uint64_t* attempts = nullptr) const;

  const Distribution& model() const { return model_; }
  double bound() const { return bound_; }
  /// Area under the majorant; the acceptance rate is Int_{-B}^{B} pdf / area.
  double envelope_area() const { return total_mass_; }

 private:

  Distribution model_;
  double bound_;
  std::size_t cells_;
  double width_;
  std::optional<double> singular_exponent_;
  std::vector<double> height_;  // constant height, or power-law amplitude A
  std::vector<double> alias_prob_;
  std::vector<std::uint32_t> alias_;
  double total_mass_ = 0.0;
};

/// Draws M deviates from `d` on [-B, B] and normalizes them by their sample
/// standard deviation.
SamplePool sample_rejection(const Distribution& d, std::size_t m, double bound, RngStream& rng);

/// Generalized Box-Muller: q-Gaussian deviates with beta = 1/(3 - q), on the
/// full real line, not normalized. 1 < q < 3.
SamplePool sample_box_muller_q(double q, std::size_t m, RngStream& rng);

/// Standard Student's t (sigma_hat = 1) through the nu <-> q mapping of the
/// generalized Box-Muller generator.
SamplePool sample_box_muller_student(double nu, std::size_t m, RngStream& rng);

/// Symmetric alpha-stable deviates with characteristic function exp(-|k|^alpha)
/// (Chambers-Mallows-Stuck); alpha = 1 uses the Cauchy branch.
SamplePool sample_stable_cms(double alpha, std::size_t m, RngStream& rng);

/// Divides by the sample standard deviation s (population convention,
/// 1/M); the sample mean is not subtracted from the values.
SamplePool normalize_pool(SamplePool pool);

/// Population standard deviation sqrt(sum (x - mean)^2 / M).
double sample_std(std::span<const double> values);

/// Keeps values with |x| <= bound (used to align unbounded generators with a
/// bounded support before comparing).
SamplePool truncate_pool(SamplePool pool, double bound);

void write_pool_csv(std::ostream& out, const SamplePool& pool);
SamplePool read_pool_csv(std::istream& in);

/// Source of standardized shocks for the path simulators: N(0,1) for the
/// Gaussian model, raw rejection draws on [-B, B] otherwise (normalized
/// afterwards by the caller).
class ShockSource {
 public:
  ShockSource(const Distribution& d, double bound = default_support_bound);

  double draw_raw(RngStream& rng) const;
  bool needs_normalization() const { return sampler_.has_value(); }
  const Distribution& model() const { return model_; }

 private:
  Distribution model_;
  std::optional<RejectionSampler> sampler_;
};

}  // namespace fattail
