#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace fattail {

/// Parameters of the symmetric truncated Levy distribution with the smooth
/// exponential cut-off characteristic function
///
///   phi(k) = exp{-gamma [(k^2 + lambda^2)^(alpha/2) cos(alpha atan(|k|/lambda))
///                        - lambda^alpha] / cos(pi alpha / 2)}.
///
/// alpha in (0,1) U (1,2], lambda >= 0, gamma > 0. Validated on construction.
class TruncatedLevyParams {
 public:
  TruncatedLevyParams(double alpha, double lambda, double gamma);

  double alpha() const { return alpha_; }
  double lambda() const { return lambda_; }
  double gamma() const { return gamma_; }

 private:
  double alpha_;
  double lambda_;
  double gamma_;
};

double tld_char_fn(const TruncatedLevyParams& params, double k);

/// Samples of the (real, even) characteristic function on a uniform
/// wavenumber grid k_j = (j - n/2) dk, dk = 2 k_max / n.
struct CharFnGrid {
  std::vector<double> k_values;
  std::vector<double> phi_values;
  double k_max = 0.0;
  std::size_t n_points = 0;
};

CharFnGrid sample_char_fn(const TruncatedLevyParams& params, std::size_t n_points, double k_max);

/// Density tabulated on a uniform, symmetric x-grid with a natural cubic
/// spline through the nodes. Immutable once built.
class TabulatedDensity {
 public:
  TabulatedDensity(std::vector<double> x_grid, std::vector<double> p_values);

  /// Spline value clamped to >= 0; zero outside the support.
  double operator()(double x) const;

  double x_min() const { return x_grid_.front(); }
  double x_max() const { return x_grid_.back(); }
  double spacing() const { return h_; }

  std::span<const double> x_grid() const { return x_grid_; }
  std::span<const double> p_values() const { return p_; }
  std::span<const double> second_derivatives() const { return m_; }

  /// Trapezoidal integral of x^order p(x) over [lo, hi] using the nodes.
  double trapezoid_moment(int order, double lo, double hi) const;

 private:
  std::vector<double> x_grid_;
  std::vector<double> p_;
  std::vector<double> m_;
  double h_ = 0.0;
  double inv_h_ = 0.0;
};

inline constexpr std::size_t default_tld_points = std::size_t{1} << 18;
inline constexpr double default_tld_k_max = 256.0;

/// Builds p(x) = (1/2pi) Int e^{-ikx} phi(k) dk by FFT on the default or a
/// custom grid. The x-grid spacing is pi / k_max.
///
/// Throws ResolutionError when phi(k_max) > 1e-6, when the imaginary part of
/// the transform exceeds 1e-10, or when a node comes out negative beyond
/// -1e-12 (smaller negatives are clamped to zero).
TabulatedDensity invert_to_density(const TruncatedLevyParams& params,
                                   std::size_t n_points = default_tld_points,
                                   double k_max = default_tld_k_max);

inline double spline_eval(const TabulatedDensity& td, double x) { return td(x); }

/// CSV dump "x,p" of the nodes with |x| <= x_limit.
void write_density_csv(std::ostream& out, const TabulatedDensity& td, double x_limit);

}  // namespace fattail
