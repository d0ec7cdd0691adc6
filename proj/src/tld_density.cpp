#include "fattail/tld_density.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>

#include <fftw3.h>

#include "fattail/csv.hpp"
#include "fattail/error.hpp"

namespace fattail {
namespace {

constexpr double clamp_tolerance = 1e-12;
constexpr double imag_tolerance = 1e-10;
constexpr double k_max_tolerance = 1e-6;

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwPlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};
struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};

}  // namespace

TruncatedLevyParams::TruncatedLevyParams(double alpha, double lambda, double gamma)
    : alpha_(alpha), lambda_(lambda), gamma_(gamma) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw ParameterDomainError("TLD: alpha must lie in (0, 2]");
  if (alpha == 1.0) throw ParameterDomainError("TLD: alpha = 1 is excluded");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ParameterDomainError("TLD: lambda must be >= 0");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ParameterDomainError("TLD: gamma must be positive");
}

double tld_char_fn(const TruncatedLevyParams& p, double k) {
  const double a = p.alpha();
  const double lam = p.lambda();
  const double ak = std::abs(k);
  const double num = std::pow(ak * ak + lam * lam, 0.5 * a) * std::cos(a * std::atan2(ak, lam)) - std::pow(lam, a);
  return std::exp(-p.gamma() * num / std::cos(0.5 * std::numbers::pi * a));
}

CharFnGrid sample_char_fn(const TruncatedLevyParams& params, std::size_t n_points, double k_max) {
  CharFnGrid grid;
  grid.k_max = k_max;
  grid.n_points = n_points;
  grid.k_values.resize(n_points);
  grid.phi_values.resize(n_points);
  const double dk = 2.0 * k_max / static_cast<double>(n_points);
  const auto half = static_cast<std::ptrdiff_t>(n_points / 2);
  for (std::size_t j = 0; j < n_points; ++j) {
    const double k = static_cast<double>(static_cast<std::ptrdiff_t>(j) - half) * dk;
    grid.k_values[j] = k;
    grid.phi_values[j] = tld_char_fn(params, k);
  }
  return grid;
}

TabulatedDensity::TabulatedDensity(std::vector<double> x_grid, std::vector<double> p_values)
    : x_grid_(std::move(x_grid)), p_(std::move(p_values)) {
  const std::size_t n = x_grid_.size();
  if (n < 4 || p_.size() != n) throw ParameterDomainError("TabulatedDensity: need >= 4 matching nodes");
  h_ = (x_grid_.back() - x_grid_.front()) / static_cast<double>(n - 1);
  if (!(h_ > 0.0)) throw ParameterDomainError("TabulatedDensity: grid must be increasing");
  inv_h_ = 1.0 / h_;

  // Natural cubic spline: M_0 = M_{n-1} = 0, uniform spacing, Thomas solve.
  m_.assign(n, 0.0);
  std::vector<double> c(n, 0.0);
  std::vector<double> d(n, 0.0);
  const double scale = 6.0 / (h_ * h_);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double rhs = scale * (p_[i + 1] - 2.0 * p_[i] + p_[i - 1]);
    const double denom = 4.0 - (i > 1 ? c[i - 1] : 0.0);
    c[i] = 1.0 / denom;
    d[i] = (rhs - (i > 1 ? d[i - 1] : 0.0)) / denom;
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    m_[i] = d[i] - c[i] * m_[i + 1];
    if (i == 1) break;
  }
}

double TabulatedDensity::operator()(double x) const {
  if (!(x >= x_grid_.front() && x <= x_grid_.back())) return 0.0;
  const double u = (x - x_grid_.front()) * inv_h_;
  auto i = static_cast<std::size_t>(u);
  if (i >= x_grid_.size() - 1) i = x_grid_.size() - 2;
  const double b = u - static_cast<double>(i);
  const double a = 1.0 - b;
  const double y = a * p_[i] + b * p_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * (h_ * h_ / 6.0);
  return y > 0.0 ? y : 0.0;
}

double TabulatedDensity::trapezoid_moment(int order, double lo, double hi) const {
  double sum = 0.0;
  std::size_t first = x_grid_.size();
  std::size_t last = 0;
  for (std::size_t i = 0; i < x_grid_.size(); ++i) {
    const double x = x_grid_[i];
    if (x < lo || x > hi) continue;
    first = std::min(first, i);
    last = i;
    sum += std::pow(x, order) * p_[i];
  }
  if (first > last) return 0.0;
  sum -= 0.5 * (std::pow(x_grid_[first], order) * p_[first] + std::pow(x_grid_[last], order) * p_[last]);
  return sum * h_;
}

TabulatedDensity invert_to_density(const TruncatedLevyParams& params, std::size_t n_points, double k_max) {
  if (n_points < (std::size_t{1} << 14) || !std::has_single_bit(n_points))
    throw ParameterDomainError("invert_to_density: n_points must be a power of two >= 2^14");
  if (!(k_max > 0.0)) throw ParameterDomainError("invert_to_density: k_max must be positive");

  const double phi_edge = tld_char_fn(params, k_max);
  if (phi_edge > k_max_tolerance) {
    std::ostringstream msg;
    msg << "invert_to_density: phi(k_max = " << k_max << ") = " << phi_edge
        << " exceeds 1e-6; increase k_max";
    throw ResolutionError(msg.str());
  }

  const std::size_t n = n_points;
  const double dk = 2.0 * k_max / static_cast<double>(n);
  const double dx = std::numbers::pi / k_max;
  const auto half = static_cast<std::ptrdiff_t>(n / 2);

  std::unique_ptr<fftw_complex, FftwFree> buf(fftw_alloc_complex(n));
  std::unique_ptr<fftw_plan_s, FftwPlanDeleter> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.reset(fftw_plan_dft_1d(static_cast<int>(n), buf.get(), buf.get(), FFTW_FORWARD, FFTW_ESTIMATE));
  }

  for (std::size_t j = 0; j < n; ++j) {
    const double k = static_cast<double>(static_cast<std::ptrdiff_t>(j) - half) * dk;
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    buf.get()[j][0] = sign * tld_char_fn(params, k);
    buf.get()[j][1] = 0.0;
  }
  fftw_execute(plan.get());

  // p(x_m) = (dk / 2pi) (-1)^m X_m for x_m = (m - n/2) dx.
  std::vector<double> raw(n);
  const double scale = dk / (2.0 * std::numbers::pi);
  double worst_imag = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    raw[m] = sign * scale * buf.get()[m][0];
    worst_imag = std::max(worst_imag, std::abs(scale * buf.get()[m][1]));
  }
  if (worst_imag > imag_tolerance) {
    std::ostringstream msg;
    msg << "invert_to_density: imaginary residue " << worst_imag << " exceeds 1e-10";
    throw ResolutionError(msg.str());
  }

  // Drop m = 0 so the grid is symmetric about x = 0, then enforce evenness.
  std::vector<double> x(n - 1);
  std::vector<double> p(n - 1);
  for (std::size_t m = 1; m < n; ++m) {
    const double v = 0.5 * (raw[m] + raw[n - m]);
    if (v < -clamp_tolerance) {
      std::ostringstream msg;
      msg << "invert_to_density: negative density " << v << " at x = "
          << static_cast<double>(static_cast<std::ptrdiff_t>(m) - half) * dx;
      throw ResolutionError(msg.str());
    }
    x[m - 1] = static_cast<double>(static_cast<std::ptrdiff_t>(m) - half) * dx;
    p[m - 1] = v < 0.0 ? 0.0 : v;
  }
  return TabulatedDensity(std::move(x), std::move(p));
}

void write_density_csv(std::ostream& out, const TabulatedDensity& td, double x_limit) {
  write_csv_header(out, {"x", "p"});
  const auto xs = td.x_grid();
  const auto ps = td.p_values();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::abs(xs[i]) > x_limit) continue;
    out << CsvRow().add(xs[i]).add(ps[i]);
  }
}

}  // namespace fattail
