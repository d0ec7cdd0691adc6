#include "fattail/special.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/normal.hpp>

#include "fattail/error.hpp"

namespace fattail::special {
namespace {

constexpr double lanczos_g = 7.0;
constexpr std::array<double, 9> lanczos_coef = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_series(double z) {
  double a = lanczos_coef[0];
  for (std::size_t i = 1; i < lanczos_coef.size(); ++i) a += lanczos_coef[i] / (z + static_cast<double>(i));
  return a;
}

}  // namespace

double gamma(double x) {
  using std::numbers::pi;
  if (x < 0.5) return pi / (std::sin(pi * x) * gamma(1.0 - x));
  const double z = x - 1.0;
  const double t = z + lanczos_g + 0.5;
  // t^(z+0.5) split in two to delay overflow near the top of the range.
  const double half = std::pow(t, 0.5 * (z + 0.5));
  return std::sqrt(2.0 * pi) * half * (half * std::exp(-t)) * lanczos_series(z);
}

double log_gamma(double x) {
  using std::numbers::pi;
  if (!(x > 0.0)) throw ParameterDomainError("log_gamma requires x > 0");
  if (x < 0.5) return std::log(pi / std::sin(pi * x)) - log_gamma(1.0 - x);
  const double z = x - 1.0;
  const double t = z + lanczos_g + 0.5;
  return 0.5 * std::log(2.0 * pi) + (z + 0.5) * std::log(t) - t + std::log(lanczos_series(z));
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ParameterDomainError("normal_quantile requires 0 < p < 1");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

}  // namespace fattail::special
