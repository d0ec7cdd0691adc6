#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <numbers>

#include "fattail/error.hpp"
#include "fattail/special.hpp"
#include "fattail/tld_density.hpp"

using namespace fattail;

namespace {

const TruncatedLevyParams standard_tld(1.5, 0.18, 0.4);

const TabulatedDensity& standard_density() {
  static const TabulatedDensity td = invert_to_density(standard_tld, default_tld_points, default_tld_k_max);
  return td;
}

}  // namespace

TEST(CharFn, NormalizedAtOrigin) {
  EXPECT_EQ(tld_char_fn(standard_tld, 0.0), 1.0);
  EXPECT_EQ(tld_char_fn(TruncatedLevyParams(0.7, 2.0, 3.0), 0.0), 1.0);
}

TEST(CharFn, GaussianLimit) {
  const TruncatedLevyParams p(2.0, 0.0, 0.7);
  for (double k : {0.1, 0.5, 1.0, 3.0}) EXPECT_NEAR(tld_char_fn(p, k), std::exp(-0.7 * k * k), 1e-15);
}

TEST(CharFn, MatchesMultiprecisionEvaluation) {
  using mp = boost::multiprecision::cpp_bin_float_50;
  const mp alpha = mp(3) / 2, lambda = mp("0.18"), gamma = mp("0.4"), k = 1;
  const mp pi = boost::multiprecision::default_ops::get_constant_pi<mp::backend_type>();
  const mp num = pow(k * k + lambda * lambda, alpha / 2) * cos(alpha * atan(k / lambda)) - pow(lambda, alpha);
  const mp ref = exp(-gamma * num / cos(pi * alpha / 2));
  EXPECT_NEAR(tld_char_fn(standard_tld, 1.0), static_cast<double>(ref), 1e-15);
  const double v = tld_char_fn(standard_tld, 1.0);
  EXPECT_GT(v, 0.0);
  EXPECT_LT(v, 1.0);
}

TEST(CharFn, EvenAndBounded) {
  for (double k = 0.0; k < 50.0; k += 0.37) {
    EXPECT_EQ(tld_char_fn(standard_tld, k), tld_char_fn(standard_tld, -k));
    EXPECT_LE(tld_char_fn(standard_tld, k), 1.0);
  }
  const auto grid = sample_char_fn(standard_tld, 1024, 64.0);
  EXPECT_EQ(grid.n_points, 1024u);
}

TEST(Inversion, GaussianLimit) {
  const auto td = invert_to_density(TruncatedLevyParams(2.0, 0.0, 0.5), default_tld_points, default_tld_k_max);
  double worst = 0.0;
  for (double x = -10.0; x <= 10.0; x += 0.0137) worst = std::max(worst, std::abs(td(x) - special::normal_pdf(x)));
  EXPECT_LT(worst, 1e-6);
}

TEST(Inversion, NearCauchyLimit) {
  const auto td = invert_to_density(TruncatedLevyParams(1.0 + 1e-6, 1e-8, 1.0), default_tld_points, default_tld_k_max);
  EXPECT_NEAR(td(0.0), 1.0 / std::numbers::pi, 1e-3);
}

TEST(Inversion, UnitVarianceAndNormalization) {
  const auto& td = standard_density();
  EXPECT_NEAR(td.trapezoid_moment(0, td.x_min(), td.x_max()), 1.0, 1e-4);
  EXPECT_NEAR(td.trapezoid_moment(2, td.x_min(), td.x_max()), 3.0 / (2.0 * std::sqrt(2.0)) * 0.4 / std::sqrt(0.18), 1e-3);
  EXPECT_NEAR(td.trapezoid_moment(2, td.x_min(), td.x_max()), 1.0, 1e-3);
}

TEST(Inversion, EvenSymmetryAndNonNegative) {
  const auto& td = standard_density();
  const auto p = td.p_values();
  for (std::size_t i = 0; i < p.size(); ++i) {
    ASSERT_GE(p[i], 0.0);
    ASSERT_NEAR(p[i], p[p.size() - 1 - i], 1e-8);
  }
  for (double x = 0.001; x < 40.0; x *= 1.3) EXPECT_NEAR(td(x), td(-x), 1e-8);
}

TEST(Inversion, GridDoublingConverged) {
  const auto& td = standard_density();
  const auto fine = invert_to_density(standard_tld, 2 * default_tld_points, default_tld_k_max);
  double worst = 0.0;
  for (double x = -30.0; x <= 30.0; x += 0.01) worst = std::max(worst, std::abs(td(x) - fine(x)));
  EXPECT_LT(worst, 1e-6);
}

TEST(Inversion, PeakMatchesDirectQuadrature) {
  boost::math::quadrature::exp_sinh<double> es;
  const double direct = es.integrate([](double k) { return tld_char_fn(standard_tld, k); }, 0.0,
                                     std::numeric_limits<double>::infinity()) /
                        std::numbers::pi;
  EXPECT_NEAR(standard_density()(0.0), direct, 1e-8);
}

TEST(Inversion, TailShape) {
  // log p = a log x + b x + c on [5, 25]
  const auto& td = standard_density();
  std::vector<std::array<double, 3>> rows;
  std::vector<double> y;
  for (double x = 5.0; x <= 25.0; x += 0.25) {
    rows.push_back({std::log(x), x, 1.0});
    y.push_back(std::log(td(x)));
  }
  double ata[3][3] = {}, aty[3] = {};
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (int i = 0; i < 3; ++i) {
      aty[i] += rows[r][i] * y[r];
      for (int j = 0; j < 3; ++j) ata[i][j] += rows[r][i] * rows[r][j];
    }
  // Gaussian elimination on the 3x3 normal equations.
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const double f = ata[j][i] / ata[i][i];
      for (int k = i; k < 3; ++k) ata[j][k] -= f * ata[i][k];
      aty[j] -= f * aty[i];
    }
  double coef[3];
  for (int i = 2; i >= 0; --i) {
    coef[i] = aty[i];
    for (int k = i + 1; k < 3; ++k) coef[i] -= ata[i][k] * coef[k];
    coef[i] /= ata[i][i];
  }
  EXPECT_NEAR(coef[0], -2.5, 0.15 * 2.5);
  EXPECT_NEAR(coef[1], -0.18, 0.15 * 0.18);
}

TEST(Spline, InterpolatesNodes) {
  const auto& td = standard_density();
  const auto x = td.x_grid();
  const auto p = td.p_values();
  for (std::size_t i = x.size() / 2 - 5; i < x.size() / 2 + 5; ++i) EXPECT_NEAR(spline_eval(td, x[i]), p[i], 1e-13 * p[i]);
  EXPECT_EQ(td(td.x_max() + 1.0), 0.0);
}

TEST(Inversion, Errors) {
  EXPECT_THROW(invert_to_density(standard_tld, 1000, 256.0), ParameterDomainError);
  EXPECT_THROW(invert_to_density(standard_tld, 1 << 12, 256.0), ParameterDomainError);
  EXPECT_THROW(invert_to_density(standard_tld, 1 << 14, 2.0), ResolutionError);
  EXPECT_THROW(TruncatedLevyParams(1.0, 0.1, 1.0), ParameterDomainError);
}
