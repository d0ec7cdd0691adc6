#include <gtest/gtest.h>

#include <cmath>

#include "fattail/error.hpp"
#include "fattail/sampler.hpp"
#include "fattail/special.hpp"
#include "fattail/stats.hpp"

using namespace fattail;

namespace {

std::vector<double> normals(std::size_t n, std::uint64_t seed) {
  RngStream rng(seed, 0);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

}  // namespace

TEST(Moments, Toy) {
  const std::vector<double> v{-1.0, 0.0, 1.0};
  EXPECT_DOUBLE_EQ(raw_moment(v, 2), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(raw_moment(v, 1), 0.0);
  EXPECT_THROW(raw_moment(std::vector<double>{}, 2), DegenerateInputError);
  EXPECT_THROW(raw_moment(v, 5), ParameterDomainError);
  EXPECT_THROW(excess_kurtosis_sample(std::vector<double>{1.0}), DegenerateInputError);
}

TEST(Moments, GaussianKurtosis) {
  EXPECT_NEAR(excess_kurtosis_sample(normals(10'000'000, 1)), 0.0, 0.01);
}

TEST(Ccdf, Toy) {
  const std::vector<double> v{1.0, 2.0, 3.0};
  const std::vector<double> t{0.0, 2.0, 3.5};
  const auto c = empirical_ccdf(v, t);
  EXPECT_DOUBLE_EQ(c.probabilities[0], 1.0);
  EXPECT_DOUBLE_EQ(c.probabilities[1], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(c.probabilities[2], 0.0);
}

TEST(Ccdf, SymmetricAtZeroAndMonotone) {
  const auto v = normals(1'000'000, 2);
  const auto t = log_spaced(1e-3, 6.0, 50);
  const auto c = empirical_ccdf(v, t);
  for (std::size_t i = 1; i < c.probabilities.size(); ++i) EXPECT_LE(c.probabilities[i], c.probabilities[i - 1]);
  const std::vector<double> zero{0.0};
  EXPECT_NEAR(empirical_ccdf(v, zero).probabilities[0], 0.5, 3.0 / std::sqrt(1e6));
}

TEST(TailSlope, StudentInverseCubic) {
  RngStream rng(3, 0);
  const auto pool = sample_box_muller_student(3.0, 4'000'000, rng);
  const auto c = empirical_ccdf(pool.values, log_spaced(5.0, 20.0, 30));
  EXPECT_NEAR(tail_slope(c, 5.0, 20.0), -3.0, 0.2);
}

TEST(TailSlope, QGaussianStandardized) {
  RngStream rng(4, 0);
  const auto pool = sample_rejection(standardize(Family::q_gaussian, 1.5), 4'000'000, 30.0, rng);
  const auto c = empirical_ccdf(pool.values, log_spaced(5.0, 20.0, 30));
  EXPECT_NEAR(tail_slope(c, 5.0, 20.0), -3.0, 0.2);
}

TEST(TailSlope, GaussianSuperPowerLaw) {
  const auto v = normals(10'000'000, 5);
  const auto c = empirical_ccdf(v, log_spaced(3.0, 6.0, 40));
  EXPECT_LT(tail_slope(c, 3.0, 6.0), -6.0);
}

TEST(TailSlope, InsufficientData) {
  const auto v = normals(1000, 6);
  const auto c = empirical_ccdf(v, log_spaced(5.0, 20.0, 30));
  EXPECT_THROW(tail_slope(c, 5.0, 20.0), InsufficientDataError);
}

TEST(Histogram, Normalization) {
  const auto v = normals(100'000, 7);
  const auto h = make_histogram(v, -3.0, 3.0, 200);
  const auto d = h.density();
  double total = 0.0;
  for (double x : d) total += x * h.bin_width();
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_EQ(h.total, 100'000u);
  EXPECT_LT(h.in_range, h.total);
}

TEST(Ks, IdenticalSamples) {
  const auto v = normals(1000, 8);
  const auto r = ks_two_sample(v, v);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
}

TEST(Ks, UniformNullCalibration) {
  int passes = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RngStream rng(seed, 0);
    std::vector<double> u(100'000);
    for (auto& x : u) x = rng.uniform();
    passes += ks_one_sample(u, [](double x) { return x; }).p_value > 0.01;
  }
  EXPECT_GE(passes, 95);
}

TEST(Ks, KolmogorovDistribution) {
  EXPECT_NEAR(kolmogorov_sf(1.358), 0.05, 5e-4);
  EXPECT_NEAR(kolmogorov_sf(1.628), 0.01, 2e-4);
  EXPECT_NEAR(kolmogorov_sf(1.1799999), kolmogorov_sf(1.18), 1e-7);
  EXPECT_EQ(kolmogorov_sf(0.0), 1.0);
}

TEST(Ks, TwoSampleWithTies) {
  const std::vector<double> a{1, 1, 2, 2, 3, 3, 4, 4};
  const std::vector<double> b{1, 2, 3, 4};
  EXPECT_EQ(ks_two_sample(a, b).statistic, 0.0);
  const std::vector<double> c{5, 6, 7};
  EXPECT_EQ(ks_two_sample(a, c).statistic, 1.0);
}

TEST(Bca, NormalMeanWidth) {
  const auto v = normals(10'000, 9);
  const auto ci = bca_mean_interval(v, 0.997, 2000, 1);
  const double half = 0.5 * (ci.upper - ci.lower);
  const double sd = sample_std(v);
  EXPECT_NEAR(half, special::normal_quantile(0.9985) * sd / 100.0, 0.2 * 0.03);
  EXPECT_TRUE(ci.contains(ci.point_estimate));
  EXPECT_EQ(ci.method, "BCa");
  EXPECT_EQ(ci.jackknife, "leave-one-out");
}

TEST(Bca, GenericMatchesMomentPath) {
  const auto v = normals(2000, 10);
  const auto fast = bca_mean_interval(v, 0.95, 500, 3);
  const auto slow = bca_interval(
      v, [](std::span<const double> s) { return raw_moment(s, 1); }, 0.95, 500, 3);
  EXPECT_NEAR(fast.lower, slow.lower, 1e-10);
  EXPECT_NEAR(fast.upper, slow.upper, 1e-10);
  EXPECT_NEAR(fast.acceleration, slow.acceleration, 1e-8);
}

TEST(Bca, Degenerate) {
  const std::vector<double> v(10, 5.0);
  const auto ci = bca_mean_interval(v, 0.997, 200, 1);
  EXPECT_TRUE(ci.degenerate);
  EXPECT_EQ(ci.lower, 5.0);
  EXPECT_EQ(ci.upper, 5.0);
  EXPECT_THROW(bca_mean_interval(std::vector<double>(9, 1.0), 0.997, 200, 1), InsufficientDataError);
}

TEST(Bca, BlockJackknifeLabel) {
  const auto v = normals(20'000, 11);
  const auto ci = bca_mean_interval(v, 0.997, 100, 1);
  EXPECT_EQ(ci.jackknife, "leave-block-out:10000");
}

TEST(Bca, CoverageCalibration) {
  int covered = 0;
  const int reps = 500;
  for (int r = 0; r < reps; ++r) {
    const auto v = normals(100, 1000 + r);
    covered += bca_mean_interval(v, 0.997, 2000, r).contains(0.0);
  }
  const double coverage = static_cast<double>(covered) / reps;
  EXPECT_GE(coverage, 0.985);
  EXPECT_LE(coverage, 1.0);
}
