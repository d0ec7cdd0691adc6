#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "fattail/rng.hpp"

using namespace fattail;

// Known-answer vectors of the Philox4x64-10 reference implementation.
TEST(Philox, KnownAnswerZero) {
  const auto out = philox4x64({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out[0], 0x16554d9eca36314cULL);
  EXPECT_EQ(out[1], 0xdb20fe9d672d0fdcULL);
  EXPECT_EQ(out[2], 0xd7e772cee186176bULL);
  EXPECT_EQ(out[3], 0x7e68b68aec7ba23bULL);
}

TEST(Philox, KnownAnswerAllOnes) {
  const std::uint64_t f = ~0ULL;
  const auto out = philox4x64({f, f, f, f}, {f, f});
  EXPECT_EQ(out[0], 0x87b092c3013fe90bULL);
  EXPECT_EQ(out[1], 0x438c3c67be8d0224ULL);
  EXPECT_EQ(out[2], 0x9cc7d7c69cd777b6ULL);
  EXPECT_EQ(out[3], 0xa09caebf594f0ba0ULL);
}

TEST(Philox, KnownAnswerPi) {
  const auto out = philox4x64({0x243f6a8885a308d3ULL, 0x13198a2e03707344ULL, 0xa4093822299f31d0ULL, 0x082efa98ec4e6c89ULL},
                              {0x452821e638d01377ULL, 0xbe5466cf34e90c6cULL});
  EXPECT_EQ(out[0], 0xa528f45403e61d95ULL);
  EXPECT_EQ(out[1], 0x38c72dbd566e9788ULL);
  EXPECT_EQ(out[2], 0xa5a1610e72fd18b5ULL);
  EXPECT_EQ(out[3], 0x57bd43b5e52b7fe6ULL);
}

TEST(RngStream, DeterministicPerSeedAndStream) {
  RngStream a(7, 3), b(7, 3), c(7, 4), d(8, 3), e(7, 3, 1);
  bool differs_c = false, differs_d = false, differs_e = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    differs_c |= x != c.next_u64();
    differs_d |= x != d.next_u64();
    differs_e |= x != e.next_u64();
  }
  EXPECT_TRUE(differs_c);
  EXPECT_TRUE(differs_d);
  EXPECT_TRUE(differs_e);
}

TEST(RngStream, UniformOpenInterval) {
  RngStream r(1, 0);
  double sum = 0.0;
  const int n = 1'000'000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(RngStream, BelowCoversRange) {
  RngStream r(2, 0);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto k = r.below(7);
    ASSERT_LT(k, 7u);
    seen.insert(k);
  }
  EXPECT_EQ(seen.size(), 7u);
}

TEST(RngStream, NormalAndExponentialMoments) {
  RngStream r(3, 0);
  const int n = 1'000'000;
  double s1 = 0, s2 = 0, e1 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s1 += z;
    s2 += z * z;
    e1 += r.exponential();
  }
  EXPECT_NEAR(s1 / n, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 5.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(e1 / n, 1.0, 5.0 / std::sqrt(n));
}
