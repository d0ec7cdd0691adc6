#include "fattail/rng.hpp"

#include <cmath>

namespace fattail {
namespace {

constexpr std::uint64_t philox_m0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t philox_m1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t philox_w0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t philox_w1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

}  // namespace

std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> c, std::array<std::uint64_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(philox_m0, c[0], hi0, lo0);
    mulhilo(philox_m1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += philox_w0;
    k[1] += philox_w1;
  }
  return c;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t domain)
    : seed_(seed), stream_id_(stream_id), domain_(domain) {}

void RngStream::refill() {
  buffer_ = philox4x64({block_, stream_id_, 0, 0}, {seed_, domain_});
  ++block_;
  index_ = 0;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * f;
  has_spare_ = true;
  return u * f;
}

double RngStream::exponential() { return -std::log(uniform()); }

}  // namespace fattail
