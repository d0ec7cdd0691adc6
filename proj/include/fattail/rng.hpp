#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace fattail {

/// Philox4x64-10 block function (Salmon et al. counter-based generator).
std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> counter,
                                        std::array<std::uint64_t, 2> key);

/// Independent random substreams addressed by (seed, stream_id, domain).
///
/// The generator key is {seed, domain} and the counter is
/// {block, stream_id, 0, 0}, so two streams with different ids walk disjoint
/// counter sets of the same bijection and can never overlap. Each stream has
/// 2^64 blocks of four 64-bit words.
///
/// A stream is single-owner mutable state; give every worker its own id.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t domain = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64() {
    if (index_ == 4) refill();
    return buffer_[index_++];
  }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Standard normal deviate (Marsaglia polar method).
  double normal();

  /// Unit-rate exponential deviate.
  double exponential();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t domain() const { return domain_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t domain_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 4> buffer_{};
  int index_ = 4;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// Stream domains used across the library so that substreams for different
/// purposes never coincide.
namespace rng_domain {
inline constexpr std::uint64_t sampling = 0;
inline constexpr std::uint64_t shocks = 1;
inline constexpr std::uint64_t shock_resample = 2;
inline constexpr std::uint64_t bootstrap = 3;
}  // namespace rng_domain

}  // namespace fattail
