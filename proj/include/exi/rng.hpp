#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace exi {

/// Philox4x64-10 counter-based generator (Salmon et al., Random123).
///
/// The stream for a seed is the concatenation of blocks
/// philox(counter = {i, 0, 0, 0}, key = {seed, stream}) for i = 0, 1, 2, ...
/// Every output is a pure function of (seed, stream, position), so streams
/// are reproducible across platforms and thread schedules.
class Philox4x64 {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  explicit Philox4x64(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_{seed, stream} {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    if (pos_ == 4) {
      buffer_ = block({counter_++, 0, 0, 0}, key_);
      pos_ = 0;
    }
    return buffer_[pos_++];
  }

  /// The raw bijection: ten rounds of Philox on a 256-bit counter.
  static Block block(Block ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const auto [hi0, lo0] = mulhilo(kMul0, ctr[0]);
      const auto [hi1, lo1] = mulhilo(kMul1, ctr[2]);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
  static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
  static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

  struct HiLo {
    std::uint64_t hi;
    std::uint64_t lo;
  };
  static HiLo mulhilo(std::uint64_t a, std::uint64_t b) noexcept {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    return {static_cast<std::uint64_t>(p >> 64), static_cast<std::uint64_t>(p)};
  }

  Key key_;
  std::uint64_t counter_ = 0;
  Block buffer_{};
  int pos_ = 4;
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Per-replication seed: mix64(master ^ mix64(index)).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(master ^ mix64(index));
}

/// Uniform on the open interval (0,1) from the top 53 bits.
template <class Engine>
double uniform_open(Engine& eng) {
  return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}

/// Integer uniform on {0, ..., m-1}.
template <class Engine>
std::uint64_t uniform_index(Engine& eng, std::uint64_t m) {
  const auto p = static_cast<unsigned __int128>(eng()) * m;
  return static_cast<std::uint64_t>(p >> 64);
}

/// Standard normal by Box-Muller; the second variate is cached.
class GaussianSampler {
 public:
  template <class Engine>
  double operator()(Engine& eng) {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_open(eng)));
    const double a = 2.0 * std::numbers::pi * uniform_open(eng);
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace exi
