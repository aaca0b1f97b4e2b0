#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace smallnoise {

/// Philox4x32-10 block function: maps (counter, key) to four 32-bit words.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                         std::array<std::uint32_t, 2> key);

/// SplitMix64 finalizer. Used to derive stream keys.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Tags separating independent families of streams under the same seed.
enum class StreamTag : std::uint64_t {
  generic = 0,
  sde_path = 1,
  limit_w = 2,
  feller_endpoint = 3,
  bootstrap = 4,
};

/// Key of the stream for (seed, tag, index). Streams are a pure function of
/// these three values, so ensembles do not depend on scheduling order.
constexpr std::uint64_t stream_key(std::uint64_t seed, StreamTag tag, std::uint64_t index) {
  return mix64(seed ^ mix64(static_cast<std::uint64_t>(tag) * 0xD6E8FEB86659FD93ULL ^ mix64(index)));
}

/// Counter-based generator: one independent stream per key. Satisfies
/// UniformRandomBitGenerator, and exposes the variates the simulators need
/// with fully specified (platform-independent) algorithms.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) noexcept
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}

  CounterRng(std::uint64_t seed, StreamTag tag, std::uint64_t index) noexcept
      : CounterRng(stream_key(seed, tag, index)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal by Box-Muller; the second variate of each pair is cached.
  double normal() noexcept;

  double exponential(double rate) noexcept;

  /// Poisson variate. Multiplication method below mean 10, Hormann's PTRS above.
  std::uint64_t poisson(double mean) noexcept;

  std::uint64_t blocks_used() const noexcept { return block_; }

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;  // 32-bit words consumed from buf_; refill when >= 4
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace smallnoise
