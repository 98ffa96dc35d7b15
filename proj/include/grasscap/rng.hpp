#pragma once

#include <cmath>
#include <cstdint>

namespace grasscap {

namespace detail {

// SplitMix64 finalizer. Full-avalanche 64-bit mix.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

}  // namespace detail

// Counter-based random stream. Every draw is a pure function of
// (master_seed, stream_id, counter): a stream can be re-created from its two
// identifiers, and work items can run on any thread without changing the
// sampled values. Streams are small value types.
class RngStream {
 public:
  explicit RngStream(std::uint64_t master_seed, std::uint64_t stream_id = 0)
      : master_seed_(master_seed),
        stream_id_(stream_id),
        key_(detail::mix64(detail::mix64(master_seed + detail::kGolden) ^
                           detail::mix64(stream_id + 2 * detail::kGolden))) {}

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Child stream labeled by `id`. Chained derivations hash the labels
  // together, so (grid, ensemble, trial) chains yield distinct streams.
  RngStream derive(std::uint64_t id) const {
    return RngStream(master_seed_,
                     detail::mix64(stream_id_ + detail::kGolden) ^
                         detail::mix64(id + 3 * detail::kGolden));
  }

  std::uint64_t next_u64() {
    counter_ += detail::kGolden;
    return detail::mix64(key_ + counter_);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Multiply-shift map; bias is O(n / 2^64).
  std::uint64_t uniform_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Standard normal via Box-Muller (cosine branch), two words per draw.
  double normal() {
    const double u1 =
        static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
  }

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace grasscap
