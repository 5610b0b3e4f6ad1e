#pragma once

#include <concepts>
#include <cstdint>
#include <limits>
#include <string_view>

namespace trueset {

// What the augmentation code needs from a random source. Both bounds are
// inclusive for uniform_int; uniform_real draws from [lo, hi).
template <typename R>
concept RandomSource = requires(R& r, int a, double x) {
  { r.uniform_int(a, a) } -> std::convertible_to<int>;
  { r.uniform_real(x, x) } -> std::convertible_to<double>;
};

inline constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Per-image seed: a 64-bit mix of the global seed and FNV-1a of the id, so a
// stream depends only on (seed, id) and never on processing order.
inline constexpr std::uint64_t image_seed(std::uint64_t global_seed,
                                          std::string_view id) noexcept {
  std::uint64_t state = global_seed ^ (fnv1a64(id) * 0x9e3779b97f4a7c15ULL);
  splitmix64(state);
  return splitmix64(state);
}

// xoshiro256** seeded through splitmix64. Bounded draws use rejection
// sampling so results are identical on every platform and standard library.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) noexcept {
    for (auto& s : s_) s = splitmix64(seed);
  }

  std::uint64_t next() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  int uniform_int(int lo, int hi) noexcept {
    if (hi <= lo) return lo;
    const std::uint64_t range =
        static_cast<std::uint64_t>(static_cast<std::int64_t>(hi) - lo) + 1;
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return static_cast<int>(lo + static_cast<std::int64_t>(x % range));
  }

  double uniform_real(double lo, double hi) noexcept {
    const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
};

static_assert(RandomSource<SeededRng>);

}  // namespace trueset
