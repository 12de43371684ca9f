#ifndef QTRACK_RNG_HPP
#define QTRACK_RNG_HPP

#include <cstdint>
#include <random>

namespace qtrack {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Per-task seeds are derived from the master seed and stable task indices,
// so results do not depend on execution order or thread count.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t substream = 0) {
  std::uint64_t h = splitmix64(master ^ 0x6a09e667f3bcc909ULL);
  h = splitmix64(h ^ splitmix64(stream));
  h = splitmix64(h ^ splitmix64(substream ^ 0x3c6ef372fe94f82bULL));
  return h;
}

// Seeded random source. mt19937_64 is fully specified by the standard, so
// streams are reproducible across platforms and runs.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  // Uniform on [0, 1).
  double uniform01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1]; safe as argument to log().
  double open01() {
    return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
  }

  // Unbiased uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace qtrack

#endif  // QTRACK_RNG_HPP
