#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace dcim {

// splitmix64 finalizer, used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Combines a master seed with any number of tags (run index, round, purpose).
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> tags) noexcept {
  std::uint64_t h = mix64(master);
  for (std::uint64_t tag : tags) h = mix64(h ^ mix64(tag + 0x632be59bd9b4e019ULL));
  return h;
}

// Purpose tags keep streams for different consumers disjoint.
enum class StreamTag : std::uint64_t {
  graph = 1,
  model = 2,
  diffusion = 3,
  policy = 4,
  oracle = 5,
  opt = 6,
  extraction = 7,
};

/// Seeded random stream. Draws are defined bit-exactly (no reliance on the
/// standard distributions, whose algorithms differ between library vendors),
/// so a trace can be replayed from its seed on any platform.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  Stream split(std::initializer_list<std::uint64_t> tags) {
    return Stream(derive_seed(engine_(), tags));
  }

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // p = 1 always succeeds and p = 0 never does.
  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, bound), bound > 0. Rejection sampling removes modulo bias.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % bound;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dcim
