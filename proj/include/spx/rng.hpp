#ifndef SPX_RNG_HPP
#define SPX_RNG_HPP

#include <cmath>
#include <cstdint>

namespace spx {

// All randomness in the library flows through one fixed, named generator so
// that seeds are portable across implementations and platforms:
//
//   * stream generator: xoshiro256++ 1.0 (Blackman & Vigna, 2019)
//   * seed expansion:   SplitMix64 (Steele, Lea & Flood, 2014)
//
// Derived quantities are pinned to exact bit-level recipes:
//   * uniform double in [0,1):   (next() >> 11) * 2^-53
//   * uniform double in (0,1]:   ((next() >> 11) + 1) * 2^-53
//   * standard normal:           Box-Muller on two (0,1] / [0,1) uniforms,
//                                pairs consumed in order, second value cached
//   * Bernoulli(1/2) bit:        bits of next(), least significant first
//
// Values are consumed strictly sequentially, so a truncated draw of length
// M is bitwise the prefix of a longer draw with the same seed.

inline constexpr std::uint64_t kGolden64 = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer. Maps a 64-bit value to a well-mixed 64-bit value.
inline std::uint64_t mix64(std::uint64_t z) {
  z += kGolden64;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Seed for an independent sub-stream identified by a small integer tag.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return mix64(seed + kGolden64 * tag);
}

// Seed for a per-column noise stream. Column 0 keeps the caller's seed, so a
// single-column batch reproduces a plain single measurement bit for bit.
inline std::uint64_t column_seed(std::uint64_t seed, std::uint64_t column) {
  return seed + kGolden64 * column;
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += kGolden64);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

class Xoshiro256pp {
 public:
  // State is expanded from the seed with SplitMix64, as recommended by the
  // xoshiro authors.
  explicit Xoshiro256pp(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& word : state_) word = sm.next();
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0,1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in (0,1]; safe as a log argument.
  double uniform_pos() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, bound) by rejection; bound must be >= 1.
  std::uint64_t uniform_int(std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % bound;
    std::uint64_t raw;
    do {
      raw = next();
    } while (raw >= limit);
    return raw % bound;
  }

  // Standard normal via Box-Muller; generates pairs, returns the cached
  // second value on every other call.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  // One fair bit; 64 bits are drawn per word, least significant first.
  bool bernoulli_bit() {
    if (bits_left_ == 0) {
      bit_buffer_ = next();
      bits_left_ = 64;
    }
    const bool bit = (bit_buffer_ & 1u) != 0;
    bit_buffer_ >>= 1;
    --bits_left_;
    return bit;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
  std::uint64_t bit_buffer_ = 0;
  int bits_left_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Stream tags for deriving independent sub-streams from one master seed.
// Values are part of the reproducibility contract; do not renumber.
enum StreamTag : std::uint64_t {
  kTagLibrary = 1,
  kTagTrial = 2,
  kTagBackground = 3,
  kTagPose = 4,
  kTagNuisance = 5,
  kTagNoise = 6,
  kTagIdentityTexture = 7,
  kTagInstanceBase = 8,
  kTagPermutation = 9,
  kTagChain = 10,
};

}  // namespace spx

#endif
