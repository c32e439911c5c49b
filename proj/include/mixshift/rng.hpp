#pragma once

#include <array>
#include <cassert>
#include <cstdint>

namespace mixshift {

// Weyl increment used by splitmix64; also used to derive child stream ids.
inline constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer (Stafford mix13); bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Reproducibility contract: identical (master, stream) produce the identical
// sequence on every platform and thread count.  Distinct streams derived via
// child() are statistically independent for practical purposes.
struct Seed {
  std::uint64_t master = 0;
  std::uint64_t stream = 0;

  constexpr Seed child(std::uint64_t k) const {
    return Seed{master, mix64(stream ^ (golden_gamma * (k + 1)))};
  }
  friend constexpr bool operator==(const Seed&, const Seed&) = default;
};

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t state) : state_(state) {}

  constexpr std::uint64_t next() {
    state_ += golden_gamma;
    return mix64(state_);
  }

 private:
  std::uint64_t state_;
};

// xoshiro256++ (Blackman & Vigna, 2019).  State is expanded from the Seed with
// splitmix64 as the authors recommend.
class Xoshiro256pp {
 public:
  explicit constexpr Xoshiro256pp(Seed seed) {
    SplitMix64 sm(seed.master ^ mix64(seed.stream ^ golden_gamma));
    for (auto& w : s_) w = sm.next();
  }
  explicit constexpr Xoshiro256pp(const std::array<std::uint64_t, 4>& state) : s_(state) {}

  constexpr std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on the open interval (0,1): 53-bit mantissa offset by half an ulp,
  // so 0 and 1 are unreachable and quantile transforms stay finite.
  constexpr double uniform01() {
    return static_cast<double>((next() >> 11) + 0.5) * 0x1p-53;
  }

  // Unbiased integer in [0, bound) by rejection of the short final cycle.
  constexpr std::uint64_t below(std::uint64_t bound) {
    assert(bound > 0);
    const std::uint64_t limit = (0 - bound) % bound;  // 2^64 mod bound
    std::uint64_t r = next();
    while (r < limit) r = next();
    return r % bound;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
};

}  // namespace mixshift
