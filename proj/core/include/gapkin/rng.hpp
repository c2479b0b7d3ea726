#pragma once

#include <cstdint>

namespace gapkin {

inline std::uint64_t splitmix64(std::uint64_t& s)
{
  std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256** seeded from a hash of (master seed, particle, event). Every
// random decision of a particle is a pure function of those three numbers,
// which is what makes runs independent of the worker count.
class Rng {
public:
  Rng(std::uint64_t seed, std::uint64_t particle, std::uint64_t event)
  {
    std::uint64_t h = seed;
    h ^= splitmix64(h) + particle * 0xd1b54a32d192ed03ULL;
    h ^= splitmix64(h) + event * 0x8cb92ba72f3d8dd7ULL;
    for (auto& w : s_) w = splitmix64(h);
  }

  std::uint64_t next()
  {
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

  //! Uniform on [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

} // namespace gapkin
