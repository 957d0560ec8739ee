#ifndef HSS_RANDOM_HPP
#define HSS_RANDOM_HPP

#include <cstdint>
#include <random>

namespace hss {

  // std::mt19937_64 has a standard-mandated output sequence. Distributions
  // come from Boost.Random so that streams are identical across standard
  // library implementations.
  using Rng = std::mt19937_64;

  // splitmix64 finalizer; used to derive independent child seeds from a
  // master seed and a stream tag.
  inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return mix_seed(mix_seed(master) ^ (stream * 0xd1b54a32d192ed03ULL + 1));
  }

} // namespace hss

#endif
