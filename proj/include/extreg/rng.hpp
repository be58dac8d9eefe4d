#ifndef EXTREG_RNG_HPP
#define EXTREG_RNG_HPP

#include <cstdint>
#include <random>

namespace extreg {

// splitmix64 scramble; used to derive decorrelated stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Child seed for replication `id`; decorrelated from the parent and from
// every other id.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t id) {
  std::uint64_t state = seed ^ (0x9e3779b97f4a7c15ULL * (id + 1));
  return splitmix64(state);
}

// Deterministic per-stream generator: stream `id` derived from `seed` is
// independent of every other id, so replications can be generated in any
// order with identical results.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t id) {
  std::uint64_t state = seed;
  std::uint64_t a = splitmix64(state);
  state ^= 0x517cc1b727220a95ULL * (id + 1);
  std::uint64_t b = splitmix64(state);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace extreg

#endif
