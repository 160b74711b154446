// Seed derivation for reproducible experiment sweeps.
//
// Every random draw in the library is made from a std::mt19937_64 seeded
// through derive_seed(), which folds a master seed with a stream of integer
// ids (experiment id, parameter index, trial index, ...) using splitmix64.
// Adding trials or sweep points never reshuffles the seeds of existing ones.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace corrsbl {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Folds ids into the master seed left to right: s <- splitmix64(s ^ id).
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> ids) {
  std::uint64_t s = splitmix64(master);
  for (std::uint64_t id : ids) s = splitmix64(s ^ id);
  return s;
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

}  // namespace corrsbl
