#pragma once

#include <cstdint>
#include <random>

namespace pamlab {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Independent generator for task (a, b) under a root seed.  Streams depend
/// only on the indices, never on which thread runs the task.
inline Rng derive_stream(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t h = splitmix64(root);
  h = splitmix64(h ^ splitmix64(a + 0x632be59bd9b4e019ull));
  h = splitmix64(h ^ splitmix64(b + 0x85157af5ull));
  return Rng(h);
}

}  // namespace pamlab
