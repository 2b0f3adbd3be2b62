#pragma once

#include <cstdint>

namespace qlgs {

// splitmix64 finalizer; decorrelates consecutive sample indices so every
// worker can seed its own engine deterministically from (base, index).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t sample_seed(std::uint64_t base, std::uint64_t index) {
  return base ^ splitmix64(index + 0x632be59bd9b4e019ULL);
}

}  // namespace qlgs
