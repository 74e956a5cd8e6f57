#ifndef ALO_SRC_SPLITMIX_H_
#define ALO_SRC_SPLITMIX_H_

#include <cstdint>

namespace alo::internal {

// SplitMix64 finalizer; used to derive independent stream seeds.
inline std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace alo::internal

#endif  // ALO_SRC_SPLITMIX_H_
