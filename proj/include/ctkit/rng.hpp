// Seed derivation helpers. Distinct streams (train/test/noise/...) are keyed
// by a stream tag so datasets stay disjoint and reproducible from one seed.
#pragma once

#include <cstdint>

namespace ctkit {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t base, uint64_t stream, uint64_t index) {
  return splitmix64(splitmix64(base ^ (stream * 0x9e3779b97f4a7c15ULL)) + index);
}

namespace seed_stream {
constexpr uint64_t train_phantom = 0x7261696eULL;
constexpr uint64_t test_phantom = 0x74657374ULL;
constexpr uint64_t train_noise = 0x6e6f6973ULL;
constexpr uint64_t test_noise = 0x6e747374ULL;
constexpr uint64_t model_init = 0x696e6974ULL;
constexpr uint64_t shuffle = 0x73687566ULL;
}  // namespace seed_stream

}  // namespace ctkit
