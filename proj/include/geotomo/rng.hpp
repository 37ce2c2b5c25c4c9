#pragma once

#include <cstdint>
#include <random>

namespace geotomo {

using Rng = std::mt19937_64;

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from (seed, stream, index). Every sampled
/// item in a loop gets its own generator so results never depend on iteration
/// order or thread count.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t index = 0) {
  return mix64(mix64(mix64(seed) ^ (stream * 0x632be59bd9b4e019ULL)) ^ index);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t index = 0) {
  return Rng(derive_seed(seed, stream, index));
}

// Stream identifiers, fixed so that adding a new consumer never perturbs old ones.
namespace stream {
inline constexpr std::uint64_t kSphere = 1;
inline constexpr std::uint64_t kGrassmann = 2;
inline constexpr std::uint64_t kContaining = 3;
inline constexpr std::uint64_t kRule = 4;
inline constexpr std::uint64_t kPositivity = 10;
inline constexpr std::uint64_t kReconstruction = 11;
inline constexpr std::uint64_t kInner = 12;
inline constexpr std::uint64_t kTestDirections = 13;
inline constexpr std::uint64_t kSections = 20;
inline constexpr std::uint64_t kConvexity = 30;
inline constexpr std::uint64_t kFit = 40;
inline constexpr std::uint64_t kSurrogate = 50;
}  // namespace stream

}  // namespace geotomo
