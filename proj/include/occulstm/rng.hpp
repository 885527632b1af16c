#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace occulstm {

// All randomness in the project flows from one root seed. Consumers derive
// child seeds by hashing a stream label, so adding a new consumer never
// shifts the sequence seen by an existing one.

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
  return splitmix64(seed ^ fnv1a64(label));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label,
                                 std::uint64_t index) {
  return splitmix64(derive_seed(seed, label) ^ splitmix64(index));
}

using Rng = std::mt19937_64;

// [0, 1) with 53 random mantissa bits. The distribution classes in <random>
// are implementation-defined, so the transforms below are spelled out.
inline double uniform01(Rng& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double uniform_range(Rng& g, double lo, double hi) {
  return lo + (hi - lo) * uniform01(g);
}

// Uniform draw from [0, n). Modulo bias is < 2^-50 for the small n used here.
inline std::uint64_t uniform_index(Rng& g, std::uint64_t n) {
  return g() % n;
}

// Box-Muller, cosine branch only; two uniforms consumed per draw.
inline double gaussian(Rng& g, double mean, double sd) {
  double u1 = 1.0 - uniform01(g);  // (0, 1], keeps the log finite
  double u2 = uniform01(g);
  return mean + sd * std::sqrt(-2.0 * std::log(u1)) *
                    std::cos(6.283185307179586476925287 * u2);
}

// Fisher-Yates with the portable index draw above.
template <class T>
void shuffle_in_place(std::vector<T>& v, Rng& g) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(uniform_index(g, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace occulstm
