#include "mono/rng.hpp"

#include <cmath>
#include <numbers>

namespace mono {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_tag(std::string_view tag) {
  // FNV-1a, then finalized.
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return splitmix64(h);
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag) {
  return splitmix64(splitmix64(parent) ^ (tag + 0x632BE59BD9B4E019ULL));
}

std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag) {
  return derive_seed(parent, hash_tag(tag));
}

std::uint64_t uniform_index(Engine& eng, std::uint64_t n) {
  // Rejection sampling on the top of the range keeps the draw exactly uniform.
  const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n);
  std::uint64_t x;
  do {
    x = eng();
  } while (x >= limit);
  return x % n;
}

double uniform01(Engine& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

double standard_normal(Engine& eng) {
  double u1;
  do {
    u1 = uniform01(eng);
  } while (u1 <= 0.0);
  const double u2 = uniform01(eng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace mono
