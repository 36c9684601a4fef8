#pragma once

// Seed derivation and portable draws.
//
// Every random quantity in the toolkit flows from a single master seed. Child
// seeds are derived by mixing (parent, tag) through SplitMix64 so that any
// sub-stream can be reconstructed without replaying its siblings. The engine is
// std::mt19937_64, whose output sequence is fixed by the standard; the
// distributions below are implemented here because the std:: ones are
// implementation-defined.

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace mono {

using Engine = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t hash_tag(std::string_view tag);

/// Child seed for (parent, tag); tags compose: derive(derive(s, "firm"), 3).
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag);
std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag);

inline Engine make_engine(std::uint64_t seed) { return Engine(seed); }

/// Uniform integer in [0, n). n must be > 0.
std::uint64_t uniform_index(Engine& eng, std::uint64_t n);

/// Uniform real in [0, 1) with 53 bits of resolution.
double uniform01(Engine& eng);

/// Standard normal via Box-Muller (one variate per call).
double standard_normal(Engine& eng);

template <typename T>
void shuffle(std::span<T> values, Engine& eng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = uniform_index(eng, i);
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace mono
