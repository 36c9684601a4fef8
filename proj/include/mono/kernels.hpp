#pragma once

// Inner-loop kernels over answer rows and rating rows.
//
// Answers are stored as int8 choice indices with kMissingAnswer (-1) for
// abstentions. Each kernel has a scalar reference and an AVX2 variant; the
// dispatcher picks the widest one the CPU supports at first use. Both variants
// must return bit-identical results (integer counts, and moments accumulated
// in a fixed lane order).

#include <cstdint>
#include <span>
#include <string_view>

namespace mono::kernels {

inline constexpr std::int8_t kMissingAnswer = -1;

struct PairCounts {
  std::int64_t items = 0;
  std::int64_t both_right = 0;
  std::int64_t both_wrong = 0;
  // Both wrong, same non-missing answer.
  std::int64_t both_wrong_agree = 0;

  // Any agreement requires both answers present, so agreeing on an item means
  // either both right or both wrong on the same option.
  std::int64_t agree() const { return both_right + both_wrong_agree; }
  std::int64_t either_wrong() const { return items - both_right; }
  // A right and a wrong answer never coincide.
  std::int64_t either_wrong_agree() const { return both_wrong_agree; }

  friend bool operator==(const PairCounts&, const PairCounts&) = default;
};

/// Sums over indices where both x and y are non-NaN.
struct Moments {
  std::int64_t n = 0;
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;

  friend bool operator==(const Moments&, const Moments&) = default;
};

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

namespace scalar {
PairCounts pair_counts(std::span<const std::int8_t> a, std::span<const std::int8_t> b,
                       std::span<const std::int8_t> key);
std::int64_t count_equal(std::span<const std::int8_t> a, std::span<const std::int8_t> b);
std::int64_t count_value(std::span<const std::int8_t> a, std::int8_t value);
Moments masked_moments(std::span<const double> x, std::span<const double> y);
}  // namespace scalar

namespace avx2 {
bool compiled();
PairCounts pair_counts(std::span<const std::int8_t> a, std::span<const std::int8_t> b,
                       std::span<const std::int8_t> key);
std::int64_t count_equal(std::span<const std::int8_t> a, std::span<const std::int8_t> b);
std::int64_t count_value(std::span<const std::int8_t> a, std::int8_t value);
Moments masked_moments(std::span<const double> x, std::span<const double> y);
}  // namespace avx2

bool cpu_supports(Isa isa);

/// ISA used by the dispatching entry points below.
Isa active_isa();

/// Forces a particular ISA (tests, benchmarking). Throws if unsupported.
void set_active_isa(Isa isa);

PairCounts pair_counts(std::span<const std::int8_t> a, std::span<const std::int8_t> b,
                       std::span<const std::int8_t> key);
std::int64_t count_equal(std::span<const std::int8_t> a, std::span<const std::int8_t> b);
std::int64_t count_value(std::span<const std::int8_t> a, std::int8_t value);
Moments masked_moments(std::span<const double> x, std::span<const double> y);

}  // namespace mono::kernels
