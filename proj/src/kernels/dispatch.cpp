#include <atomic>

#include "mono/error.hpp"
#include "mono/kernels.hpp"

namespace mono::kernels {

std::string_view to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
      return avx2::compiled() && __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

namespace {

Isa detect() { return cpu_supports(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar; }

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!cpu_supports(isa)) {
    throw Error(ErrorKind::Usage, "ISA not supported on this CPU: " + std::string(to_string(isa)));
  }
  active().store(isa, std::memory_order_relaxed);
}

PairCounts pair_counts(std::span<const std::int8_t> a, std::span<const std::int8_t> b,
                       std::span<const std::int8_t> key) {
  return active_isa() == Isa::Avx2 ? avx2::pair_counts(a, b, key) : scalar::pair_counts(a, b, key);
}

std::int64_t count_equal(std::span<const std::int8_t> a, std::span<const std::int8_t> b) {
  return active_isa() == Isa::Avx2 ? avx2::count_equal(a, b) : scalar::count_equal(a, b);
}

std::int64_t count_value(std::span<const std::int8_t> a, std::int8_t value) {
  return active_isa() == Isa::Avx2 ? avx2::count_value(a, value) : scalar::count_value(a, value);
}

Moments masked_moments(std::span<const double> x, std::span<const double> y) {
  return active_isa() == Isa::Avx2 ? avx2::masked_moments(x, y) : scalar::masked_moments(x, y);
}

}  // namespace mono::kernels
