#include "mono/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define MONO_HAVE_AVX2_TU 1
#include <immintrin.h>
#else
#define MONO_HAVE_AVX2_TU 0
#endif

#include <bit>
#include <cmath>

namespace mono::kernels::avx2 {

#if MONO_HAVE_AVX2_TU

bool compiled() { return true; }

namespace {

inline std::int64_t popcount_mask(__m256i m) {
  return std::popcount(static_cast<std::uint32_t>(_mm256_movemask_epi8(m)));
}

inline __m256i load32(const std::int8_t* p) {
  return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p));
}

}  // namespace

PairCounts pair_counts(std::span<const std::int8_t> a, std::span<const std::int8_t> b,
                       std::span<const std::int8_t> key) {
  PairCounts c;
  const std::size_t n = key.size();
  c.items = static_cast<std::int64_t>(n);
  const __m256i missing = _mm256_set1_epi8(kMissingAnswer);
  std::size_t q = 0;
  for (; q + 32 <= n; q += 32) {
    const __m256i va = load32(a.data() + q);
    const __m256i vb = load32(b.data() + q);
    const __m256i vk = load32(key.data() + q);
    const __m256i ra = _mm256_cmpeq_epi8(va, vk);
    const __m256i rb = _mm256_cmpeq_epi8(vb, vk);
    const __m256i ab = _mm256_cmpeq_epi8(va, vb);
    const __m256i present = _mm256_cmpeq_epi8(va, missing);  // inverted below
    const __m256i right = _mm256_and_si256(ra, rb);
    const __m256i either_right = _mm256_or_si256(ra, rb);
    const __m256i wrong_same = _mm256_andnot_si256(either_right, ab);
    c.both_right += popcount_mask(right);
    c.both_wrong += 32 - popcount_mask(either_right);
    c.both_wrong_agree += popcount_mask(_mm256_andnot_si256(present, wrong_same));
  }
  if (q < n) {
    const PairCounts tail = scalar::pair_counts(a.subspan(q), b.subspan(q), key.subspan(q));
    c.both_right += tail.both_right;
    c.both_wrong += tail.both_wrong;
    c.both_wrong_agree += tail.both_wrong_agree;
  }
  return c;
}

std::int64_t count_equal(std::span<const std::int8_t> a, std::span<const std::int8_t> b) {
  const std::size_t n = a.size();
  std::int64_t total = 0;
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    total += popcount_mask(_mm256_cmpeq_epi8(load32(a.data() + i), load32(b.data() + i)));
  }
  return total + scalar::count_equal(a.subspan(i), b.subspan(i));
}

std::int64_t count_value(std::span<const std::int8_t> a, std::int8_t value) {
  const std::size_t n = a.size();
  const __m256i v = _mm256_set1_epi8(value);
  std::int64_t total = 0;
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    total += popcount_mask(_mm256_cmpeq_epi8(load32(a.data() + i), v));
  }
  return total + scalar::count_value(a.subspan(i), value);
}

Moments masked_moments(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  const std::size_t body = n - n % 4;
  __m256d sx = _mm256_setzero_pd(), sy = _mm256_setzero_pd();
  __m256d sxx = _mm256_setzero_pd(), syy = _mm256_setzero_pd(), sxy = _mm256_setzero_pd();
  const __m256d zero = _mm256_setzero_pd();
  Moments m;
  for (std::size_t i = 0; i < body; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x.data() + i);
    const __m256d yv = _mm256_loadu_pd(y.data() + i);
    const __m256d ok = _mm256_and_pd(_mm256_cmp_pd(xv, xv, _CMP_ORD_Q), _mm256_cmp_pd(yv, yv, _CMP_ORD_Q));
    m.n += std::popcount(static_cast<unsigned>(_mm256_movemask_pd(ok)));
    const __m256d xm = _mm256_blendv_pd(zero, xv, ok);
    const __m256d ym = _mm256_blendv_pd(zero, yv, ok);
    sx = _mm256_add_pd(sx, xm);
    sy = _mm256_add_pd(sy, ym);
    sxx = _mm256_add_pd(sxx, _mm256_mul_pd(xm, xm));
    syy = _mm256_add_pd(syy, _mm256_mul_pd(ym, ym));
    sxy = _mm256_add_pd(sxy, _mm256_mul_pd(xm, ym));
  }
  auto fold = [](__m256d v) {
    alignas(32) double l[4];
    _mm256_store_pd(l, v);
    return (l[0] + l[1]) + (l[2] + l[3]);
  };
  m.sx = fold(sx);
  m.sy = fold(sy);
  m.sxx = fold(sxx);
  m.syy = fold(syy);
  m.sxy = fold(sxy);
  for (std::size_t i = body; i < n; ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) continue;
    ++m.n;
    m.sx += x[i];
    m.sy += y[i];
    m.sxx += x[i] * x[i];
    m.syy += y[i] * y[i];
    m.sxy += x[i] * y[i];
  }
  return m;
}

#else

bool compiled() { return false; }
PairCounts pair_counts(std::span<const std::int8_t> a, std::span<const std::int8_t> b,
                       std::span<const std::int8_t> key) {
  return scalar::pair_counts(a, b, key);
}
std::int64_t count_equal(std::span<const std::int8_t> a, std::span<const std::int8_t> b) {
  return scalar::count_equal(a, b);
}
std::int64_t count_value(std::span<const std::int8_t> a, std::int8_t value) {
  return scalar::count_value(a, value);
}
Moments masked_moments(std::span<const double> x, std::span<const double> y) {
  return scalar::masked_moments(x, y);
}

#endif

}  // namespace mono::kernels::avx2
