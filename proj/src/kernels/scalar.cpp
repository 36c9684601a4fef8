#include <cmath>

#include "mono/kernels.hpp"

namespace mono::kernels::scalar {

PairCounts pair_counts(std::span<const std::int8_t> a, std::span<const std::int8_t> b,
                       std::span<const std::int8_t> key) {
  PairCounts c;
  c.items = static_cast<std::int64_t>(key.size());
  for (std::size_t q = 0; q < key.size(); ++q) {
    const bool ra = a[q] == key[q];
    const bool rb = b[q] == key[q];
    c.both_right += ra && rb;
    if (!ra && !rb) {
      ++c.both_wrong;
      c.both_wrong_agree += a[q] == b[q] && a[q] != kMissingAnswer;
    }
  }
  return c;
}

std::int64_t count_equal(std::span<const std::int8_t> a, std::span<const std::int8_t> b) {
  std::int64_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += a[i] == b[i];
  return n;
}

std::int64_t count_value(std::span<const std::int8_t> a, std::int8_t value) {
  std::int64_t n = 0;
  for (std::int8_t v : a) n += v == value;
  return n;
}

Moments masked_moments(std::span<const double> x, std::span<const double> y) {
  // Four interleaved accumulators, combined pairwise, so the rounding matches
  // the 4-wide vector path exactly.
  double sx[4] = {}, sy[4] = {}, sxx[4] = {}, syy[4] = {}, sxy[4] = {};
  Moments m;
  const std::size_t n = x.size();
  const std::size_t body = n - n % 4;
  for (std::size_t i = 0; i < body; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) {
      const double xi = x[i + l];
      const double yi = y[i + l];
      const bool ok = !std::isnan(xi) && !std::isnan(yi);
      const double xv = ok ? xi : 0.0;
      const double yv = ok ? yi : 0.0;
      m.n += ok;
      sx[l] += xv;
      sy[l] += yv;
      sxx[l] += xv * xv;
      syy[l] += yv * yv;
      sxy[l] += xv * yv;
    }
  }
  auto fold = [](const double* v) { return (v[0] + v[1]) + (v[2] + v[3]); };
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

}  // namespace mono::kernels::scalar
