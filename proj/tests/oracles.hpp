#pragma once
// Independent reference implementations used to check library results.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <vector>

namespace mono::oracle {

/// Solves A x = b by Gauss-Jordan elimination with partial pivoting in long double.
inline std::vector<long double> solve(std::vector<std::vector<long double>> a, std::vector<long double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const long double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
  return b;
}

/// Inverse of a symmetric positive definite matrix, column by column.
inline std::vector<std::vector<long double>> inverse(const std::vector<std::vector<long double>>& a) {
  const std::size_t n = a.size();
  std::vector<std::vector<long double>> inv(n, std::vector<long double>(n));
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<long double> e(n, 0.0L);
    e[c] = 1.0L;
    const auto col = solve(a, e);
    for (std::size_t r = 0; r < n; ++r) inv[r][c] = col[r];
  }
  return inv;
}

/// Student-t density.
inline double t_density(double x, double df) {
  const double lg = std::lgamma((df + 1) / 2) - std::lgamma(df / 2);
  return std::exp(lg - 0.5 * std::log(df * std::numbers::pi) - (df + 1) / 2 * std::log1p(x * x / df));
}

/// P(|T| > |t|) by composite Simpson integration of the density over [0, |t|].
inline double t_two_sided_p(double t, double df) {
  const double a = std::fabs(t);
  if (a == 0) return 1.0;
  const std::size_t n = 20000;
  const double h = a / n;
  double s = t_density(0, df) + t_density(a, df);
  for (std::size_t i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * t_density(i * h, df);
  const double central = s * h / 3.0;  // P(0 < T < |t|)
  return std::max(0.0, 1.0 - 2.0 * central);
}

struct OlsOracle {
  std::vector<double> coef, se, t, p;
  double r_squared = 0;
};

/// Normal-equations OLS on a row-major n x p design.
inline OlsOracle ols(const std::vector<double>& x, std::size_t n, std::size_t p, const std::vector<double>& y,
                     bool has_intercept) {
  std::vector<std::vector<long double>> xtx(p, std::vector<long double>(p, 0.0L));
  std::vector<long double> xty(p, 0.0L);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < p; ++a) {
      xty[a] += static_cast<long double>(x[i * p + a]) * y[i];
      for (std::size_t b = 0; b < p; ++b) xtx[a][b] += static_cast<long double>(x[i * p + a]) * x[i * p + b];
    }
  }
  const auto beta = solve(xtx, xty);
  const auto inv = inverse(xtx);
  long double ssr = 0, ybar = 0, sst = 0;
  for (std::size_t i = 0; i < n; ++i) ybar += y[i];
  ybar /= n;
  for (std::size_t i = 0; i < n; ++i) {
    long double fit = 0;
    for (std::size_t a = 0; a < p; ++a) fit += beta[a] * x[i * p + a];
    ssr += (y[i] - fit) * (y[i] - fit);
    const long double dy = has_intercept ? y[i] - ybar : y[i];
    sst += dy * dy;
  }
  const double df = static_cast<double>(n - p);
  const long double s2 = ssr / df;
  OlsOracle o;
  for (std::size_t a = 0; a < p; ++a) {
    o.coef.push_back(static_cast<double>(beta[a]));
    o.se.push_back(static_cast<double>(std::sqrt(s2 * inv[a][a])));
    o.t.push_back(o.coef.back() / o.se.back());
    o.p.push_back(t_two_sided_p(o.t.back(), df));
  }
  o.r_squared = static_cast<double>(1.0L - ssr / sst);
  return o;
}

/// Applicant-optimal stable matching by exhaustive enumeration. Applicants
/// rank firms by `applicant_pref[a]` (most preferred first, only acceptable
/// firms listed); firms rank applicants by `firm_rank[f][a]` (lower is better)
/// and accept up to `capacity`. Returns match[a] (firm or -1).
inline std::vector<int> brute_force_applicant_optimal(const std::vector<std::vector<int>>& applicant_pref,
                                                      const std::vector<std::vector<int>>& firm_rank,
                                                      int capacity) {
  const std::size_t A = applicant_pref.size();
  const std::size_t F = firm_rank.size();
  auto pref_pos = [&](std::size_t a, int f) -> int {
    const auto& v = applicant_pref[a];
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] == f) return static_cast<int>(i);
    return -1;
  };
  std::vector<int> match(A, -1);
  std::vector<std::vector<int>> stable;
  std::function<void(std::size_t)> rec = [&](std::size_t a) {
    if (a == A) {
      std::vector<int> load(F, 0);
      for (int m : match)
        if (m >= 0) ++load[m];
      for (std::size_t f = 0; f < F; ++f)
        if (load[f] > capacity) return;
      for (std::size_t i = 0; i < A; ++i) {
        const int cur = match[i] < 0 ? static_cast<int>(applicant_pref[i].size()) : pref_pos(i, match[i]);
        for (int k = 0; k < cur; ++k) {
          const int f = applicant_pref[i][k];
          if (load[f] < capacity) return;
          for (std::size_t j = 0; j < A; ++j)
            if (match[j] == f && firm_rank[f][i] < firm_rank[f][j]) return;
        }
      }
      stable.push_back(match);
      return;
    }
    match[a] = -1;
    rec(a + 1);
    for (int f : applicant_pref[a]) {
      match[a] = f;
      rec(a + 1);
    }
    match[a] = -1;
  };
  rec(0);
  // The applicant-optimal matching is weakly preferred by every applicant to every other stable one.
  for (const auto& s : stable) {
    bool best = true;
    for (const auto& o : stable) {
      for (std::size_t a = 0; a < A && best; ++a) {
        const int ps = s[a] < 0 ? 1000 : pref_pos(a, s[a]);
        const int po = o[a] < 0 ? 1000 : pref_pos(a, o[a]);
        if (po < ps) best = false;
      }
      if (!best) break;
    }
    if (best) return s;
  }
  return {};
}

}  // namespace mono::oracle
