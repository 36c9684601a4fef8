#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mono::stats {

/// z-scores with the sample (n - 1) standard deviation.
/// Throws TooFewObservations (n < 2) or ZeroVariance.
std::vector<double> standardize(std::span<const double> column);

double mean(std::span<const double> v);
/// Sample standard deviation (n - 1 denominator).
double sample_sd(std::span<const double> v);

/// Student-t CDF through the regularized incomplete beta function.
double student_t_cdf(double t, double df);
/// P(|T| > |t|).
double student_t_two_sided_p(double t, double df);
double student_t_quantile(double p, double df);

struct OlsTerm {
  std::string name;
  double coef = 0, std_err = 0, t = 0, p_value = 0, ci_lower = 0, ci_upper = 0;
};

struct OlsFit {
  std::vector<OlsTerm> terms;
  double r_squared = 0;
  double sigma2 = 0;  // residual variance estimate SSR / (n - p)
  std::size_t observations = 0;
  std::size_t df_residual = 0;

  const OlsTerm& term(std::string_view name) const;
};

/// Ordinary least squares on a row-major n x p design. When `has_intercept`
/// the R^2 uses the centered total sum of squares, otherwise the uncentered one.
/// Throws TooFewObservations (n <= p) or RankDeficient naming collinear terms.
OlsFit ols(std::span<const double> design, std::size_t n, std::size_t p, std::span<const double> y,
           const std::vector<std::string>& names, bool has_intercept);

}  // namespace mono::stats
