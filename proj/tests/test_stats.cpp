#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "mono/rng.hpp"
#include "mono/stats.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace mono;
using mono::test::error_kind;

TEST_CASE("standardize uses the sample standard deviation") {
  const auto z = stats::standardize(std::vector<double>{1, 2, 3});
  CHECK(z == std::vector<double>{-1, 0, 1});
  CHECK(stats::sample_sd(std::vector<double>{1, 2, 3}) == 1.0);
  CHECK(stats::mean(std::vector<double>{1, 2, 3, 6}) == 3.0);
  CHECK(error_kind([] { stats::standardize(std::vector<double>{4}); }) == ErrorKind::TooFewObservations);
  CHECK(error_kind([] { stats::standardize(std::vector<double>{2, 2}); }) == ErrorKind::ZeroVariance);
}

TEST_CASE("student t distribution against numerical integration") {
  for (double df : {1.0, 2.5, 7.0, 30.0, 400.0}) {
    for (double t : {0.0, 0.3, 1.0, 2.2, 5.0}) {
      CHECK(stats::student_t_two_sided_p(t, df) == doctest::Approx(oracle::t_two_sided_p(t, df)).epsilon(1e-9));
      CHECK(stats::student_t_cdf(t, df) + stats::student_t_cdf(-t, df) == doctest::Approx(1.0));
    }
    CHECK(stats::student_t_cdf(stats::student_t_quantile(0.975, df), df) == doctest::Approx(0.975));
  }
  CHECK(stats::student_t_two_sided_p(1.0, 1.0) == doctest::Approx(0.5));  // Cauchy
}

TEST_CASE("OLS matches the normal equations on random designs") {
  Engine eng = make_engine(99);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t p = 1 + uniform_index(eng, 8);
    const std::size_t n = p + 5 + uniform_index(eng, 200);
    std::vector<double> x(n * p), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i * p] = 1.0;
      for (std::size_t j = 1; j < p; ++j) x[i * p + j] = standard_normal(eng) * (j + 1);
      y[i] = 0.5 + standard_normal(eng);
      for (std::size_t j = 1; j < p; ++j) y[i] += 0.1 * j * x[i * p + j];
    }
    std::vector<std::string> names(p);
    for (std::size_t j = 0; j < p; ++j) names[j] = "x" + std::to_string(j);
    const auto fit = stats::ols(x, n, p, y, names, true);
    const auto ref = oracle::ols(x, n, p, y, true);
    REQUIRE(fit.terms.size() == p);
    CHECK(fit.observations == n);
    CHECK(fit.df_residual == n - p);
    for (std::size_t j = 0; j < p; ++j) {
      CHECK(std::abs(fit.terms[j].coef - ref.coef[j]) < 1e-9);
      CHECK(std::abs(fit.terms[j].std_err - ref.se[j]) < 1e-9);
      CHECK(std::abs(fit.terms[j].t - ref.t[j]) < 1e-6);
      CHECK(std::abs(fit.terms[j].p_value - ref.p[j]) < 1e-6);
      const double q = stats::student_t_quantile(0.975, static_cast<double>(n - p));
      CHECK(fit.terms[j].ci_lower == doctest::Approx(ref.coef[j] - q * ref.se[j]));
    }
    if (p > 1) CHECK(std::abs(fit.r_squared - ref.r_squared) < 1e-9);
  }
}

TEST_CASE("exact linear data has unit R squared") {
  std::vector<double> x, y;
  for (int i = 0; i < 30; ++i) {
    x.insert(x.end(), {1.0, static_cast<double>(i), std::sin(i)});
    y.push_back(2.0 - 0.5 * i + 3.0 * std::sin(i));
  }
  const auto fit = stats::ols(x, 30, 3, y, {"Intercept", "a", "b"}, true);
  CHECK(std::abs(fit.r_squared - 1.0) < 1e-10);
  CHECK(fit.term("a").coef == doctest::Approx(-0.5));
  CHECK(error_kind([&] { fit.term("zzz"); }) == ErrorKind::Usage);
}

TEST_CASE("OLS rejects rank deficiency and tiny samples") {
  std::vector<double> x, y;
  for (int i = 0; i < 10; ++i) {
    x.insert(x.end(), {1.0, static_cast<double>(i), 2.0 * i});
    y.push_back(i % 3);
  }
  std::string msg;
  CHECK(error_kind([&] { stats::ols(x, 10, 3, y, {"Intercept", "a", "twice_a"}, true); }, &msg) ==
        ErrorKind::RankDeficient);
  CHECK(msg.find("collinear") != std::string::npos);
  CHECK(error_kind([&] {
          stats::ols(std::vector<double>{1, 2, 1, 3}, 2, 2, std::vector<double>{1, 2}, {"Intercept", "a"}, true);
        }) == ErrorKind::TooFewObservations);
}
