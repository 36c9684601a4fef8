#include "mono/stats.hpp"

#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "mono/error.hpp"

namespace mono::stats {

double mean(std::span<const double> v) {
  if (v.empty()) throw Error(ErrorKind::TooFewObservations, "mean of empty column");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v) {
  if (v.size() < 2) throw Error(ErrorKind::TooFewObservations, "standard deviation needs 2 values");
  const double mu = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::vector<double> standardize(std::span<const double> column) {
  const double mu = mean(column);
  const double sd = sample_sd(column);
  const double scale = std::max(1.0, std::abs(mu));
  if (!(sd > 1e-12 * scale)) throw Error(ErrorKind::ZeroVariance, "cannot standardize a constant column");
  std::vector<double> out(column.size());
  for (std::size_t i = 0; i < column.size(); ++i) out[i] = (column[i] - mu) / sd;
  return out;
}

double student_t_cdf(double t, double df) {
  if (!(df > 0)) throw Error(ErrorKind::TooFewObservations, "t distribution needs df > 0");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  // P(T <= t) = 1 - I_x(df/2, 1/2)/2 for t > 0 with x = df / (df + t^2).
  const double x = df / (df + t * t);
  const double tail = 0.5 * boost::math::ibeta(0.5 * df, 0.5, x);
  return t > 0 ? 1.0 - tail : tail;
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0)) throw Error(ErrorKind::TooFewObservations, "t distribution needs df > 0");
  if (std::isinf(t)) return 0.0;
  return boost::math::ibeta(0.5 * df, 0.5, df / (df + t * t));
}

double student_t_quantile(double p, double df) {
  boost::math::students_t_distribution<double> dist(df);
  return boost::math::quantile(dist, p);
}

const OlsTerm& OlsFit::term(std::string_view name) const {
  for (const auto& t : terms) {
    if (t.name == name) return t;
  }
  throw Error(ErrorKind::Usage, "no term '" + std::string(name) + "' in fit");
}

OlsFit ols(std::span<const double> design, std::size_t n, std::size_t p, std::span<const double> y,
           const std::vector<std::string>& names, bool has_intercept) {
  if (design.size() != n * p || y.size() != n || names.size() != p) {
    throw Error(ErrorKind::Usage, "OLS inputs have inconsistent dimensions");
  }
  if (n <= p) {
    throw Error(ErrorKind::TooFewObservations,
                std::to_string(n) + " observations for " + std::to_string(p) + " terms");
  }
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMat> X(design.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  const Eigen::Map<const Eigen::VectorXd> Y(y.data(), static_cast<Eigen::Index>(n));

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  const auto rank = static_cast<std::size_t>(qr.rank());
  if (rank < p) {
    std::string which;
    const auto perm = qr.colsPermutation().indices();
    for (std::size_t k = rank; k < p; ++k) {
      if (!which.empty()) which += ", ";
      which += names[static_cast<std::size_t>(perm[static_cast<Eigen::Index>(k)])];
    }
    throw Error(ErrorKind::RankDeficient, "design matrix has rank " + std::to_string(rank) + " < " +
                                              std::to_string(p) + "; collinear terms: " + which);
  }

  const Eigen::VectorXd beta = qr.solve(Y);
  const Eigen::VectorXd resid = Y - X * beta;
  const double ssr = resid.squaredNorm();
  const std::size_t dof = n - p;
  const double sigma2 = ssr / static_cast<double>(dof);

  // (X'X)^-1 = P R^-1 R^-T P' from the pivoted QR.
  const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p))
                                .template triangularView<Eigen::Upper>();
  const Eigen::MatrixXd Rinv = R.template triangularView<Eigen::Upper>().solve(
      Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p)));
  const Eigen::MatrixXd perm_cov = Rinv * Rinv.transpose();
  const auto& P = qr.colsPermutation();
  const Eigen::MatrixXd xtx_inv = P * perm_cov * P.transpose();

  double sst = 0.0;
  if (has_intercept) {
    const double ybar = Y.mean();
    sst = (Y.array() - ybar).square().sum();
  } else {
    sst = Y.squaredNorm();
  }

  OlsFit fit;
  fit.observations = n;
  fit.df_residual = dof;
  fit.sigma2 = sigma2;
  fit.r_squared = sst > 0 ? 1.0 - ssr / sst : 1.0;
  const double tcrit = student_t_quantile(0.975, static_cast<double>(dof));
  for (std::size_t k = 0; k < p; ++k) {
    OlsTerm t;
    t.name = names[k];
    t.coef = beta(static_cast<Eigen::Index>(k));
    t.std_err = std::sqrt(std::max(0.0, sigma2 * xtx_inv(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k))));
    if (t.std_err > 0) {
      t.t = t.coef / t.std_err;
      t.p_value = student_t_two_sided_p(t.t, static_cast<double>(dof));
    } else {
      t.t = t.coef == 0 ? 0.0 : std::copysign(INFINITY, t.coef);
      t.p_value = t.coef == 0 ? 1.0 : 0.0;
    }
    t.ci_lower = t.coef - tcrit * t.std_err;
    t.ci_upper = t.coef + tcrit * t.std_err;
    fit.terms.push_back(std::move(t));
  }
  return fit;
}

}  // namespace mono::stats
