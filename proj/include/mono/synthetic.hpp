#pragma once

// Synthetic model ensembles with known correlation structure.
//
// Responses. Per item a shared wrong "attractor" option is drawn uniformly
// among the k - 1 wrong options, and per (company, item) a company attractor
// likewise. Model i answers correctly with probability a_i; when wrong it
// picks the global attractor with probability rho_i, its company's attractor
// with probability gamma_i, and otherwise a uniform wrong option (attractors
// included). For two models the agreement rate on jointly wrong items is
//
//   rho_1 rho_2 + s gamma_1 gamma_2 + (1 - rho_1 rho_2 - s gamma_1 gamma_2) / (k - 1)
//
// with s = 1 for a same-company pair and 0 otherwise; gamma = 0 reduces this
// to rho_1 rho_2 + (1 - rho_1 rho_2) / (k - 1).
//
// Ratings. score_i = round(clamp(true + lambda_i z + kappa_i z_c + sigma_i e_i))
// where z is shared by all models per pair, z_c by all models of one company,
// and e_i is idiosyncratic. Without rounding/clamping, residual correlation of
// i and j is (lambda_i lambda_j + s kappa_i kappa_j) / (norm_i norm_j) with
// norm^2 = lambda^2 + kappa^2 + sigma^2.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mono/dataset.hpp"
#include "mono/regression.hpp"

namespace mono::synthetic {

struct SyntheticModel {
  std::string id;
  double accuracy = 0.5;
  double rho = 0.0;             // global attractor weight
  double company_weight = 0.0;  // company attractor weight; rho + company_weight <= 1
  std::string company = "none";
  std::optional<std::string> architecture;
  std::optional<double> params_billions;
  std::optional<int> generation;
  std::optional<bool> is_moe;
  std::optional<bool> latest_model;
};

struct SyntheticEnsembleSpec {
  std::vector<SyntheticModel> models;
  std::size_t items = 1000;
  /// Fraction of items per choice count; {4: 1.0} for a constant k = 4.
  std::map<int, double> choices = {{4, 1.0}};
  std::uint64_t seed = 0;
};

/// Throws InvalidConfig on out-of-range parameters.
void validate(const SyntheticEnsembleSpec& spec);
ResponseDataset generate_responses(const SyntheticEnsembleSpec& spec);
MetadataTable ensemble_metadata(const SyntheticEnsembleSpec& spec);

double expected_conditional_agreement(double rho1, double rho2, int k);
double expected_conditional_agreement(double rho1, double gamma1, double rho2, double gamma2, bool same_company,
                                      int k);
/// Mixture over choice counts (accuracy does not depend on k, so jointly
/// wrong items inherit the item mixture).
double expected_conditional_agreement(const SyntheticModel& a, const SyntheticModel& b,
                                      const std::map<int, double>& choices);

struct SyntheticRater {
  std::string id;
  double shared_loading = 0.0;   // lambda
  double company_loading = 0.0;  // kappa
  double noise_sd = 1.0;         // sigma
  std::string company = "none";
  std::optional<bool> latest_model;
  std::optional<double> correlation_with_human_score;
};

struct LatentScoreSpec {
  double mean = 5.5;
  double resume_sd = 1.5;  // applicant quality shared across jobs
  double pair_sd = 1.0;    // resume-job specific fit
};

struct SyntheticRatingSpec {
  std::vector<SyntheticRater> models;
  std::size_t resumes = 60;
  std::size_t jobs = 30;
  std::size_t labeled_resumes = 30;  // human labels on the first resumes x jobs block
  std::size_t labeled_jobs = 15;
  LatentScoreSpec latent;
  /// Explicit latent scores (resume-major, resumes x jobs); overrides `latent`.
  std::vector<double> true_scores;
  ScoreScale scale;
  bool round = true;
  bool clamp = true;
  std::uint64_t seed = 0;
};

void validate(const SyntheticRatingSpec& spec);
RatingDataset generate_ratings(const SyntheticRatingSpec& spec);
MetadataTable rating_metadata(const SyntheticRatingSpec& spec);
double expected_residual_correlation(const SyntheticRater& a, const SyntheticRater& b);

std::string resume_id(std::size_t i);
std::string job_id(std::size_t j);

/// Twenty raters in five companies with one latest-flagged model each,
/// loadings increasing with model quality and a company-level component.
SyntheticRatingSpec company_structured_rating_spec(std::uint64_t seed);

/// Ensemble whose attractor weight rises with accuracy, plus company blending.
SyntheticEnsembleSpec accuracy_correlated_ensemble(std::size_t models, std::size_t companies, std::size_t items,
                                                   double company_weight, std::uint64_t seed);

struct PlantedPairSpec {
  std::size_t rows = 5000;
  double intercept = 0.4;
  double same_company = 0.06;
  double accuracy_1 = 0.0;
  double accuracy_2 = 0.0;
  double interaction = 0.02;
  double noise_sd = 0.05;
  double same_company_rate = 0.2;
  std::uint64_t seed = 0;
};

/// Pair table with standardized accuracies and a dependent variable built
/// from the planted coefficients plus Gaussian noise.
PairTable planted_pair_table(const PlantedPairSpec& spec);

}  // namespace mono::synthetic
