#pragma once

// Pairwise similarity between models: agreement rates (overall, conditional
// on errors), residual correlation against human labels, analytic random
// baselines, and accuracy-sorted all-pairs matrices.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mono/dataset.hpp"

namespace mono {

enum class MetricKind {
  AgreementOverall,
  AgreementBothWrong,
  AgreementEitherWrong,
  ResidualCorrelation,
  // Pearson correlation of raw scores over all co-rated pairs.
  ScoreCorrelation,
};

std::string_view to_string(MetricKind kind);
/// Accepts the canonical names and the short CLI forms (overall, both_wrong, ...).
std::optional<MetricKind> metric_kind_from_string(std::string_view s);
bool is_agreement(MetricKind kind);

enum class CorrelationMethod { Pearson, Spearman };

struct PairMetric {
  std::string model_a;
  std::string model_b;
  MetricKind kind{};
  double value = 0.0;
  std::int64_t support = 0;
};

PairMetric agreement_overall(const ResponseDataset& d, std::string_view m1, std::string_view m2);
/// Throws NoJointErrors when no item has both models wrong.
PairMetric agreement_both_wrong(const ResponseDataset& d, std::string_view m1, std::string_view m2);
/// Throws NoErrors when neither model is ever wrong.
PairMetric agreement_either_wrong(const ResponseDataset& d, std::string_view m1, std::string_view m2);

/// Index-based variant returning nullopt for an undefined conditional metric.
std::optional<PairMetric> try_agreement(const ResponseDataset& d, MetricKind kind, std::size_t i, std::size_t j);

/// Chance agreement of two uniformly random wrong answers: sum_k p_k / (k - 1).
double random_error_baseline(const ResponseDataset& d);
double random_error_baseline(const std::map<int, double>& choice_fractions);

/// Correlation of (score - human) residuals over the labeled pairs both
/// models rated. Throws InsufficientSupport (< 2 pairs) or ZeroVariance.
PairMetric residual_correlation(const RatingDataset& r, std::string_view m1, std::string_view m2,
                                CorrelationMethod method = CorrelationMethod::Pearson);
PairMetric score_correlation(const RatingDataset& r, std::string_view m1, std::string_view m2,
                             CorrelationMethod method = CorrelationMethod::Pearson);
std::optional<PairMetric> try_rating_metric(const RatingDataset& r, MetricKind kind, std::size_t i, std::size_t j,
                                            CorrelationMethod method = CorrelationMethod::Pearson);

/// Correlation of each model's scores with the human labels (accuracy analog
/// for rating data); nullopt when undefined.
std::optional<double> human_agreement(const RatingDataset& r, std::size_t model);

/// Pearson correlation over indices where both are present.
/// Throws InsufficientSupport / ZeroVariance.
double pearson(std::span<const double> x, std::span<const double> y, std::int64_t* support = nullptr);
double spearman(std::span<const double> x, std::span<const double> y, std::int64_t* support = nullptr);

struct AgreementMatrix {
  MetricKind kind{};
  std::vector<std::string> models;  // ascending by sort_key, ties by id
  std::vector<double> sort_key;     // accuracy (or human agreement for ratings)
  std::vector<std::optional<double>> cells;  // row-major, symmetric

  std::size_t size() const { return models.size(); }
  const std::optional<double>& at(std::size_t i, std::size_t j) const { return cells[i * size() + j]; }
};

AgreementMatrix agreement_matrix(const ResponseDataset& d, MetricKind kind, unsigned threads = 1);
AgreementMatrix rating_matrix(const RatingDataset& r, MetricKind kind,
                              CorrelationMethod method = CorrelationMethod::Pearson, unsigned threads = 1);

struct MatrixSummary {
  std::size_t defined_pairs = 0;
  std::size_t undefined_pairs = 0;
  double mean = 0.0;
  // Fractions among defined off-diagonal pairs; undefined pairs are excluded.
  double fraction_above_baseline = 0.0;
  double fraction_within_band = 0.0;
};

MatrixSummary summarize(const AgreementMatrix& m, std::optional<double> baseline = std::nullopt,
                        double band = 0.03);

/// Header row and first column carry model ids; undefined cells are blank.
void write_matrix_csv(std::ostream& out, const AgreementMatrix& m);

}  // namespace mono
