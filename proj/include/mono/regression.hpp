#pragma once

// Pair-level regressions: one row per unordered model pair, dependent variable
// a similarity metric, covariates describing both models. Numeric covariates
// are standardized over retained rows; booleans stay 0/1. The interaction
// "accuracy_1:accuracy_2" is the product of the standardized accuracies.
//
// Covariate names follow the usual regression-table layout:
//   same_company, same_architecture, is_moe_1, is_moe_2,
//   params_billions_log_1, params_billions_log_2, generation_1, generation_2,
//   param_diff, latest_model_1, latest_model_2, accuracy_1, accuracy_2
// params_billions_log uses the natural log.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "mono/correlation.hpp"
#include "mono/dataset.hpp"
#include "mono/stats.hpp"

namespace mono {

inline constexpr const char* kInteraction = "accuracy_1:accuracy_2";

struct PairTable {
  MetricKind metric{};
  std::vector<std::string> model_1;
  std::vector<std::string> model_2;
  std::vector<double> dependent;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> values;  // one vector per column

  std::size_t dropped_undefined = 0;
  std::size_t dropped_missing = 0;
  std::map<std::string, std::size_t> missing_by_covariate;

  std::size_t rows() const { return dependent.size(); }
  bool has_column(std::string_view name) const;
  const std::vector<double>& column(std::string_view name) const;
  void add_column(std::string name, std::vector<double> v);
};

struct PairTableOptions {
  MetricKind metric = MetricKind::AgreementBothWrong;
  std::uint64_t seed = 0;
  /// Covariates to include; empty selects every covariate some model has.
  std::vector<std::string> covariates;
  CorrelationMethod method = CorrelationMethod::Pearson;
  unsigned threads = 1;
};

/// Covariates available for the given models and metadata, in table order.
std::vector<std::string> available_covariates(const std::vector<std::string>& model_ids, const MetadataTable& meta,
                                              bool rating_data);

/// Throws NoUsablePairs when no pair survives; MissingCovariate drops are
/// counted in the table, not thrown.
PairTable build_pair_table(const ResponseDataset& d, const MetadataTable& meta, const PairTableOptions& opts);
PairTable build_pair_table(const RatingDataset& r, const MetadataTable& meta, const PairTableOptions& opts);

/// Default formula: every covariate column plus the accuracy interaction.
std::vector<std::string> default_terms(const PairTable& t);

/// OLS with intercept on the named terms; "a:b" multiplies two columns.
stats::OlsFit fit_pair_table(const PairTable& t, const std::vector<std::string>& terms);

struct FitReport {
  std::string title;
  std::string dependent;
  stats::OlsFit fit;
};

void write_fit_csv(std::ostream& out, const std::vector<FitReport>& reports);
void write_fit_text(std::ostream& out, const FitReport& report);
void write_pair_table_csv(std::ostream& out, const PairTable& t);

}  // namespace mono
