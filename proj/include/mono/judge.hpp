#pragma once

// LLM-as-judge: grade every model against a judge model's answers instead of
// the answer key and report how far that moves each model's accuracy.

#include <iosfwd>
#include <string>
#include <vector>

#include "mono/dataset.hpp"

namespace mono {

enum class Grouping { Company, Architecture };

struct JudgedAccuracy {
  double value = 0.0;
  std::int64_t agreements = 0;
  std::int64_t graded_items = 0;      // items the judge answered
  std::int64_t judge_abstentions = 0;  // items excluded from the denominator
};

/// Fraction of judge-answered items where the model matches the judge.
/// Throws UnknownModel; throws InsufficientSupport if the judge answered nothing.
JudgedAccuracy judged_accuracy(const ResponseDataset& d, std::string_view model, std::string_view judge);

struct JudgeRow {
  std::string model_id;
  double true_accuracy = 0.0;
  double judged_accuracy = 0.0;
  double inflation = 0.0;
  bool same_group = false;
};

struct JudgeReport {
  std::string judge_id;
  double judge_accuracy = 0.0;
  Grouping grouping = Grouping::Company;
  std::int64_t judge_abstentions = 0;
  std::vector<JudgeRow> rows;  // dataset model order, judge included
};

JudgeReport judge_report(const ResponseDataset& d, const MetadataTable& meta, std::string_view judge,
                         Grouping grouping);

/// The most accurate model of each group (ties broken by id), in group order.
std::vector<std::string> group_max_judges(const ResponseDataset& d, const MetadataTable& meta, Grouping grouping);

struct InflationSummary {
  double mean_same_group = 0.0;
  double mean_other = 0.0;
  std::size_t same_group = 0;
  std::size_t other = 0;
};

/// Mean inflation over non-judge models with true accuracy below the judge's.
InflationSummary summarize_below_judge(const JudgeReport& r);

void write_judge_csv(std::ostream& out, const std::vector<JudgeReport>& reports);

}  // namespace mono
