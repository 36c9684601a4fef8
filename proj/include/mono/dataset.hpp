#pragma once

// In-memory datasets shared by every analysis module. Instances validate on
// construction and are immutable afterwards, so they can be shared read-only
// across worker threads.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mono/kernels.hpp"

namespace mono {

inline constexpr std::int8_t kMissingAnswer = kernels::kMissingAnswer;
inline constexpr double kMissingScore = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

/// Multiple-choice answers for M models over Q items.
class ResponseDataset {
 public:
  ResponseDataset() = default;

  /// `answers` is row-major M x Q. Throws Schema / EmptyDataset on invalid input.
  ResponseDataset(std::vector<std::string> model_ids, std::vector<std::string> item_ids,
                  std::vector<std::int8_t> answers, std::vector<std::int8_t> answer_key,
                  std::vector<std::int8_t> choice_counts);

  std::size_t model_count() const { return model_ids_.size(); }
  std::size_t item_count() const { return item_ids_.size(); }

  const std::vector<std::string>& model_ids() const { return model_ids_; }
  const std::vector<std::string>& item_ids() const { return item_ids_; }
  std::span<const std::int8_t> answer_key() const { return answer_key_; }
  std::span<const std::int8_t> choice_counts() const { return choice_counts_; }

  std::span<const std::int8_t> row(std::size_t model) const {
    return std::span(answers_).subspan(model * item_count(), item_count());
  }
  std::int8_t answer(std::size_t model, std::size_t item) const {
    return answers_[model * item_count() + item];
  }

  /// Throws UnknownModel.
  std::size_t model_index(std::string_view id) const;
  std::optional<std::size_t> find_model(std::string_view id) const;

  /// Fraction of items with k choices, keyed by k.
  std::map<int, double> choice_count_histogram() const;

  friend bool operator==(const ResponseDataset& a, const ResponseDataset& b) {
    return a.model_ids_ == b.model_ids_ && a.item_ids_ == b.item_ids_ && a.answers_ == b.answers_ &&
           a.answer_key_ == b.answer_key_ && a.choice_counts_ == b.choice_counts_;
  }

 private:
  std::vector<std::string> model_ids_;
  std::vector<std::string> item_ids_;
  std::vector<std::int8_t> answers_;
  std::vector<std::int8_t> answer_key_;
  std::vector<std::int8_t> choice_counts_;
  std::unordered_map<std::string, std::size_t> model_index_;
};

/// Fraction of items answered correctly; missing answers count as wrong.
double model_accuracy(const ResponseDataset& d, std::string_view model);
double model_accuracy(const ResponseDataset& d, std::size_t model);

struct RatingPair {
  std::string resume_id;
  std::string job_id;
  friend auto operator<=>(const RatingPair&, const RatingPair&) = default;
};

struct ScoreScale {
  double lo = 1.0;
  double hi = 10.0;
};

/// Numeric fit scores for M models over P (resume, job) pairs, plus optional
/// human labels on a subset. Missing values are NaN.
class RatingDataset {
 public:
  RatingDataset() = default;

  /// `scores` is row-major M x P; `human_scores` is either empty or length P.
  RatingDataset(std::vector<std::string> model_ids, std::vector<RatingPair> pairs,
                std::vector<double> scores, std::vector<double> human_scores, ScoreScale scale = {});

  std::size_t model_count() const { return model_ids_.size(); }
  std::size_t pair_count() const { return pairs_.size(); }
  const std::vector<std::string>& model_ids() const { return model_ids_; }
  const std::vector<RatingPair>& pairs() const { return pairs_; }
  const ScoreScale& scale() const { return scale_; }

  std::span<const double> row(std::size_t model) const {
    return std::span(scores_).subspan(model * pair_count(), pair_count());
  }
  double score(std::size_t model, std::size_t pair) const { return scores_[model * pair_count() + pair]; }

  bool has_human_labels() const { return !human_.empty(); }
  std::span<const double> human_scores() const { return human_; }
  double human(std::size_t pair) const { return human_.empty() ? kMissingScore : human_[pair]; }
  std::size_t labeled_count() const;

  std::size_t model_index(std::string_view id) const;
  std::optional<std::size_t> find_model(std::string_view id) const;
  std::optional<std::size_t> find_pair(std::string_view resume, std::string_view job) const;

  /// Distinct resume / job ids in first-appearance order.
  const std::vector<std::string>& resume_ids() const { return resumes_; }
  const std::vector<std::string>& job_ids() const { return jobs_; }

  friend bool operator==(const RatingDataset& a, const RatingDataset& b);

 private:
  std::vector<std::string> model_ids_;
  std::vector<RatingPair> pairs_;
  std::vector<double> scores_;
  std::vector<double> human_;
  ScoreScale scale_;
  std::unordered_map<std::string, std::size_t> model_index_;
  std::map<RatingPair, std::size_t> pair_index_;
  std::vector<std::string> resumes_;
  std::vector<std::string> jobs_;
};

struct ModelMeta {
  std::string model_id;
  std::string company;
  std::optional<std::string> architecture;
  std::optional<double> params_billions;
  std::optional<int> generation;
  std::optional<bool> is_moe;
  std::optional<bool> latest_model;
  std::optional<double> correlation_with_human_score;

  friend bool operator==(const ModelMeta&, const ModelMeta&) = default;
};

class MetadataTable {
 public:
  MetadataTable() = default;
  /// Throws DuplicateModelId / Schema.
  explicit MetadataTable(std::vector<ModelMeta> rows);

  const std::vector<ModelMeta>& rows() const { return rows_; }
  const ModelMeta* find(std::string_view model_id) const;
  bool empty() const { return rows_.empty(); }

  /// Warnings for metadata rows naming models absent from every given id list.
  std::vector<std::string> cross_reference(std::span<const std::vector<std::string>> dataset_model_ids) const;

 private:
  std::vector<ModelMeta> rows_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace mono
