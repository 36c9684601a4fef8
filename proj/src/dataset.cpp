#include "mono/dataset.hpp"

#include <set>

#include "mono/error.hpp"

namespace mono {

namespace {

template <typename Ids>
std::unordered_map<std::string, std::size_t> unique_index(const Ids& ids, std::string_view what) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!index.emplace(ids[i], i).second) {
      throw Error(ErrorKind::Schema, "duplicate " + std::string(what) + " id '" + ids[i] + "'");
    }
  }
  return index;
}

}  // namespace

ResponseDataset::ResponseDataset(std::vector<std::string> model_ids, std::vector<std::string> item_ids,
                                 std::vector<std::int8_t> answers, std::vector<std::int8_t> answer_key,
                                 std::vector<std::int8_t> choice_counts)
    : model_ids_(std::move(model_ids)),
      item_ids_(std::move(item_ids)),
      answers_(std::move(answers)),
      answer_key_(std::move(answer_key)),
      choice_counts_(std::move(choice_counts)) {
  if (model_ids_.empty() || item_ids_.empty()) {
    throw Error(ErrorKind::EmptyDataset, "response dataset needs at least one model and one item");
  }
  const std::size_t q = item_ids_.size();
  if (answer_key_.size() != q || choice_counts_.size() != q || answers_.size() != model_ids_.size() * q) {
    throw Error(ErrorKind::Schema, "response dataset dimensions are inconsistent");
  }
  model_index_ = unique_index(model_ids_, "model");
  unique_index(item_ids_, "item");
  for (std::size_t i = 0; i < q; ++i) {
    if (choice_counts_[i] < 2) {
      throw Error(ErrorKind::Schema, "item '" + item_ids_[i] + "' has fewer than 2 choices");
    }
    if (answer_key_[i] < 0 || answer_key_[i] >= choice_counts_[i]) {
      throw Error(ErrorKind::Schema, "item '" + item_ids_[i] + "' answer key out of range");
    }
  }
  for (std::size_t m = 0; m < model_ids_.size(); ++m) {
    for (std::size_t i = 0; i < q; ++i) {
      const std::int8_t a = answers_[m * q + i];
      if (a != kMissingAnswer && (a < 0 || a >= choice_counts_[i])) {
        throw Error(ErrorKind::Schema, "answer " + std::to_string(a) + " for model '" + model_ids_[m] +
                                           "' item '" + item_ids_[i] + "' is outside [0, " +
                                           std::to_string(choice_counts_[i]) + ")");
      }
    }
  }
}

std::optional<std::size_t> ResponseDataset::find_model(std::string_view id) const {
  auto it = model_index_.find(std::string(id));
  if (it == model_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t ResponseDataset::model_index(std::string_view id) const {
  if (auto i = find_model(id)) return *i;
  throw Error(ErrorKind::UnknownModel, "model '" + std::string(id) + "' not in response dataset");
}

std::map<int, double> ResponseDataset::choice_count_histogram() const {
  std::map<int, std::size_t> counts;
  for (std::int8_t k : choice_counts_) ++counts[k];
  std::map<int, double> out;
  for (auto [k, n] : counts) out[k] = static_cast<double>(n) / static_cast<double>(item_count());
  return out;
}

double model_accuracy(const ResponseDataset& d, std::size_t model) {
  const auto correct = kernels::count_equal(d.row(model), d.answer_key());
  return static_cast<double>(correct) / static_cast<double>(d.item_count());
}

double model_accuracy(const ResponseDataset& d, std::string_view model) {
  return model_accuracy(d, d.model_index(model));
}

RatingDataset::RatingDataset(std::vector<std::string> model_ids, std::vector<RatingPair> pairs,
                             std::vector<double> scores, std::vector<double> human_scores, ScoreScale scale)
    : model_ids_(std::move(model_ids)),
      pairs_(std::move(pairs)),
      scores_(std::move(scores)),
      human_(std::move(human_scores)),
      scale_(scale) {
  if (model_ids_.empty() || pairs_.empty()) {
    throw Error(ErrorKind::EmptyDataset, "rating dataset needs at least one model and one pair");
  }
  if (!(scale_.lo < scale_.hi)) throw Error(ErrorKind::Schema, "invalid score scale");
  if (scores_.size() != model_ids_.size() * pairs_.size() || (!human_.empty() && human_.size() != pairs_.size())) {
    throw Error(ErrorKind::Schema, "rating dataset dimensions are inconsistent");
  }
  model_index_ = unique_index(model_ids_, "model");
  std::set<std::string> seen_resume, seen_job;
  for (std::size_t p = 0; p < pairs_.size(); ++p) {
    if (!pair_index_.emplace(pairs_[p], p).second) {
      throw Error(ErrorKind::Schema,
                  "duplicate pair (" + pairs_[p].resume_id + ", " + pairs_[p].job_id + ")");
    }
    if (seen_resume.insert(pairs_[p].resume_id).second) resumes_.push_back(pairs_[p].resume_id);
    if (seen_job.insert(pairs_[p].job_id).second) jobs_.push_back(pairs_[p].job_id);
  }
  auto check = [&](double v, const std::string& where) {
    if (!is_missing(v) && (v < scale_.lo || v > scale_.hi)) {
      throw Error(ErrorKind::Schema, "score " + std::to_string(v) + " outside [" + std::to_string(scale_.lo) +
                                         ", " + std::to_string(scale_.hi) + "] at " + where);
    }
  };
  for (std::size_t m = 0; m < model_ids_.size(); ++m) {
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
      check(scores_[m * pairs_.size() + p],
            "model '" + model_ids_[m] + "' pair (" + pairs_[p].resume_id + ", " + pairs_[p].job_id + ")");
    }
  }
  for (std::size_t p = 0; p < human_.size(); ++p) {
    check(human_[p], "human label (" + pairs_[p].resume_id + ", " + pairs_[p].job_id + ")");
  }
}

std::size_t RatingDataset::labeled_count() const {
  std::size_t n = 0;
  for (double h : human_) n += !is_missing(h);
  return n;
}

std::optional<std::size_t> RatingDataset::find_model(std::string_view id) const {
  auto it = model_index_.find(std::string(id));
  if (it == model_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t RatingDataset::model_index(std::string_view id) const {
  if (auto i = find_model(id)) return *i;
  throw Error(ErrorKind::UnknownModel, "model '" + std::string(id) + "' not in rating dataset");
}

std::optional<std::size_t> RatingDataset::find_pair(std::string_view resume, std::string_view job) const {
  auto it = pair_index_.find(RatingPair{std::string(resume), std::string(job)});
  if (it == pair_index_.end()) return std::nullopt;
  return it->second;
}

namespace {

bool same_values(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (is_missing(a[i]) != is_missing(b[i])) return false;
    if (!is_missing(a[i]) && a[i] != b[i]) return false;
  }
  return true;
}

}  // namespace

bool operator==(const RatingDataset& a, const RatingDataset& b) {
  return a.model_ids_ == b.model_ids_ && a.pairs_ == b.pairs_ && same_values(a.scores_, b.scores_) &&
         same_values(a.human_, b.human_) && a.scale_.lo == b.scale_.lo && a.scale_.hi == b.scale_.hi;
}

MetadataTable::MetadataTable(std::vector<ModelMeta> rows) : rows_(std::move(rows)) {
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& r = rows_[i];
    if (r.model_id.empty()) throw Error(ErrorKind::Schema, "metadata row with empty model_id");
    if (r.params_billions && !(*r.params_billions > 0)) {
      throw Error(ErrorKind::Schema, "params_billions must be positive for '" + r.model_id + "'");
    }
    if (r.correlation_with_human_score &&
        (*r.correlation_with_human_score < -1.0 || *r.correlation_with_human_score > 1.0)) {
      throw Error(ErrorKind::Schema, "correlation_with_human_score outside [-1, 1] for '" + r.model_id + "'");
    }
    if (!index_.emplace(r.model_id, i).second) {
      throw Error(ErrorKind::DuplicateModelId, "model_id '" + r.model_id + "' appears twice in metadata");
    }
  }
}

const ModelMeta* MetadataTable::find(std::string_view model_id) const {
  auto it = index_.find(std::string(model_id));
  return it == index_.end() ? nullptr : &rows_[it->second];
}

std::vector<std::string> MetadataTable::cross_reference(
    std::span<const std::vector<std::string>> dataset_model_ids) const {
  std::set<std::string> known;
  for (const auto& ids : dataset_model_ids) known.insert(ids.begin(), ids.end());
  std::vector<std::string> warnings;
  for (const auto& r : rows_) {
    if (!known.count(r.model_id)) {
      warnings.push_back("metadata model '" + r.model_id + "' not present in any dataset");
    }
  }
  return warnings;
}

}  // namespace mono
