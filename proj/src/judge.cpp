#include "mono/judge.hpp"

#include <map>
#include <optional>
#include <ostream>

#include "mono/csv.hpp"
#include "mono/error.hpp"

namespace mono {

JudgedAccuracy judged_accuracy(const ResponseDataset& d, std::string_view model, std::string_view judge) {
  const auto m = d.model_index(model);
  const auto j = d.model_index(judge);
  const auto judge_row = d.row(j);
  JudgedAccuracy out;
  // Same counts as agreement_overall: agreements need both answers present.
  out.agreements = kernels::pair_counts(d.row(m), judge_row, d.answer_key()).agree();
  out.judge_abstentions = kernels::count_value(judge_row, kMissingAnswer);
  out.graded_items = static_cast<std::int64_t>(d.item_count()) - out.judge_abstentions;
  if (out.graded_items == 0) {
    throw Error(ErrorKind::InsufficientSupport, "judge '" + std::string(judge) + "' answered no items");
  }
  out.value = static_cast<double>(out.agreements) / static_cast<double>(out.graded_items);
  return out;
}

namespace {

std::optional<std::string> group_of(const MetadataTable& meta, const std::string& id, Grouping g) {
  const auto* m = meta.find(id);
  if (!m) return std::nullopt;
  if (g == Grouping::Company) {
    if (m->company.empty()) return std::nullopt;
    return m->company;
  }
  return m->architecture;
}

}  // namespace

JudgeReport judge_report(const ResponseDataset& d, const MetadataTable& meta, std::string_view judge,
                         Grouping grouping) {
  JudgeReport rep;
  const auto j = d.model_index(judge);
  rep.judge_id = d.model_ids()[j];
  rep.judge_accuracy = model_accuracy(d, j);
  rep.grouping = grouping;
  const auto judge_group = group_of(meta, rep.judge_id, grouping);
  for (std::size_t m = 0; m < d.model_count(); ++m) {
    const auto& id = d.model_ids()[m];
    const auto ja = judged_accuracy(d, id, rep.judge_id);
    rep.judge_abstentions = ja.judge_abstentions;
    JudgeRow row;
    row.model_id = id;
    row.true_accuracy = model_accuracy(d, m);
    row.judged_accuracy = ja.value;
    row.inflation = row.judged_accuracy - row.true_accuracy;
    const auto g = group_of(meta, id, grouping);
    row.same_group = judge_group && g && *g == *judge_group;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

std::vector<std::string> group_max_judges(const ResponseDataset& d, const MetadataTable& meta, Grouping grouping) {
  std::map<std::string, std::pair<double, std::string>> best;
  for (std::size_t m = 0; m < d.model_count(); ++m) {
    const auto& id = d.model_ids()[m];
    const auto g = group_of(meta, id, grouping);
    if (!g) continue;
    const double acc = model_accuracy(d, m);
    auto it = best.find(*g);
    if (it == best.end() || acc > it->second.first || (acc == it->second.first && id < it->second.second)) {
      best[*g] = {acc, id};
    }
  }
  std::vector<std::string> out;
  for (const auto& [g, v] : best) out.push_back(v.second);
  return out;
}

InflationSummary summarize_below_judge(const JudgeReport& r) {
  InflationSummary s;
  double same = 0, other = 0;
  for (const auto& row : r.rows) {
    if (row.model_id == r.judge_id || row.true_accuracy >= r.judge_accuracy) continue;
    if (row.same_group) {
      same += row.inflation;
      ++s.same_group;
    } else {
      other += row.inflation;
      ++s.other;
    }
  }
  if (s.same_group) s.mean_same_group = same / static_cast<double>(s.same_group);
  if (s.other) s.mean_other = other / static_cast<double>(s.other);
  return s;
}

void write_judge_csv(std::ostream& out, const std::vector<JudgeReport>& reports) {
  csv::Writer w(out);
  w.row({"judge_id", "judge_accuracy", "model_id", "true_accuracy", "judged_accuracy", "inflation", "same_group",
         "judge_abstentions"});
  for (const auto& rep : reports) {
    for (const auto& row : rep.rows) {
      w.field(rep.judge_id).field(rep.judge_accuracy).field(row.model_id).field(row.true_accuracy);
      w.field(row.judged_accuracy).field(row.inflation).field(row.same_group ? "True" : "False");
      w.field(static_cast<long long>(rep.judge_abstentions));
      w.end_row();
    }
  }
}

}  // namespace mono
