#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "mono/judge.hpp"
#include "mono/synthetic.hpp"
#include "test_util.hpp"

using namespace mono;
using mono::test::error_kind;

namespace {

synthetic::SyntheticEnsembleSpec ensemble_with_oracle() {
  auto spec = synthetic::accuracy_correlated_ensemble(6, 2, 2000, 0.4, 21);
  synthetic::SyntheticModel oracle;
  oracle.id = "oracle";
  oracle.accuracy = 1.0;
  oracle.company = "solo";
  spec.models.push_back(oracle);
  return spec;
}

}  // namespace

TEST_CASE("judging a model by itself inflates it to one") {
  const auto spec = ensemble_with_oracle();
  const auto d = synthetic::generate_responses(spec);
  const auto meta = synthetic::ensemble_metadata(spec);
  for (const auto& judge : d.model_ids()) {
    const auto rep = judge_report(d, meta, judge, Grouping::Company);
    for (const auto& row : rep.rows) {
      if (row.model_id != judge) continue;
      CHECK(row.judged_accuracy == 1.0);
      CHECK(row.inflation == 1.0 - model_accuracy(d, judge));
      CHECK(row.same_group);
    }
  }
}

TEST_CASE("a perfect judge leaves accuracy unchanged") {
  const auto spec = ensemble_with_oracle();
  const auto d = synthetic::generate_responses(spec);
  const auto meta = synthetic::ensemble_metadata(spec);
  const auto rep = judge_report(d, meta, "oracle", Grouping::Company);
  CHECK(rep.judge_accuracy == 1.0);
  for (const auto& row : rep.rows) CHECK(row.inflation == 0.0);
}

TEST_CASE("a perfect model judged by an imperfect judge loses exactly the judge's errors") {
  const auto spec = ensemble_with_oracle();
  const auto d = synthetic::generate_responses(spec);
  const auto meta = synthetic::ensemble_metadata(spec);
  for (std::size_t m = 0; m + 1 < d.model_count(); ++m) {
    const auto& judge = d.model_ids()[m];
    const auto rep = judge_report(d, meta, judge, Grouping::Company);
    const auto& row = rep.rows.back();
    REQUIRE(row.model_id == "oracle");
    CHECK(row.inflation == model_accuracy(d, judge) - 1.0);
  }
}

TEST_CASE("judge abstentions leave the denominator") {
  // key 0 0 0 0; judge abstains on item 3.
  const ResponseDataset d({"judge", "model"}, {"a", "b", "c", "d"}, {0, 1, 0, -1, 0, 1, 1, 2}, {0, 0, 0, 0},
                          {4, 4, 4, 4});
  const auto ja = judged_accuracy(d, "model", "judge");
  CHECK(ja.judge_abstentions == 1);
  CHECK(ja.graded_items == 3);
  CHECK(ja.agreements == 2);
  CHECK(ja.value == doctest::Approx(2.0 / 3.0));
  const ResponseDataset silent({"judge", "model"}, {"a"}, {-1, 0}, {0}, {2});
  CHECK(error_kind([&] { judged_accuracy(silent, "model", "judge"); }) == ErrorKind::InsufficientSupport);
  CHECK(error_kind([&] { judged_accuracy(d, "model", "ghost"); }) == ErrorKind::UnknownModel);
}

TEST_CASE("group judges and inflation summary") {
  const auto spec = ensemble_with_oracle();
  const auto d = synthetic::generate_responses(spec);
  const auto meta = synthetic::ensemble_metadata(spec);
  const auto judges = group_max_judges(d, meta, Grouping::Company);
  CHECK(judges.size() == 3);
  for (const auto& j : judges) {
    const auto* jm = meta.find(j);
    for (const auto& other : d.model_ids()) {
      if (meta.find(other)->company == jm->company) CHECK(model_accuracy(d, other) <= model_accuracy(d, j));
    }
  }
  const auto rep = judge_report(d, meta, judges.front(), Grouping::Company);
  const auto s = summarize_below_judge(rep);
  CHECK(s.same_group + s.other <= d.model_count() - 1);
  std::ostringstream out;
  write_judge_csv(out, {rep});
  CHECK(out.str().rfind("judge_id,judge_accuracy,model_id", 0) == 0);
}
