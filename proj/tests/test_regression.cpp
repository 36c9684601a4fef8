#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "mono/regression.hpp"
#include "mono/stats.hpp"
#include "mono/synthetic.hpp"
#include "test_util.hpp"

using namespace mono;
using mono::test::error_kind;

namespace {

synthetic::SyntheticEnsembleSpec small_spec() {
  return synthetic::accuracy_correlated_ensemble(8, 3, 3000, 0.3, 5);
}

// Same dataset with the model rows in reverse order.
ResponseDataset reversed(const ResponseDataset& d) {
  std::vector<std::string> ids(d.model_ids().rbegin(), d.model_ids().rend());
  std::vector<std::int8_t> answers;
  for (std::size_t m = d.model_count(); m-- > 0;) {
    const auto row = d.row(m);
    answers.insert(answers.end(), row.begin(), row.end());
  }
  return ResponseDataset(ids, d.item_ids(), answers, {d.answer_key().begin(), d.answer_key().end()},
                         {d.choice_counts().begin(), d.choice_counts().end()});
}

}  // namespace

TEST_CASE("pair table has one row per pair with standardized numeric covariates") {
  const auto spec = small_spec();
  const auto d = synthetic::generate_responses(spec);
  const auto meta = synthetic::ensemble_metadata(spec);
  PairTableOptions opts;
  opts.seed = 1;
  const auto t = build_pair_table(d, meta, opts);
  CHECK(t.rows() == 8 * 7 / 2);
  CHECK(t.has_column("same_company"));
  CHECK(t.has_column("accuracy_1"));
  CHECK(t.has_column(kInteraction));
  CHECK(default_terms(t) == t.columns);
  const auto& a1 = t.column("accuracy_1");
  CHECK(std::abs(stats::mean(a1)) < 1e-12);
  CHECK(stats::sample_sd(a1) == doctest::Approx(1.0));
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const bool same = meta.find(t.model_1[r])->company == meta.find(t.model_2[r])->company;
    CHECK(t.column("same_company")[r] == (same ? 1.0 : 0.0));
    CHECK(t.column(kInteraction)[r] == a1[r] * t.column("accuracy_2")[r]);
  }
  CHECK(error_kind([&] { t.column("nope"); }) == ErrorKind::MissingCovariate);
}

TEST_CASE("slot order depends on seed and ids, not on model order") {
  const auto spec = small_spec();
  const auto d = synthetic::generate_responses(spec);
  const auto meta = synthetic::ensemble_metadata(spec);
  PairTableOptions opts;
  opts.seed = 17;
  const auto a = build_pair_table(d, meta, opts);
  const auto b = build_pair_table(reversed(d), meta, opts);
  std::map<std::pair<std::string, std::string>, double> rows_a, rows_b;
  for (std::size_t r = 0; r < a.rows(); ++r) rows_a[{a.model_1[r], a.model_2[r]}] = a.dependent[r];
  for (std::size_t r = 0; r < b.rows(); ++r) rows_b[{b.model_1[r], b.model_2[r]}] = b.dependent[r];
  CHECK(rows_a == rows_b);

  opts.threads = 4;
  const auto c = build_pair_table(d, meta, opts);
  CHECK(c.model_1 == a.model_1);
  CHECK(c.dependent == a.dependent);

  // Both slot orders occur.
  std::size_t lo_first = 0;
  for (std::size_t r = 0; r < a.rows(); ++r) lo_first += a.model_1[r] < a.model_2[r];
  CHECK(lo_first > 0);
  CHECK(lo_first < a.rows());
}

TEST_CASE("missing covariates drop rows and are counted") {
  const auto spec = small_spec();
  const auto d = synthetic::generate_responses(spec);
  auto rows = synthetic::ensemble_metadata(spec).rows();
  rows[0].params_billions.reset();
  const MetadataTable meta(rows);
  PairTableOptions opts;
  opts.covariates = {"same_company", "params_billions_log_1", "params_billions_log_2", "accuracy_1", "accuracy_2"};
  const auto t = build_pair_table(d, meta, opts);
  // Model 0 sits in one slot of each of its 7 pairs.
  CHECK(t.dropped_missing == 7);
  CHECK(t.rows() == 28 - 7);
  CHECK(t.missing_by_covariate.at("params_billions_log_1") + t.missing_by_covariate.at("params_billions_log_2") == 7);
  CHECK(error_kind([&] {
          PairTableOptions o;
          o.metric = MetricKind::ResidualCorrelation;
          build_pair_table(d, meta, o);
        }) == ErrorKind::Usage);
}

TEST_CASE("planted coefficients are recovered") {
  synthetic::PlantedPairSpec spec;
  spec.seed = 11;
  const auto t = synthetic::planted_pair_table(spec);
  const auto fit = fit_pair_table(t, {"same_company", "accuracy_1", "accuracy_2", kInteraction});
  auto within = [&](const char* name, double truth) {
    const auto& term = fit.term(name);
    CHECK(std::abs(term.coef - truth) < 2 * term.std_err);
  };
  within("Intercept", 0.4);
  within("same_company", 0.06);
  within("accuracy_1", 0.0);
  within("accuracy_2", 0.0);
  within(kInteraction, 0.02);

  // A colon term not present as a column is built as a product.
  PairTable u = t;
  u.columns.pop_back();
  u.values.pop_back();
  const auto fit2 = fit_pair_table(u, {"same_company", "accuracy_1", "accuracy_2", kInteraction});
  CHECK(fit2.term(kInteraction).coef == doctest::Approx(fit.term(kInteraction).coef));

  std::ostringstream csv, text;
  write_fit_csv(csv, {{"planted", "agreement", fit}});
  write_fit_text(text, {"planted", "agreement", fit});
  CHECK(csv.str().find("same_company") != std::string::npos);
  CHECK(text.str().find("R") != std::string::npos);
}
