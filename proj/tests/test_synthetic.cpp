#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mono/correlation.hpp"
#include "mono/synthetic.hpp"
#include "test_util.hpp"

using namespace mono;
using namespace mono::synthetic;
using mono::test::error_kind;

namespace {

synthetic::SyntheticModel model(std::string id, double accuracy, double rho = 0.0, double company_weight = 0.0,
                                std::string company = "none") {
  synthetic::SyntheticModel m;
  m.id = std::move(id);
  m.accuracy = accuracy;
  m.rho = rho;
  m.company_weight = company_weight;
  m.company = std::move(company);
  return m;
}

SyntheticRater rater(std::string id, double shared, double company_loading, double noise, std::string company) {
  SyntheticRater r;
  r.id = std::move(id);
  r.shared_loading = shared;
  r.company_loading = company_loading;
  r.noise_sd = noise;
  r.company = std::move(company);
  return r;
}

}  // namespace

TEST_CASE("closed forms reduce correctly") {
  CHECK(expected_conditional_agreement(0.0, 0.0, 4) == doctest::Approx(1.0 / 3.0));
  CHECK(expected_conditional_agreement(1.0, 1.0, 4) == 1.0);
  CHECK(expected_conditional_agreement(0.5, 0.4, 2) == 1.0);
  CHECK(expected_conditional_agreement(0.2, 0.0, 0.3, 0.0, true, 5) ==
        doctest::Approx(expected_conditional_agreement(0.2, 0.3, 5)));
  CHECK(expected_conditional_agreement(0.2, 0.5, 0.3, 0.5, true, 5) ==
        doctest::Approx(0.06 + 0.25 + (1 - 0.06 - 0.25) / 4));
  SyntheticModel a, b;
  a.rho = 0.3;
  b.rho = 0.5;
  const std::map<int, double> mix{{4, 0.5}, {10, 0.5}};
  CHECK(expected_conditional_agreement(a, b, mix) ==
        doctest::Approx(0.5 * expected_conditional_agreement(0.3, 0.5, 4) +
                        0.5 * expected_conditional_agreement(0.3, 0.5, 10)));
}

TEST_CASE("generated agreement matches the closed form") {
  SyntheticEnsembleSpec spec;
  spec.items = 14042;
  spec.seed = 8;
  spec.choices = {{5, 1.0}};
  spec.models = {model("a", 0.5, 0.6, 0.0, "x"), model("b", 0.6, 0.3, 0.2, "x"), model("c", 0.4, 0.0, 0.5, "x"),
                 model("d", 0.55, 0.2, 0.4, "y")};
  const auto d = generate_responses(spec);
  for (std::size_t i = 0; i < spec.models.size(); ++i) {
    CHECK(model_accuracy(d, i) == doctest::Approx(spec.models[i].accuracy).epsilon(0.04));
    for (std::size_t j = i + 1; j < spec.models.size(); ++j) {
      const auto& a = spec.models[i];
      const auto& b = spec.models[j];
      const double expect = expected_conditional_agreement(a, b, spec.choices);
      const double got = agreement_both_wrong(d, a.id, b.id).value;
      CHECK(std::abs(got - expect) < 0.03);
    }
  }
}

TEST_CASE("generation is deterministic in the seed") {
  auto spec = accuracy_correlated_ensemble(5, 2, 500, 0.3, 4);
  CHECK(generate_responses(spec) == generate_responses(spec));
  auto other = spec;
  other.seed = 5;
  CHECK_FALSE(generate_responses(other) == generate_responses(spec));
  const auto meta = ensemble_metadata(spec);
  CHECK(meta.rows().size() == 5);
}

TEST_CASE("choice mixture reaches the requested proportions") {
  SyntheticEnsembleSpec spec;
  spec.items = 20000;
  spec.choices = {{10, 0.93}, {4, 0.07}};
  spec.models = {model("a", 0.5)};
  const auto d = generate_responses(spec);
  const auto hist = d.choice_count_histogram();
  CHECK(hist.at(10) == doctest::Approx(0.93).epsilon(0.01));
  CHECK(random_error_baseline(d) == doctest::Approx(0.127).epsilon(0.04));
}

TEST_CASE("spec validation") {
  SyntheticEnsembleSpec spec;
  spec.models = {model("a", 0.5, 0.7, 0.5)};
  CHECK(error_kind([&] { validate(spec); }) == ErrorKind::InvalidConfig);
  spec.models = {model("a", 1.5)};
  CHECK(error_kind([&] { validate(spec); }) == ErrorKind::InvalidConfig);
  spec.models = {model("a", 0.5), model("a", 0.6)};
  CHECK(error_kind([&] { validate(spec); }) == ErrorKind::InvalidConfig);
  spec.models = {model("a", 0.5)};
  spec.choices = {{1, 1.0}};
  CHECK(error_kind([&] { validate(spec); }) == ErrorKind::InvalidConfig);
}

TEST_CASE("unrounded ratings reproduce the residual correlation closed form") {
  SyntheticRatingSpec spec;
  spec.resumes = 200;
  spec.jobs = 40;
  spec.labeled_resumes = 200;
  spec.labeled_jobs = 40;
  spec.round = false;
  spec.clamp = false;
  spec.scale = {-1000, 1000};
  spec.seed = 3;
  spec.models = {rater("p", 1.0, 0.5, 1.0, "A"), rater("q", 0.8, 0.7, 0.6, "A"), rater("r", 0.5, 0.9, 1.2, "B")};
  const auto r = generate_ratings(spec);
  CHECK(r.pair_count() == 8000);
  CHECK(r.labeled_count() == 8000);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      const auto& a = spec.models[i];
      const auto& b = spec.models[j];
      CHECK(residual_correlation(r, a.id, b.id).value ==
            doctest::Approx(expected_residual_correlation(a, b)).epsilon(0.05));
    }
  }
  CHECK(expected_residual_correlation(spec.models[0], spec.models[2]) ==
        doctest::Approx(0.5 / std::sqrt(2.25 * 2.5)));
}

TEST_CASE("company structured rating spec") {
  const auto spec = company_structured_rating_spec(7);
  CHECK(spec.models.size() == 20);
  const auto r = generate_ratings(spec);
  CHECK(r.model_count() == 20);
  CHECK(r.pair_count() == spec.resumes * spec.jobs);
  CHECK(r.labeled_count() == spec.labeled_resumes * spec.labeled_jobs);
  for (std::size_t m = 0; m < r.model_count(); ++m) {
    for (double s : r.row(m)) {
      CHECK(s >= 1.0);
      CHECK(s <= 10.0);
      CHECK(s == std::round(s));
    }
  }
  const auto meta = rating_metadata(spec);
  std::size_t latest = 0;
  for (const auto& row : meta.rows()) latest += row.latest_model.value_or(false);
  CHECK(latest == 5);
  CHECK(resume_id(3) != resume_id(4));
}
