// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mono/cli.hpp"
#include "mono/correlation.hpp"
#include "mono/judge.hpp"
#include "mono/market.hpp"
#include "mono/regression.hpp"
#include "mono/rng.hpp"
#include "mono/stats.hpp"
#include "mono/synthetic.hpp"
#include "oracles.hpp"

using namespace mono;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

synthetic::SyntheticModel model(std::string id, double accuracy, double rho) {
  synthetic::SyntheticModel m;
  m.id = std::move(id);
  m.accuracy = accuracy;
  m.rho = rho;
  return m;
}

// ---------------------------------------------------------------------------

Verdict random_error_baseline_mean() {
  Verdict v;
  const auto t0 = Clock::now();
  synthetic::SyntheticEnsembleSpec spec;
  spec.items = 14042;
  spec.seed = 1;
  for (int i = 0; i < 10; ++i) spec.models.push_back(model("m" + std::to_string(i), 0.5 + 0.04 * i, 0.0));
  const auto d = synthetic::generate_responses(spec);
  const auto m = agreement_matrix(d, MetricKind::AgreementBothWrong, 1);
  const auto s = summarize(m);
  const double dt = seconds_since(t0);
  v.require(s.defined_pairs == 45, "not all pairs defined");
  v.require(s.mean >= 0.323 && s.mean <= 0.343, fmt("mean %.4f outside [0.323, 0.343]", s.mean));
  v.require(dt < 10.0, fmt("took %.2f s", dt));
  v.detail = v.pass ? fmt("mean both-wrong agreement %.4f in %.2f s", s.mean, dt) : v.detail;
  return v;
}

Verdict closed_form_agreement() {
  Verdict v;
  Engine eng = make_engine(2);
  double worst = 0;
  for (int t = 0; t < 20; ++t) {
    const double r1 = uniform01(eng), r2 = uniform01(eng);
    const int k = 2 + static_cast<int>(uniform_index(eng, 9));
    synthetic::SyntheticEnsembleSpec spec;
    spec.items = 14042;
    spec.choices = {{k, 1.0}};
    spec.seed = derive_seed(100, static_cast<std::uint64_t>(t));
    spec.models = {model("a", 0.3, r1), model("b", 0.3, r2)};
    const auto d = synthetic::generate_responses(spec);
    const double got = agreement_both_wrong(d, "a", "b").value;
    const double expect = r1 * r2 + (1 - r1 * r2) / (k - 1);
    worst = std::max(worst, std::abs(got - expect));
    v.require(std::abs(got - expect) <= 0.02,
              fmt("rho=(%.3f, %.3f) k=%.0f: |%.4f - expected| too large", r1, r2, k, got));
  }
  if (v.pass) v.detail = fmt("20 triples, max deviation %.4f", worst);
  return v;
}

Verdict mixed_k_baseline() {
  Verdict v;
  const double two = random_error_baseline(std::map<int, double>{{2, 1.0}});
  v.require(two == 1.0, fmt("k=2 baseline %.17g", two));
  // 100 items: 93 with ten choices and 7 with four.
  std::vector<std::string> items;
  std::vector<std::int8_t> answers, key, choices;
  for (int i = 0; i < 100; ++i) {
    items.push_back("q" + std::to_string(i));
    answers.push_back(0);
    key.push_back(0);
    choices.push_back(i < 93 ? 10 : 4);
  }
  const ResponseDataset d({"m"}, items, answers, key, choices);
  const double mix = random_error_baseline(d);
  v.require(std::abs(mix - 0.127) <= 0.005, fmt("mixture baseline %.4f", mix));
  if (v.pass) v.detail = fmt("k=2 gives %.1f exactly; 93%% k=10 / 7%% k=4 gives %.4f", two, mix);
  return v;
}

Verdict ols_oracle() {
  Verdict v;
  Engine eng = make_engine(4);
  double worst = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t p = 1 + uniform_index(eng, 13);
    const std::size_t n = p + 2 + uniform_index(eng, 500 - p - 1);
    std::vector<double> x(n * p), y(n);
    std::vector<std::string> names;
    for (std::size_t j = 0; j < p; ++j) names.push_back("x" + std::to_string(j));
    for (std::size_t i = 0; i < n; ++i) {
      x[i * p] = 1.0;
      for (std::size_t j = 1; j < p; ++j) x[i * p + j] = standard_normal(eng) + 0.3 * j;
      y[i] = standard_normal(eng);
      for (std::size_t j = 1; j < p; ++j) y[i] += 0.2 * (static_cast<double>(j % 3) - 1.0) * x[i * p + j];
    }
    const auto fit = stats::ols(x, n, p, y, names, true);
    const auto ref = oracle::ols(x, n, p, y, true);
    auto diff = [&](double a, double b) {
      worst = std::max(worst, std::abs(a - b));
      return std::abs(a - b) <= 1e-6;
    };
    bool ok = true;
    for (std::size_t j = 0; j < p; ++j) {
      ok &= diff(fit.terms[j].coef, ref.coef[j]);
      ok &= diff(fit.terms[j].std_err, ref.se[j]);
      ok &= diff(fit.terms[j].t, ref.t[j]);
      ok &= diff(fit.terms[j].p_value, ref.p[j]);
    }
    if (p > 1) ok &= diff(fit.r_squared, ref.r_squared);
    v.require(ok, fmt("design %.0f (n=%.0f, p=%.0f) mismatch", rep, n, p));
  }
  std::vector<double> x, y;
  for (int i = 0; i < 200; ++i) {
    const double a = std::cos(i * 0.37), b = i * 0.01;
    x.insert(x.end(), {1.0, a, b});
    y.push_back(0.25 + 2 * a - 3 * b);
  }
  const auto exact = stats::ols(x, 200, 3, y, {"Intercept", "a", "b"}, true);
  v.require(std::abs(exact.r_squared - 1.0) <= 1e-10, fmt("exact-linear R^2 = %.17g", exact.r_squared));
  if (v.pass) v.detail = fmt("50 designs, max |diff| %.2e; exact-linear 1 - R^2 = %.1e", worst, 1 - exact.r_squared);
  return v;
}

Verdict regression_recovery() {
  Verdict v;
  synthetic::PlantedPairSpec spec;
  spec.rows = 5000;
  spec.seed = 5;
  const auto t = synthetic::planted_pair_table(spec);
  const auto fit = fit_pair_table(t, {"same_company", "accuracy_1", "accuracy_2", kInteraction});
  const std::vector<std::pair<std::string, double>> truth = {
      {"Intercept", spec.intercept}, {"same_company", spec.same_company}, {kInteraction, spec.interaction}};
  std::string d;
  for (const auto& [name, value] : truth) {
    const auto& term = fit.term(name);
    const double z = (term.coef - value) / term.std_err;
    v.require(std::abs(z) <= 2.0, name + fmt(" off by %.2f se", z));
    d += name + fmt("=%.4f (%.2f se) ", term.coef, z);
  }
  if (v.pass) v.detail = d;
  return v;
}

Verdict judge_identities() {
  Verdict v;
  auto spec = synthetic::accuracy_correlated_ensemble(10, 3, 3000, 0.4, 6);
  synthetic::SyntheticModel perfect = model("perfect", 1.0, 0.0);
  perfect.company = "solo";
  spec.models.push_back(perfect);
  const auto d = synthetic::generate_responses(spec);
  const auto meta = synthetic::ensemble_metadata(spec);
  std::size_t checks = 0;
  for (const auto& judge : d.model_ids()) {
    const auto rep = judge_report(d, meta, judge, Grouping::Company);
    const double acc = model_accuracy(d, judge);
    for (const auto& row : rep.rows) {
      if (row.model_id == judge) {
        v.require(row.inflation == 1.0 - acc, "self inflation of " + judge);
        ++checks;
      }
      if (judge == "perfect") {
        v.require(row.inflation == 0.0, "perfect judge moved " + row.model_id);
        ++checks;
      }
      if (row.model_id == "perfect" && judge != "perfect") {
        v.require(row.inflation == acc - 1.0, "perfect model under " + judge);
        ++checks;
      }
    }
  }
  if (v.pass) v.detail = std::to_string(checks) + " exact identities";
  return v;
}

// ---------------------------------------------------------------------------
// Markets

market::MatchingInstance random_instance(Engine& eng) {
  const std::size_t A = 1 + uniform_index(eng, 6), F = 1 + uniform_index(eng, 6);
  market::MatchingInstance inst;
  inst.applicants = A;
  inst.firms = F;
  inst.capacity = 1 + uniform_index(eng, 2);
  auto perm = [&](std::size_t n) {
    std::vector<std::uint32_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<std::uint32_t>(i);
    shuffle(std::span(p), eng);
    return p;
  };
  inst.firm_rank.assign(F, std::vector<std::uint32_t>(A));
  for (std::size_t f = 0; f < F; ++f) {
    const auto order = perm(A);
    for (std::size_t r = 0; r < A; ++r) inst.firm_rank[f][order[r]] = static_cast<std::uint32_t>(r);
  }
  inst.applied.assign(A, std::vector<bool>(F));
  for (std::size_t a = 0; a < A; ++a) {
    inst.applicant_order.push_back(perm(F));
    for (std::size_t f = 0; f < F; ++f) inst.applied[a][f] = uniform01(eng) < 0.75;
  }
  return inst;
}

Verdict stable_matching() {
  Verdict v;
  Engine eng = make_engine(7);
  std::size_t mismatches = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const auto inst = random_instance(eng);
    std::vector<std::vector<int>> prefs(inst.applicants);
    for (std::size_t a = 0; a < inst.applicants; ++a)
      for (auto f : inst.applicant_order[a])
        if (inst.applied[a][f]) prefs[a].push_back(static_cast<int>(f));
    std::vector<std::vector<int>> rank(inst.firms, std::vector<int>(inst.applicants));
    for (std::size_t f = 0; f < inst.firms; ++f)
      for (std::size_t a = 0; a < inst.applicants; ++a) rank[f][a] = static_cast<int>(inst.firm_rank[f][a]);
    const auto expect = oracle::brute_force_applicant_optimal(prefs, rank, static_cast<int>(inst.capacity));
    const auto got = market::deferred_acceptance(inst);
    if (std::vector<int>(got.match.begin(), got.match.end()) != expect) ++mismatches;
  }
  v.require(mismatches == 0, std::to_string(mismatches) + " of 1000 small markets differ from enumeration");

  const auto rspec = synthetic::company_structured_rating_spec(7);
  const auto r = synthetic::generate_ratings(rspec);
  market::MarketInputs in;
  in.ratings = &r;
  market::MarketConfig cfg;
  cfg.method = market::PreferenceMethod::RandomLLMs;
  cfg.budget = market::BudgetRule::Uniform1ToF;
  cfg.seed = 8;
  std::size_t blocking = 0, infeasible = 0, markets = 0, size_ok = 0;
  for (std::size_t i = 0; i < 1500; ++i) {
    const auto det = market::simulate_replicate(cfg, in, i);
    blocking += market::blocking_pairs(det.instance, det.outcome).size();
    infeasible += market::feasibility_violations(det.instance, det.outcome).size();
    size_ok += det.instance.applicants == 60 && det.instance.firms == 30;
    ++markets;
  }
  v.require(size_ok == markets, "replicates are not 60 x 30");
  v.require(blocking == 0, std::to_string(blocking) + " blocking pairs");
  v.require(infeasible == 0, std::to_string(infeasible) + " feasibility violations");
  if (v.pass) v.detail = "1000 small markets match enumeration; 0 blocking pairs in 1500 markets of 60 x 30";
  return v;
}

Verdict exclusion_baselines() {
  Verdict v;
  const auto t0 = Clock::now();
  market::MarketConfig one;
  one.firms = 1;
  one.applicant_count = 60;
  one.interview_fraction = 0.25;
  one.replicates = 1500;
  one.run_matching = false;
  const auto single = market::run_ensemble(one, {}, 4);
  v.require(single.exclusion.mean == 0.75 && single.exclusion.se == 0.0,
            fmt("single firm exclusion %.17g", single.exclusion.mean));

  double worst = 0;
  for (std::size_t n = 1; n <= 20; ++n) {
    market::MarketConfig cfg;
    cfg.firms = n;
    cfg.replicates = 1500;
    cfg.seed = 100 + n;
    cfg.run_matching = false;
    const auto res = market::run_ensemble(cfg, {}, 4);
    const double dev = std::abs(res.exclusion.mean - std::pow(0.75, static_cast<double>(n)));
    worst = std::max(worst, dev);
    v.require(dev < 0.01, fmt("uniform n=%.0f mean %.4f", n, res.exclusion.mean));
  }

  // Continuous scores make every firm's order tie-free.
  auto rspec = synthetic::company_structured_rating_spec(9);
  rspec.round = false;
  const auto r = synthetic::generate_ratings(rspec);
  market::MarketInputs in;
  in.ratings = &r;
  market::MarketConfig same;
  same.method = market::PreferenceMethod::SameLLM;
  same.firms = 20;
  same.replicates = 1500;
  same.run_matching = false;
  const auto sres = market::run_ensemble(same, in, 4);
  for (std::size_t n = 1; n <= 20; ++n) {
    v.require(sres.exclusion_by_firms[n - 1].mean == 0.75,
              fmt("same-model n=%.0f exclusion %.17g", n, sres.exclusion_by_firms[n - 1].mean));
  }
  const double dt = seconds_since(t0);
  v.require(dt < 60.0, fmt("took %.1f s", dt));
  if (v.pass) v.detail = fmt("single firm 0.75; uniform max |mean - 0.75^n| %.4f; same-model 0.75 for n=1..20; %.2f s", worst, dt);
  return v;
}

struct MarketRuns {
  std::map<market::PreferenceMethod, market::MarketEnsembleResult> by_method;
};

MarketRuns run_methods(market::BudgetRule budget) {
  static const RatingDataset r = synthetic::generate_ratings(synthetic::company_structured_rating_spec(7));
  static const MetadataTable meta = synthetic::rating_metadata(synthetic::company_structured_rating_spec(7));
  market::MarketInputs in;
  in.ratings = &r;
  in.meta = &meta;
  MarketRuns out;
  for (auto m : {market::PreferenceMethod::SameLLM, market::PreferenceMethod::RandomLLMs,
                 market::PreferenceMethod::UniformlyRandom}) {
    market::MarketConfig cfg;
    cfg.method = m;
    cfg.firms = 30;
    cfg.replicates = 1500;
    cfg.budget = budget;
    cfg.seed = 2025;
    out.by_method[m] = market::run_ensemble(cfg, in, 4);
  }
  return out;
}

Verdict monoculture_ordering() {
  Verdict v;
  using market::PreferenceMethod;
  const auto runs = run_methods(market::BudgetRule::AllFirms);
  const auto& same = runs.by_method.at(PreferenceMethod::SameLLM);
  const auto& rnd = runs.by_method.at(PreferenceMethod::RandomLLMs);
  const auto& uni = runs.by_method.at(PreferenceMethod::UniformlyRandom);
  auto gap = [](const market::Estimate& lo, const market::Estimate& hi) {
    return (hi.mean - lo.mean) / std::sqrt(lo.se * lo.se + hi.se * hi.se);
  };
  const double r1 = gap(same.avg_rank, rnd.avg_rank), r2 = gap(rnd.avg_rank, uni.avg_rank);
  const double e1 = gap(rnd.exclusion, same.exclusion), e2 = gap(uni.exclusion, rnd.exclusion);
  v.require(r1 > 3 && r2 > 3, fmt("avg rank gaps %.1f, %.1f se", r1, r2));
  v.require(e1 > 3 && e2 > 3, fmt("exclusion gaps %.1f, %.1f se", e1, e2));
  v.detail = fmt("avg rank %.2f < %.2f < %.2f", same.avg_rank.mean, rnd.avg_rank.mean, uni.avg_rank.mean) +
             fmt(" (gaps %.0f, %.0f se); ", r1, r2) +
             fmt("exclusion %.3f > %.3f > %.4f", same.exclusion.mean, rnd.exclusion.mean, uni.exclusion.mean) +
             fmt(" (gaps %.0f, %.0f se)", e1, e2) + (v.pass ? "" : "; " + v.detail);
  return v;
}

Verdict differential_access() {
  Verdict v;
  using market::PreferenceMethod;
  const auto runs = run_methods(market::BudgetRule::Uniform1ToF);
  const auto& same = runs.by_method.at(PreferenceMethod::SameLLM).by_budget;
  const auto& uni = runs.by_method.at(PreferenceMethod::UniformlyRandom).by_budget;
  if (same.size() != 30 || uni.size() != 30 || !same[0].p_relative || !uni[0].p_relative) {
    v.require(false, "relative match probability undefined");
    return v;
  }
  v.require(*same[0].p_relative == 1.0 && *uni[0].p_relative == 1.0, "P_rel(1) != 1");
  const double u30 = uni[29].p_relative.value_or(NAN), s30 = same[29].p_relative.value_or(NAN);
  v.require(u30 >= 5 && u30 <= 9, fmt("uniform P_rel(30) = %.2f +- %.2f outside [5, 9]", u30, uni[29].p_relative_se));
  v.require(s30 >= 1.3 && s30 <= 3, fmt("same-model P_rel(30) = %.2f +- %.2f outside [1.3, 3]", s30, same[29].p_relative_se));
  for (std::size_t t = 0; t < 30; ++t) {
    if (!uni[t].p_relative || !same[t].p_relative) continue;
    const double se = std::sqrt(uni[t].p_relative_se * uni[t].p_relative_se +
                                same[t].p_relative_se * same[t].p_relative_se);
    v.require(*uni[t].p_relative - *same[t].p_relative >= -3 * se, fmt("uniform below same-model at t=%.0f", t + 1));
  }
  if (v.pass) v.detail = fmt("P_rel(30): uniform %.2f, same-model %.2f", u30, s30);
  return v;
}

Verdict determinism() {
  Verdict v;
  const fs::path root = fs::temp_directory_path() / "mono_acceptance";
  fs::remove_all(root);
  auto cli = [&](std::vector<std::string> args, const fs::path& out, const std::string& threads) {
    args.insert(args.end(), {"--threads", threads, "--out", out.string()});
    std::ostringstream o, e;
    const int code = cli::run(args, o, e);
    if (code != 0) v.require(false, args[0] + " failed: " + e.str());
    return code;
  };
  cli({"synth", "--preset", "accuracy_correlated", "--seed", "3"}, root / "resp", "1");
  cli({"synth", "--preset", "company_ratings", "--seed", "7"}, root / "rat", "1");
  const std::string resp = (root / "resp/responses.csv").string(), key = (root / "resp/key.csv").string(),
                    meta = (root / "resp/metadata.csv").string(), rat = (root / "rat/ratings.csv").string(),
                    hum = (root / "rat/human.csv").string(), rmeta = (root / "rat/metadata.csv").string();
  const std::vector<std::vector<std::string>> commands = {
      {"synth", "--preset", "independent", "--seed", "11"},
      {"correlate", "--responses", resp, "--key", key, "--metric", "both_wrong", "--metric", "overall", "--metric",
       "either_wrong"},
      {"correlate", "--ratings", rat, "--human", hum, "--metric", "residual", "--metric", "score"},
      {"regress", "--responses", resp, "--key", key, "--metadata", meta},
      {"regress", "--ratings", rat, "--human", hum, "--metadata", rmeta, "--metric", "residual"},
      {"judge", "--responses", resp, "--key", key, "--metadata", meta},
      {"market", "--ratings", rat, "--human", hum, "--metadata", rmeta, "--method", "same", "--method", "company",
       "--method", "latest", "--method", "random", "--method", "uniform", "--replicates", "200", "--budget",
       "uniform_1_to_F", "--llm-sweep", "5", "--seed", "12"},
  };
  std::size_t compared = 0;
  for (std::size_t c = 0; c < commands.size(); ++c) {
    std::map<std::string, std::string> reference;
    int run_index = 0;
    for (const std::string threads : {"1", "1", "4", "7"}) {
      const fs::path out = root / ("run" + std::to_string(c) + "_" + std::to_string(run_index++));
      if (cli(commands[c], out, threads) != 0) break;
      std::map<std::string, std::string> files;
      for (const auto& e : fs::directory_iterator(out)) {
        if (e.path().extension() != ".csv" && e.path().filename() != "manifest.json") continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        files[e.path().filename().string()] = s.str();
      }
      if (reference.empty()) {
        reference = files;
      } else {
        v.require(files == reference, commands[c][0] + " output differs with --threads " + threads);
        compared += files.size();
      }
    }
  }
  fs::remove_all(root);
  if (v.pass) v.detail = std::to_string(compared) + " files byte-identical across reruns and --threads 1/4/7";
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"random-error baseline on an independent ensemble", random_error_baseline_mean},
      {"closed-form conditional agreement", closed_form_agreement},
      {"mixed choice-count baseline", mixed_k_baseline},
      {"OLS against normal equations", ols_oracle},
      {"planted regression coefficients recovered", regression_recovery},
      {"judge identities", judge_identities},
      {"stable matching", stable_matching},
      {"exclusion baselines", exclusion_baselines},
      {"monoculture ordering", monoculture_ordering},
      {"differential access", differential_access},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    failed += !v.pass;
    std::printf("%s %2zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
