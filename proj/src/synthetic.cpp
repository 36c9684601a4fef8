#include "mono/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "mono/error.hpp"
#include "mono/rng.hpp"
#include "mono/stats.hpp"

namespace mono::synthetic {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::InvalidConfig, what);
}

bool unit(double x) { return x >= 0.0 && x <= 1.0; }

std::string padded(const char* prefix, std::size_t i, int width) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, i);
  return buf;
}

// Uniform wrong option for an item with k choices and the given key.
std::int8_t wrong_option(Engine& eng, int k, int key) {
  const int w = static_cast<int>(uniform_index(eng, static_cast<std::uint64_t>(k - 1)));
  return static_cast<std::int8_t>(w >= key ? w + 1 : w);
}

}  // namespace

void validate(const SyntheticEnsembleSpec& spec) {
  require(!spec.models.empty(), "ensemble needs at least one model");
  require(spec.items >= 1, "ensemble needs at least one item");
  require(!spec.choices.empty(), "choice distribution is empty");
  double total = 0;
  for (auto [k, w] : spec.choices) {
    require(k >= 2 && k <= 127, "choice count must be in [2, 127]");
    require(w >= 0, "choice weights must be non-negative");
    total += w;
  }
  require(total > 0, "choice weights sum to zero");
  std::set<std::string> ids;
  for (const auto& m : spec.models) {
    require(!m.id.empty(), "model id is empty");
    require(ids.insert(m.id).second, "duplicate model id '" + m.id + "'");
    require(unit(m.accuracy) && unit(m.rho) && unit(m.company_weight) && m.rho + m.company_weight <= 1.0 + 1e-12,
            "model '" + m.id + "': accuracy, rho, company_weight must lie in [0,1] with rho + company_weight <= 1");
  }
}

ResponseDataset generate_responses(const SyntheticEnsembleSpec& spec) {
  validate(spec);
  const std::size_t Q = spec.items;
  double total = 0;
  for (auto [k, w] : spec.choices) total += w;

  std::vector<std::string> item_ids(Q);
  std::vector<std::int8_t> key(Q), choices(Q), attractor(Q);
  Engine items = make_engine(derive_seed(spec.seed, "items"));
  for (std::size_t q = 0; q < Q; ++q) {
    item_ids[q] = padded("q", q, 5);
    double u = uniform01(items) * total;
    int k = spec.choices.rbegin()->first;
    for (auto [kk, w] : spec.choices) {
      if (u < w) {
        k = kk;
        break;
      }
      u -= w;
    }
    choices[q] = static_cast<std::int8_t>(k);
    key[q] = static_cast<std::int8_t>(uniform_index(items, static_cast<std::uint64_t>(k)));
    attractor[q] = wrong_option(items, k, key[q]);
  }

  std::map<std::string, std::vector<std::int8_t>> company_attractor;
  for (const auto& m : spec.models) {
    if (m.company_weight <= 0 || company_attractor.count(m.company)) continue;
    Engine eng = make_engine(derive_seed(derive_seed(spec.seed, "company"), m.company));
    std::vector<std::int8_t> att(Q);
    for (std::size_t q = 0; q < Q; ++q) att[q] = wrong_option(eng, choices[q], key[q]);
    company_attractor.emplace(m.company, std::move(att));
  }

  std::vector<std::string> model_ids;
  std::vector<std::int8_t> answers(spec.models.size() * Q);
  for (std::size_t i = 0; i < spec.models.size(); ++i) {
    const auto& m = spec.models[i];
    model_ids.push_back(m.id);
    Engine eng = make_engine(derive_seed(derive_seed(spec.seed, "model"), m.id));
    const auto* comp = m.company_weight > 0 ? &company_attractor.at(m.company) : nullptr;
    for (std::size_t q = 0; q < Q; ++q) {
      std::int8_t a;
      if (uniform01(eng) < m.accuracy) {
        a = key[q];
      } else {
        const double u = uniform01(eng);
        if (u < m.rho) a = attractor[q];
        else if (comp && u < m.rho + m.company_weight) a = (*comp)[q];
        else a = wrong_option(eng, choices[q], key[q]);
      }
      answers[i * Q + q] = a;
    }
  }
  return ResponseDataset(std::move(model_ids), std::move(item_ids), std::move(answers), std::move(key),
                         std::move(choices));
}

MetadataTable ensemble_metadata(const SyntheticEnsembleSpec& spec) {
  std::vector<ModelMeta> rows;
  for (const auto& m : spec.models) {
    ModelMeta meta;
    meta.model_id = m.id;
    meta.company = m.company;
    meta.architecture = m.architecture;
    meta.params_billions = m.params_billions;
    meta.generation = m.generation;
    meta.is_moe = m.is_moe;
    meta.latest_model = m.latest_model;
    rows.push_back(std::move(meta));
  }
  return MetadataTable(std::move(rows));
}

double expected_conditional_agreement(double rho1, double rho2, int k) {
  return expected_conditional_agreement(rho1, 0.0, rho2, 0.0, false, k);
}

double expected_conditional_agreement(double rho1, double gamma1, double rho2, double gamma2, bool same_company,
                                      int k) {
  if (k < 2) throw Error(ErrorKind::InvalidConfig, "k must be at least 2");
  const double shared = rho1 * rho2 + (same_company ? gamma1 * gamma2 : 0.0);
  return shared + (1.0 - shared) / static_cast<double>(k - 1);
}

double expected_conditional_agreement(const SyntheticModel& a, const SyntheticModel& b,
                                      const std::map<int, double>& choices) {
  double total = 0, acc = 0;
  const bool same = a.company == b.company;
  for (auto [k, w] : choices) {
    acc += w * expected_conditional_agreement(a.rho, a.company_weight, b.rho, b.company_weight, same, k);
    total += w;
  }
  return acc / total;
}

std::string resume_id(std::size_t i) { return padded("r", i, 3); }
std::string job_id(std::size_t j) { return padded("j", j, 3); }

void validate(const SyntheticRatingSpec& spec) {
  require(!spec.models.empty(), "rating spec needs at least one model");
  require(spec.resumes >= 1 && spec.jobs >= 1, "rating spec needs resumes and jobs");
  require(spec.labeled_resumes <= spec.resumes && spec.labeled_jobs <= spec.jobs,
          "labeled block exceeds the resume/job grid");
  require(spec.scale.lo < spec.scale.hi, "invalid score scale");
  require(spec.true_scores.empty() || spec.true_scores.size() == spec.resumes * spec.jobs,
          "true_scores must have resumes x jobs entries");
  std::set<std::string> ids;
  for (const auto& m : spec.models) {
    require(!m.id.empty(), "model id is empty");
    require(ids.insert(m.id).second, "duplicate model id '" + m.id + "'");
    require(m.shared_loading >= 0 && m.company_loading >= 0 && m.noise_sd >= 0,
            "model '" + m.id + "': loadings and noise must be non-negative");
  }
}

RatingDataset generate_ratings(const SyntheticRatingSpec& spec) {
  validate(spec);
  const std::size_t R = spec.resumes, J = spec.jobs, P = R * J;
  auto finish = [&](double v) {
    if (spec.round) v = std::round(v);
    if (spec.clamp) v = std::clamp(v, spec.scale.lo, spec.scale.hi);
    return v;
  };

  std::vector<double> truth(P);
  if (!spec.true_scores.empty()) {
    truth = spec.true_scores;
  } else {
    Engine resumes = make_engine(derive_seed(spec.seed, "resume-quality"));
    Engine fit = make_engine(derive_seed(spec.seed, "pair-fit"));
    std::vector<double> quality(R);
    for (auto& q : quality) q = standard_normal(resumes);
    for (std::size_t r = 0; r < R; ++r) {
      for (std::size_t j = 0; j < J; ++j) {
        truth[r * J + j] = spec.latent.mean + spec.latent.resume_sd * quality[r] + spec.latent.pair_sd * standard_normal(fit);
      }
    }
  }

  Engine shared = make_engine(derive_seed(spec.seed, "shared"));
  std::vector<double> z(P);
  for (auto& v : z) v = standard_normal(shared);
  std::map<std::string, std::vector<double>> company_z;
  for (const auto& m : spec.models) {
    if (m.company_loading <= 0 || company_z.count(m.company)) continue;
    Engine eng = make_engine(derive_seed(derive_seed(spec.seed, "company"), m.company));
    std::vector<double> zc(P);
    for (auto& v : zc) v = standard_normal(eng);
    company_z.emplace(m.company, std::move(zc));
  }

  std::vector<RatingPair> pairs;
  pairs.reserve(P);
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t j = 0; j < J; ++j) pairs.push_back({resume_id(r), job_id(j)});

  std::vector<std::string> ids;
  std::vector<double> scores(spec.models.size() * P);
  for (std::size_t i = 0; i < spec.models.size(); ++i) {
    const auto& m = spec.models[i];
    ids.push_back(m.id);
    Engine eng = make_engine(derive_seed(derive_seed(spec.seed, "model"), m.id));
    const auto* zc = m.company_loading > 0 ? &company_z.at(m.company) : nullptr;
    for (std::size_t p = 0; p < P; ++p) {
      double v = truth[p] + m.shared_loading * z[p] + m.noise_sd * standard_normal(eng);
      if (zc) v += m.company_loading * (*zc)[p];
      scores[i * P + p] = finish(v);
    }
  }

  std::vector<double> human;
  if (spec.labeled_resumes > 0 && spec.labeled_jobs > 0) {
    human.assign(P, kMissingScore);
    for (std::size_t r = 0; r < spec.labeled_resumes; ++r)
      for (std::size_t j = 0; j < spec.labeled_jobs; ++j) human[r * J + j] = finish(truth[r * J + j]);
  }
  ScoreScale scale = spec.scale;
  if (!spec.clamp) {
    // Unclamped analytic fixtures may leave the nominal scale.
    double lo = scale.lo, hi = scale.hi;
    for (double v : scores) lo = std::min(lo, v), hi = std::max(hi, v);
    for (double v : human)
      if (!is_missing(v)) lo = std::min(lo, v), hi = std::max(hi, v);
    scale = {std::floor(lo), std::ceil(hi)};
  }
  return RatingDataset(std::move(ids), std::move(pairs), std::move(scores), std::move(human), scale);
}

MetadataTable rating_metadata(const SyntheticRatingSpec& spec) {
  std::vector<ModelMeta> rows;
  for (const auto& m : spec.models) {
    ModelMeta meta;
    meta.model_id = m.id;
    meta.company = m.company;
    meta.latest_model = m.latest_model;
    meta.correlation_with_human_score = m.correlation_with_human_score;
    rows.push_back(std::move(meta));
  }
  return MetadataTable(std::move(rows));
}

double expected_residual_correlation(const SyntheticRater& a, const SyntheticRater& b) {
  const double same = a.company == b.company ? a.company_loading * b.company_loading : 0.0;
  const double na = std::sqrt(a.shared_loading * a.shared_loading + a.company_loading * a.company_loading +
                              a.noise_sd * a.noise_sd);
  const double nb = std::sqrt(b.shared_loading * b.shared_loading + b.company_loading * b.company_loading +
                              b.noise_sd * b.noise_sd);
  if (na == 0 || nb == 0) throw Error(ErrorKind::ZeroVariance, "rater without residual variance");
  return (a.shared_loading * b.shared_loading + same) / (na * nb);
}

SyntheticRatingSpec company_structured_rating_spec(std::uint64_t seed) {
  struct Row {
    const char* id;
    const char* company;
    double quality;
    bool latest;
  };
  // Same company / quality / latest-flag layout as the 20-model resume study.
  static const Row rows[] = {
      {"Nova-Pro", "Nova", 0.73, true},
      {"Nova-Micro", "Nova", 0.64, false},
      {"Nova-Lite", "Nova", 0.55, false},
      {"Mistral-Large", "Mistral", 0.69, true},
      {"Mistral-Large(24.02)", "Mistral", 0.66, false},
      {"Mistral-8x7b", "Mistral", 0.54, false},
      {"Mistral-7B-Instruct", "Mistral", 0.46, false},
      {"Llama3-1-405b", "Llama", 0.67, false},
      {"Llama3-3-70b", "Llama", 0.67, true},
      {"Llama3-2-90b", "Llama", 0.64, false},
      {"Llama3-1-70b", "Llama", 0.63, false},
      {"Llama3-2-11b", "Llama", 0.46, false},
      {"Llama3-1-8b", "Llama", 0.46, false},
      {"Llama3-70b", "Llama", 0.40, false},
      {"Gpt-o1-mini", "Gpt", 0.70, false},
      {"Gpt-4o-mini", "Gpt", 0.68, true},
      {"Gpt-3.5-turbo", "Gpt", 0.30, false},
      {"Claude_3.5_Sonnet(20241022)", "Claude", 0.71, true},
      {"Claude_3.5_Haiku(20241022)", "Claude", 0.66, false},
      {"Claude_3_Haiku(20240307)", "Claude", 0.34, false},
  };
  SyntheticRatingSpec spec;
  spec.seed = seed;
  for (const auto& r : rows) {
    SyntheticRater m;
    m.id = r.id;
    m.company = r.company;
    m.latest_model = r.latest;
    m.correlation_with_human_score = r.quality;
    // Better models lean more on the shared component and carry less private noise.
    m.shared_loading = 0.6 + 0.8 * r.quality;
    m.company_loading = 0.6;
    m.noise_sd = 2.2 - 2.0 * r.quality;
    spec.models.push_back(std::move(m));
  }
  return spec;
}

SyntheticEnsembleSpec accuracy_correlated_ensemble(std::size_t models, std::size_t companies, std::size_t items,
                                                   double company_weight, std::uint64_t seed) {
  SyntheticEnsembleSpec spec;
  spec.items = items;
  spec.seed = seed;
  companies = std::max<std::size_t>(companies, 1);
  for (std::size_t i = 0; i < models; ++i) {
    const double t = models > 1 ? static_cast<double>(i) / static_cast<double>(models - 1) : 0.5;
    SyntheticModel m;
    m.id = padded("model-", i, 3);
    m.accuracy = 0.4 + 0.5 * t;
    m.rho = 0.1 + 0.5 * t;
    m.company_weight = std::min(company_weight, 1.0 - m.rho);
    m.company = padded("company-", i % companies, 2);
    m.architecture = padded("arch-", i % (companies + 1), 2);
    m.params_billions = std::exp(std::log(1.0) + t * std::log(70.0));
    m.generation = 1 + static_cast<int>(i % 3);
    m.is_moe = (i % 4) == 0;
    spec.models.push_back(std::move(m));
  }
  return spec;
}

PairTable planted_pair_table(const PlantedPairSpec& spec) {
  if (spec.rows < 3) throw Error(ErrorKind::InvalidConfig, "planted table needs at least 3 rows");
  Engine eng = make_engine(derive_seed(spec.seed, "planted-pairs"));
  std::vector<double> sc(spec.rows), a1(spec.rows), a2(spec.rows);
  for (std::size_t r = 0; r < spec.rows; ++r) {
    sc[r] = uniform01(eng) < spec.same_company_rate ? 1.0 : 0.0;
    a1[r] = standard_normal(eng);
    a2[r] = standard_normal(eng);
  }
  a1 = stats::standardize(a1);
  a2 = stats::standardize(a2);
  PairTable t;
  t.metric = MetricKind::AgreementBothWrong;
  std::vector<double> inter(spec.rows);
  for (std::size_t r = 0; r < spec.rows; ++r) {
    inter[r] = a1[r] * a2[r];
    t.model_1.push_back(padded("p", 2 * r, 6));
    t.model_2.push_back(padded("p", 2 * r + 1, 6));
    t.dependent.push_back(spec.intercept + spec.same_company * sc[r] + spec.accuracy_1 * a1[r] +
                          spec.accuracy_2 * a2[r] + spec.interaction * inter[r] + spec.noise_sd * standard_normal(eng));
  }
  t.add_column("same_company", std::move(sc));
  t.add_column("accuracy_1", std::move(a1));
  t.add_column("accuracy_2", std::move(a2));
  t.add_column(kInteraction, std::move(inter));
  return t;
}

}  // namespace mono::synthetic
