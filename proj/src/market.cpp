#include "mono/market.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>

#include "mono/csv.hpp"
#include "mono/error.hpp"
#include "mono/parallel.hpp"

namespace mono::market {

std::string_view to_string(PreferenceMethod m) {
  switch (m) {
    case PreferenceMethod::SameLLM: return "SameLLM";
    case PreferenceMethod::SameCompanyLLM: return "SameCompanyLLM";
    case PreferenceMethod::LatestLLM: return "LatestLLM";
    case PreferenceMethod::RandomLLMs: return "RandomLLMs";
    case PreferenceMethod::UniformlyRandom: return "UniformlyRandom";
    case PreferenceMethod::FixedModels: return "FixedModels";
  }
  return "?";
}

std::optional<PreferenceMethod> preference_method_from_string(std::string_view s) {
  std::string v;
  for (char c : s) {
    if (c == '_' || c == '-' || c == ' ') continue;
    v.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (v == "samellm" || v == "same") return PreferenceMethod::SameLLM;
  if (v == "samecompanyllm" || v == "samecompany" || v == "company") return PreferenceMethod::SameCompanyLLM;
  if (v == "latestllm" || v == "latest") return PreferenceMethod::LatestLLM;
  if (v == "randomllms" || v == "randomllm" || v == "random") return PreferenceMethod::RandomLLMs;
  if (v == "uniformlyrandom" || v == "uniform") return PreferenceMethod::UniformlyRandom;
  if (v == "fixedmodels" || v == "fixed") return PreferenceMethod::FixedModels;
  return std::nullopt;
}

std::string_view to_string(ApplicantPreferenceSource s) {
  return s == ApplicantPreferenceSource::UniformRandom ? "uniform_random" : "rating_file";
}

std::string_view to_string(BudgetRule b) { return b == BudgetRule::AllFirms ? "all_firms" : "uniform_1_to_F"; }

std::string_view to_string(FirmPool p) { return p == FirmPool::AllApplicants ? "all" : "interviewed"; }

ApplicantScores read_applicant_scores(std::istream& in, const std::string& source) {
  const csv::Table t = csv::read(in, source);
  const auto c_resume = t.column("resume_id");
  const auto c_firm = t.column("firm");
  const auto c_score = t.column("score");
  if (!c_resume || !c_firm || !c_score) {
    throw Error(ErrorKind::Schema, source + ": expected columns resume_id,firm,score");
  }
  struct Cell {
    std::size_t applicant;
    std::size_t firm;
    double score;
    std::size_t line;
  };
  ApplicantScores out;
  std::map<std::string, std::size_t> index;
  std::vector<Cell> cells;
  for (const auto& row : t.rows) {
    const auto where = source + ":" + std::to_string(row.line);
    if (row.fields.size() != t.header.size()) throw Error(ErrorKind::Parse, where + ": wrong number of fields");
    const std::string resume(csv::trim(row.fields[*c_resume]));
    const auto firm = csv::parse_int(row.fields[*c_firm]);
    const auto score = csv::parse_double(row.fields[*c_score]);
    if (resume.empty()) throw Error(ErrorKind::Schema, where + ": empty resume_id");
    if (!firm || *firm < 0) throw Error(ErrorKind::Schema, where + ": firm must be a non-negative integer");
    if (!score) throw Error(ErrorKind::Schema, where + ": score is not a number");
    auto [it, inserted] = index.emplace(resume, out.applicants.size());
    if (inserted) out.applicants.push_back(resume);
    cells.push_back({it->second, static_cast<std::size_t>(*firm), *score, row.line});
    out.firms = std::max(out.firms, static_cast<std::size_t>(*firm) + 1);
  }
  out.scores.assign(out.applicants.size() * out.firms, kMissingScore);
  for (const auto& c : cells) {
    double& slot = out.scores[c.applicant * out.firms + c.firm];
    if (!is_missing(slot)) {
      throw Error(ErrorKind::Schema, source + ":" + std::to_string(c.line) + ": duplicate score for '" +
                                         out.applicants[c.applicant] + "', firm " + std::to_string(c.firm));
    }
    slot = c.score;
  }
  return out;
}

ApplicantScores load_applicant_scores(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  return read_applicant_scores(in, path);
}

void validate(const MarketConfig& cfg) {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::InvalidConfig, m); };
  if (cfg.firms < 1) fail("firms must be >= 1");
  if (!(cfg.interview_fraction > 0.0 && cfg.interview_fraction < 1.0)) fail("interview fraction must lie in (0, 1)");
  if (cfg.capacity < 1) fail("capacity must be >= 1");
  if (cfg.replicates < 1) fail("replicates must be >= 1");
  if (cfg.applicants.empty() && cfg.applicant_count < 1) fail("applicant count must be >= 1");
  if (cfg.method == PreferenceMethod::FixedModels && cfg.fixed_models.empty()) {
    fail("FixedModels requires at least one model");
  }
  std::set<std::string> seen;
  for (const auto& a : cfg.applicants) {
    if (!seen.insert(a).second) fail("duplicate applicant '" + a + "'");
  }
}

namespace {

// Resolved inputs shared by all replicates of one configuration.
struct Context {
  const MarketConfig* cfg = nullptr;
  const RatingDataset* ratings = nullptr;
  const ApplicantScores* applicant_scores = nullptr;
  std::vector<std::string> applicants;
  std::vector<std::string> jobs;
  std::vector<std::size_t> pool;                    // model indices eligible for random draws
  std::vector<std::vector<std::size_t>> companies;  // pool indices grouped by company
  std::vector<std::size_t> latest;
  std::vector<std::size_t> fixed;
  // pair_index[j * |A| + a]: rating pair for (applicant a, job j)
  std::vector<std::size_t> pair_index;
  std::vector<std::size_t> applicant_score_row;
  bool labeled = false;
  int bucket_lo = 0;
  int bucket_hi = -1;
};

bool uses_models(PreferenceMethod m) { return m != PreferenceMethod::UniformlyRandom; }

std::size_t model_of(const RatingDataset& r, const std::string& id) {
  const auto m = r.find_model(id);
  if (!m) throw Error(ErrorKind::MissingRatings, "no ratings for model '" + id + "'");
  return *m;
}

Context prepare(const MarketConfig& cfg, const MarketInputs& in) {
  validate(cfg);
  Context ctx;
  ctx.cfg = &cfg;
  ctx.ratings = in.ratings;
  ctx.applicant_scores = in.applicant_scores;
  ctx.applicants = resolve_applicants(cfg, in);
  ctx.jobs = resolve_jobs(cfg, in);
  if (ctx.jobs.empty()) throw Error(ErrorKind::InvalidConfig, "empty job pool");

  if (uses_models(cfg.method)) {
    if (in.ratings == nullptr) {
      throw Error(ErrorKind::MissingRatings, std::string(to_string(cfg.method)) + " requires rating data");
    }
    const RatingDataset& r = *in.ratings;
    if (cfg.model_pool.empty()) {
      ctx.pool.resize(r.model_count());
      std::iota(ctx.pool.begin(), ctx.pool.end(), std::size_t{0});
    } else {
      for (const auto& id : cfg.model_pool) ctx.pool.push_back(model_of(r, id));
    }
    if (ctx.pool.empty()) throw Error(ErrorKind::MissingRatings, "empty model pool");

    std::vector<std::size_t> drawable;
    switch (cfg.method) {
      case PreferenceMethod::SameCompanyLLM: {
        if (in.meta == nullptr) throw Error(ErrorKind::InvalidConfig, "SameCompanyLLM requires model metadata");
        std::map<std::string, std::vector<std::size_t>> by_company;
        for (auto m : ctx.pool) {
          const ModelMeta* meta = in.meta->find(r.model_ids()[m]);
          if (meta == nullptr) {
            throw Error(ErrorKind::InvalidConfig, "no metadata for model '" + r.model_ids()[m] + "'");
          }
          by_company[meta->company].push_back(m);
        }
        for (auto& [_, models] : by_company) ctx.companies.push_back(std::move(models));
        drawable = ctx.pool;
        break;
      }
      case PreferenceMethod::LatestLLM:
        if (in.meta != nullptr) {
          for (auto m : ctx.pool) {
            const ModelMeta* meta = in.meta->find(r.model_ids()[m]);
            if (meta != nullptr && meta->latest_model.value_or(false)) ctx.latest.push_back(m);
          }
        }
        if (ctx.latest.empty()) throw Error(ErrorKind::NoLatestModels, "no model in the pool is flagged latest");
        drawable = ctx.latest;
        break;
      case PreferenceMethod::FixedModels:
        for (const auto& id : cfg.fixed_models) ctx.fixed.push_back(model_of(r, id));
        drawable = ctx.fixed;
        break;
      default:
        drawable = ctx.pool;
    }

    const std::size_t na = ctx.applicants.size();
    ctx.pair_index.resize(ctx.jobs.size() * na);
    for (std::size_t j = 0; j < ctx.jobs.size(); ++j) {
      for (std::size_t a = 0; a < na; ++a) {
        const auto p = r.find_pair(ctx.applicants[a], ctx.jobs[j]);
        if (!p) {
          throw Error(ErrorKind::MissingRatings,
                      "no ratings for resume '" + ctx.applicants[a] + "' and job '" + ctx.jobs[j] + "'");
        }
        for (auto m : drawable) {
          if (is_missing(r.score(m, *p))) {
            throw Error(ErrorKind::MissingRatings, "model '" + r.model_ids()[m] + "' has no score for resume '" +
                                                       ctx.applicants[a] + "' and job '" + ctx.jobs[j] + "'");
          }
        }
        ctx.pair_index[j * na + a] = *p;
      }
    }
  }

  if (in.ratings != nullptr && in.ratings->has_human_labels()) {
    ctx.labeled = true;
    ctx.bucket_lo = static_cast<int>(std::floor(in.ratings->scale().lo));
    ctx.bucket_hi = static_cast<int>(std::floor(in.ratings->scale().hi));
    if (ctx.pair_index.empty()) {
      // Bucket lookups still need the pair table under UniformlyRandom.
      const std::size_t na = ctx.applicants.size();
      ctx.pair_index.assign(ctx.jobs.size() * na, static_cast<std::size_t>(-1));
      for (std::size_t j = 0; j < ctx.jobs.size(); ++j) {
        for (std::size_t a = 0; a < na; ++a) {
          if (auto p = in.ratings->find_pair(ctx.applicants[a], ctx.jobs[j])) ctx.pair_index[j * na + a] = *p;
        }
      }
    }
  }

  if (cfg.applicant_preferences == ApplicantPreferenceSource::RatingFile) {
    if (in.applicant_scores == nullptr) {
      throw Error(ErrorKind::InvalidConfig, "rating_file applicant preferences require an applicant score file");
    }
    const ApplicantScores& s = *in.applicant_scores;
    if (s.firms < cfg.firms) {
      throw Error(ErrorKind::MissingRatings, "applicant scores cover " + std::to_string(s.firms) +
                                                 " firms, market has " + std::to_string(cfg.firms));
    }
    std::map<std::string_view, std::size_t> row;
    for (std::size_t i = 0; i < s.applicants.size(); ++i) row.emplace(s.applicants[i], i);
    for (const auto& a : ctx.applicants) {
      const auto it = row.find(a);
      if (it == row.end()) throw Error(ErrorKind::MissingRatings, "no applicant scores for '" + a + "'");
      for (std::size_t f = 0; f < cfg.firms; ++f) {
        if (is_missing(s.score(it->second, f))) {
          throw Error(ErrorKind::MissingRatings,
                      "no applicant score for '" + a + "' and firm " + std::to_string(f));
        }
      }
      ctx.applicant_score_row.push_back(it->second);
    }
  }
  return ctx;
}

template <typename T>
const T& pick(const std::vector<T>& v, Engine& eng) {
  return v[uniform_index(eng, v.size())];
}

FirmPreferences firm_preferences(const Context& ctx, std::size_t job, Engine& model_rng, Engine& tiebreak_rng) {
  const MarketConfig& cfg = *ctx.cfg;
  const std::size_t na = ctx.applicants.size();
  std::vector<std::optional<std::size_t>> models(cfg.firms);
  switch (cfg.method) {
    case PreferenceMethod::SameLLM: {
      const std::size_t m = pick(ctx.pool, model_rng);
      for (auto& fm : models) fm = m;
      break;
    }
    case PreferenceMethod::SameCompanyLLM: {
      const auto& company = pick(ctx.companies, model_rng);
      for (auto& fm : models) fm = pick(company, model_rng);
      break;
    }
    case PreferenceMethod::LatestLLM:
      for (auto& fm : models) fm = pick(ctx.latest, model_rng);
      break;
    case PreferenceMethod::RandomLLMs:
      for (auto& fm : models) fm = pick(ctx.pool, model_rng);
      break;
    case PreferenceMethod::FixedModels:
      for (std::size_t f = 0; f < cfg.firms; ++f) models[f] = ctx.fixed[f % ctx.fixed.size()];
      break;
    case PreferenceMethod::UniformlyRandom:
      break;
  }

  FirmPreferences prefs;
  prefs.firms.resize(cfg.firms);
  std::vector<double> key(na);
  std::vector<double> score(na, 0.0);
  for (std::size_t f = 0; f < cfg.firms; ++f) {
    for (std::size_t a = 0; a < na; ++a) key[a] = uniform01(tiebreak_rng);
    FirmOrder& fo = prefs.firms[f];
    if (models[f]) {
      fo.model_id = ctx.ratings->model_ids()[*models[f]];
      for (std::size_t a = 0; a < na; ++a) score[a] = ctx.ratings->score(*models[f], ctx.pair_index[job * na + a]);
    } else {
      std::fill(score.begin(), score.end(), 0.0);
    }
    fo.order.resize(na);
    std::iota(fo.order.begin(), fo.order.end(), std::uint32_t{0});
    std::sort(fo.order.begin(), fo.order.end(), [&](std::uint32_t x, std::uint32_t y) {
      if (score[x] != score[y]) return score[x] > score[y];
      if (key[x] != key[y]) return key[x] > key[y];
      return x < y;
    });
  }
  return prefs;
}

Estimate estimate(const std::vector<double>& values) {
  Estimate e;
  e.n = values.size();
  if (e.n == 0) return e;
  double sum = 0.0;
  for (double v : values) sum += v;
  e.mean = sum / static_cast<double>(e.n);
  if (e.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - e.mean) * (v - e.mean);
    e.se = std::sqrt(ss / static_cast<double>(e.n - 1) / static_cast<double>(e.n));
  }
  return e;
}

struct ReplicateSummary {
  double exclusion = 0.0;
  std::vector<double> prefix;
  std::optional<double> avg_rank;
  double match_rate = 0.0;
  std::vector<std::size_t> bucket_matched, bucket_total;
  std::vector<std::size_t> budget_matched, budget_total;
};

ReplicateDetail simulate(const Context& ctx, std::size_t index) {
  const MarketConfig& cfg = *ctx.cfg;
  const std::uint64_t rs = derive_seed(cfg.seed, static_cast<std::uint64_t>(index));
  Engine job_rng = make_engine(derive_seed(rs, "job"));
  Engine model_rng = make_engine(derive_seed(rs, "firm-models"));
  Engine tiebreak_rng = make_engine(derive_seed(rs, "tiebreak"));
  Engine pref_rng = make_engine(derive_seed(rs, "applicant-prefs"));
  Engine budget_rng = make_engine(derive_seed(rs, "budgets"));

  ReplicateDetail d;
  const std::size_t job = uniform_index(job_rng, ctx.jobs.size());
  d.job_index = job;
  d.job = ctx.jobs[job];
  d.applicants = ctx.applicants;
  d.prefs = firm_preferences(ctx, job, model_rng, tiebreak_rng);
  d.interviews = interview_sets(d.prefs, cfg.interview_fraction);
  const std::size_t na = ctx.applicants.size();
  d.exclusion = systemic_exclusion_rate(d.interviews, na);
  d.exclusion_prefix = exclusion_by_firm_prefix(d.interviews, na);

  if (cfg.verify) {
    for (std::size_t n = 1; n < d.exclusion_prefix.size(); ++n) {
      if (d.exclusion_prefix[n] > d.exclusion_prefix[n - 1]) {
        throw Error(ErrorKind::Replicate, "exclusion increased when adding firm " + std::to_string(n + 1));
      }
    }
    if (d.exclusion_prefix.back() != d.exclusion) {
      throw Error(ErrorKind::Replicate, "exclusion curve disagrees with the full market");
    }
  }
  if (!cfg.run_matching) return d;

  MatchingInstance& inst = d.instance;
  inst.applicants = na;
  inst.firms = cfg.firms;
  inst.capacity = cfg.capacity;
  inst.firm_rank.assign(cfg.firms, std::vector<std::uint32_t>(na));
  for (std::size_t f = 0; f < cfg.firms; ++f) {
    const auto& order = d.prefs.firms[f].order;
    for (std::size_t r = 0; r < na; ++r) inst.firm_rank[f][order[r]] = static_cast<std::uint32_t>(r);
  }
  inst.applicant_order.resize(na);
  std::vector<double> key(cfg.firms);
  for (std::size_t a = 0; a < na; ++a) {
    auto& order = inst.applicant_order[a];
    order.resize(cfg.firms);
    std::iota(order.begin(), order.end(), std::uint32_t{0});
    if (cfg.applicant_preferences == ApplicantPreferenceSource::UniformRandom) {
      shuffle(std::span(order), pref_rng);
    } else {
      const std::size_t row = ctx.applicant_score_row[a];
      for (auto& k : key) k = uniform01(pref_rng);
      std::sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) {
        const double sx = ctx.applicant_scores->score(row, x);
        const double sy = ctx.applicant_scores->score(row, y);
        if (sx != sy) return sx > sy;
        if (key[x] != key[y]) return key[x] > key[y];
        return x < y;
      });
    }
  }
  inst.applied.assign(na, std::vector<bool>(cfg.firms, false));
  for (std::size_t a = 0; a < na; ++a) {
    const std::size_t t =
        cfg.budget == BudgetRule::AllFirms ? cfg.firms : 1 + uniform_index(budget_rng, cfg.firms);
    for (std::size_t r = 0; r < t; ++r) inst.applied[a][inst.applicant_order[a][r]] = true;
  }

  if (cfg.firm_pool == FirmPool::Interviewed) {
    inst.acceptable.assign(cfg.firms, std::vector<bool>(na, false));
    for (std::size_t f = 0; f < cfg.firms; ++f) {
      for (auto a : d.interviews[f]) inst.acceptable[f][a] = true;
    }
  }
  d.outcome = deferred_acceptance(inst);
  d.matched = static_cast<std::size_t>(
      std::count_if(d.outcome.match.begin(), d.outcome.match.end(), [](std::int32_t m) { return m != kUnmatched; }));
  if (d.matched > 0) d.avg_rank = avg_applicant_rank(d.outcome);

  if (cfg.verify) {
    const auto violations = feasibility_violations(inst, d.outcome);
    if (!violations.empty()) throw Error(ErrorKind::Replicate, violations.front());
    const auto blocking = blocking_pairs(inst, d.outcome);
    if (!blocking.empty()) {
      throw Error(ErrorKind::Replicate, "blocking pair (applicant " + std::to_string(blocking.front().applicant) +
                                            ", firm " + std::to_string(blocking.front().firm) + ")");
    }
  }
  return d;
}

ReplicateSummary summarize_replicate(const Context& ctx, std::size_t index) {
  const MarketConfig& cfg = *ctx.cfg;
  ReplicateDetail d;
  try {
    d = simulate(ctx, index);
  } catch (const Error& e) {
    throw Error(e.kind(), "replicate " + std::to_string(index) + ": " + e.detail());
  }
  ReplicateSummary s;
  s.exclusion = d.exclusion;
  s.prefix = std::move(d.exclusion_prefix);
  if (!cfg.run_matching) return s;
  s.avg_rank = d.avg_rank;
  const std::size_t na = ctx.applicants.size();
  s.match_rate = static_cast<double>(d.matched) / static_cast<double>(na);

  s.budget_matched.assign(cfg.firms, 0);
  s.budget_total.assign(cfg.firms, 0);
  for (std::size_t a = 0; a < na; ++a) {
    const std::size_t t = d.outcome.budget[a];
    ++s.budget_total[t - 1];
    if (d.outcome.match[a] != kUnmatched) ++s.budget_matched[t - 1];
  }

  if (ctx.labeled) {
    const std::size_t nb = static_cast<std::size_t>(ctx.bucket_hi - ctx.bucket_lo + 1);
    s.bucket_matched.assign(nb, 0);
    s.bucket_total.assign(nb, 0);
    const std::size_t job = d.job_index;
    for (std::size_t a = 0; a < na; ++a) {
      const std::size_t p = ctx.pair_index[job * na + a];
      if (p == static_cast<std::size_t>(-1)) continue;
      const double h = ctx.ratings->human(p);
      if (is_missing(h)) continue;
      const int b = std::clamp(static_cast<int>(std::floor(h)), ctx.bucket_lo, ctx.bucket_hi);
      const std::size_t bi = static_cast<std::size_t>(b - ctx.bucket_lo);
      ++s.bucket_total[bi];
      if (d.outcome.match[a] != kUnmatched) ++s.bucket_matched[bi];
    }
  }
  return s;
}

MarketEnsembleResult run_prepared(const Context& ctx, unsigned threads) {
  const MarketConfig& cfg = *ctx.cfg;
  std::vector<ReplicateSummary> reps(cfg.replicates);
  parallel_for(cfg.replicates, threads, [&](std::size_t i) { reps[i] = summarize_replicate(ctx, i); });

  MarketEnsembleResult res;
  res.replicates = cfg.replicates;
  std::vector<double> excl, rank, rate;
  for (const auto& r : reps) {
    excl.push_back(r.exclusion);
    if (r.avg_rank) rank.push_back(*r.avg_rank);
    rate.push_back(r.match_rate);
  }
  res.exclusion = estimate(excl);
  for (std::size_t n = 0; n < cfg.firms; ++n) {
    std::vector<double> v;
    v.reserve(reps.size());
    for (const auto& r : reps) v.push_back(r.prefix[n]);
    res.exclusion_by_firms.push_back(estimate(v));
  }
  if (!cfg.run_matching) return res;
  res.avg_rank = estimate(rank);
  res.match_rate = estimate(rate);

  std::vector<std::size_t> bm(cfg.firms, 0), bt(cfg.firms, 0);
  for (const auto& r : reps) {
    for (std::size_t t = 0; t < cfg.firms; ++t) {
      bm[t] += r.budget_matched[t];
      bt[t] += r.budget_total[t];
    }
  }
  try {
    res.by_budget = relative_match_probability(bm, bt);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::UndefinedBaseline) throw;
    res.by_budget.clear();
    for (std::size_t t = 0; t < cfg.firms; ++t) {
      BudgetStat s;
      s.applications = t + 1;
      s.matched = bm[t];
      s.total = bt[t];
      if (bt[t] > 0) {
        const double p = static_cast<double>(bm[t]) / static_cast<double>(bt[t]);
        s.p_match = p;
        s.p_match_se = std::sqrt(p * (1.0 - p) / static_cast<double>(bt[t]));
      }
      res.by_budget.push_back(s);
    }
  }

  if (ctx.labeled) {
    const std::size_t nb = static_cast<std::size_t>(ctx.bucket_hi - ctx.bucket_lo + 1);
    std::vector<std::size_t> m(nb, 0), t(nb, 0);
    for (const auto& r : reps) {
      for (std::size_t b = 0; b < nb; ++b) {
        m[b] += r.bucket_matched[b];
        t[b] += r.bucket_total[b];
      }
    }
    res.buckets = match_prob_by_bucket(m, t);
    for (auto& b : res.buckets) b.bucket += ctx.bucket_lo;
  }
  return res;
}

}  // namespace

std::vector<std::string> resolve_applicants(const MarketConfig& cfg, const MarketInputs& in) {
  if (!cfg.applicants.empty()) return cfg.applicants;
  if (in.ratings != nullptr) return in.ratings->resume_ids();
  std::vector<std::string> out;
  char buf[32];
  for (std::size_t i = 0; i < cfg.applicant_count; ++i) {
    std::snprintf(buf, sizeof buf, "a%03zu", i);
    out.emplace_back(buf);
  }
  return out;
}

std::vector<std::string> resolve_jobs(const MarketConfig& cfg, const MarketInputs& in) {
  if (!cfg.jobs.empty()) return cfg.jobs;
  if (in.ratings != nullptr) return in.ratings->job_ids();
  return {std::string()};
}

FirmPreferences build_firm_preferences(const MarketConfig& cfg, const MarketInputs& in,
                                       const std::vector<std::string>& applicants, const std::string& job,
                                       Engine& model_rng, Engine& tiebreak_rng) {
  MarketConfig c = cfg;
  c.applicants = applicants;
  c.jobs = {job};
  const Context ctx = prepare(c, in);
  return firm_preferences(ctx, 0, model_rng, tiebreak_rng);
}

std::size_t interview_count(double p, std::size_t applicants) {
  const double raw = std::ceil(p * static_cast<double>(applicants) - 1e-9);
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(raw, 1.0)), 1, std::max<std::size_t>(applicants, 1));
}

std::vector<std::vector<std::uint32_t>> interview_sets(const FirmPreferences& prefs, double p) {
  std::vector<std::vector<std::uint32_t>> out;
  out.reserve(prefs.firms.size());
  for (const auto& f : prefs.firms) {
    const std::size_t k = std::min(interview_count(p, f.order.size()), f.order.size());
    out.emplace_back(f.order.begin(), f.order.begin() + static_cast<std::ptrdiff_t>(k));
  }
  return out;
}

double systemic_exclusion_rate(const std::vector<std::vector<std::uint32_t>>& interviews, std::size_t applicants) {
  if (applicants == 0) throw Error(ErrorKind::InvalidConfig, "empty applicant set");
  std::vector<bool> seen(applicants, false);
  for (const auto& set : interviews) {
    for (auto a : set) seen.at(a) = true;
  }
  const auto excluded = std::count(seen.begin(), seen.end(), false);
  return static_cast<double>(excluded) / static_cast<double>(applicants);
}

std::vector<double> exclusion_by_firm_prefix(const std::vector<std::vector<std::uint32_t>>& interviews,
                                             std::size_t applicants) {
  if (applicants == 0) throw Error(ErrorKind::InvalidConfig, "empty applicant set");
  const std::size_t nf = interviews.size();
  // Index of the first firm interviewing each applicant (nf when none does).
  std::vector<std::size_t> first(applicants, nf);
  for (std::size_t f = 0; f < nf; ++f) {
    for (auto a : interviews[f]) first.at(a) = std::min(first[a], f);
  }
  std::vector<std::size_t> newly(nf + 1, 0);
  for (auto f : first) ++newly[f];
  std::vector<double> out(nf);
  std::size_t covered = 0;
  for (std::size_t n = 0; n < nf; ++n) {
    covered += newly[n];
    out[n] = static_cast<double>(applicants - covered) / static_cast<double>(applicants);
  }
  return out;
}

MatchingOutcome deferred_acceptance(const MatchingInstance& inst) {
  const std::size_t na = inst.applicants;
  const std::size_t nf = inst.firms;
  std::vector<std::vector<std::uint32_t>> lists(na);
  MatchingOutcome out;
  out.budget.assign(na, 0);
  for (std::size_t a = 0; a < na; ++a) {
    for (auto f : inst.applicant_order[a]) {
      if (inst.applied[a][f]) lists[a].push_back(f);
    }
    out.budget[a] = static_cast<std::uint32_t>(lists[a].size());
  }
  std::vector<std::size_t> next(na, 0);
  std::vector<std::vector<std::uint32_t>> held(nf);
  std::vector<std::uint32_t> free;
  for (std::size_t a = na; a-- > 0;) free.push_back(static_cast<std::uint32_t>(a));

  while (!free.empty()) {
    const std::uint32_t a = free.back();
    free.pop_back();
    if (next[a] >= lists[a].size()) continue;
    const std::uint32_t f = lists[a][next[a]++];
    if (!inst.in_pool(f, a)) {
      free.push_back(a);
      continue;
    }
    auto& h = held[f];
    if (h.size() < inst.capacity) {
      h.push_back(a);
      continue;
    }
    auto worst = std::max_element(h.begin(), h.end(), [&](std::uint32_t x, std::uint32_t y) {
      return inst.firm_rank[f][x] < inst.firm_rank[f][y];
    });
    if (inst.firm_rank[f][a] < inst.firm_rank[f][*worst]) {
      free.push_back(*worst);
      *worst = a;
    } else {
      free.push_back(a);
    }
  }

  out.match.assign(na, kUnmatched);
  out.rank.assign(na, 0);
  for (std::size_t f = 0; f < nf; ++f) {
    for (auto a : held[f]) out.match[a] = static_cast<std::int32_t>(f);
  }
  for (std::size_t a = 0; a < na; ++a) {
    if (out.match[a] == kUnmatched) continue;
    const auto& order = inst.applicant_order[a];
    const auto it = std::find(order.begin(), order.end(), static_cast<std::uint32_t>(out.match[a]));
    out.rank[a] = static_cast<std::uint32_t>(it - order.begin()) + 1;
  }
  return out;
}

std::vector<BlockingPair> blocking_pairs(const MatchingInstance& inst, const MatchingOutcome& out) {
  const std::size_t na = inst.applicants;
  const std::size_t nf = inst.firms;
  std::vector<std::vector<std::uint32_t>> pos(na, std::vector<std::uint32_t>(nf));
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t r = 0; r < nf; ++r) pos[a][inst.applicant_order[a][r]] = static_cast<std::uint32_t>(r);
  }
  std::vector<std::size_t> load(nf, 0);
  std::vector<std::uint32_t> worst_rank(nf, 0);
  for (std::size_t a = 0; a < na; ++a) {
    if (out.match[a] == kUnmatched) continue;
    const auto f = static_cast<std::size_t>(out.match[a]);
    ++load[f];
    worst_rank[f] = std::max(worst_rank[f], inst.firm_rank[f][a]);
  }
  std::vector<BlockingPair> out_pairs;
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t f = 0; f < nf; ++f) {
      if (!inst.applied[a][f] || !inst.in_pool(f, a) || out.match[a] == static_cast<std::int32_t>(f)) continue;
      const bool applicant_wants =
          out.match[a] == kUnmatched || pos[a][f] < pos[a][static_cast<std::size_t>(out.match[a])];
      const bool firm_wants = load[f] < inst.capacity || inst.firm_rank[f][a] < worst_rank[f];
      if (applicant_wants && firm_wants) {
        out_pairs.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(f)});
      }
    }
  }
  return out_pairs;
}

std::vector<std::string> feasibility_violations(const MatchingInstance& inst, const MatchingOutcome& out) {
  std::vector<std::string> v;
  std::vector<std::size_t> load(inst.firms, 0);
  for (std::size_t a = 0; a < inst.applicants; ++a) {
    const auto m = out.match[a];
    if (m == kUnmatched) continue;
    if (m < 0 || static_cast<std::size_t>(m) >= inst.firms) {
      v.push_back("applicant " + std::to_string(a) + " matched to unknown firm");
      continue;
    }
    if (!inst.applied[a][static_cast<std::size_t>(m)]) {
      v.push_back("applicant " + std::to_string(a) + " matched to firm " + std::to_string(m) +
                  " without applying");
    }
    if (!inst.in_pool(static_cast<std::size_t>(m), a)) {
      v.push_back("applicant " + std::to_string(a) + " matched outside the pool of firm " + std::to_string(m));
    }
    ++load[static_cast<std::size_t>(m)];
  }
  for (std::size_t f = 0; f < inst.firms; ++f) {
    if (load[f] > inst.capacity) v.push_back("firm " + std::to_string(f) + " exceeds capacity");
  }
  return v;
}

double avg_applicant_rank(const MatchingOutcome& out) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t a = 0; a < out.match.size(); ++a) {
    if (out.match[a] == kUnmatched) continue;
    sum += out.rank[a];
    ++n;
  }
  if (n == 0) throw Error(ErrorKind::NoMatches, "no applicant is matched");
  return sum / static_cast<double>(n);
}

ReplicateDetail simulate_replicate(const MarketConfig& cfg, const MarketInputs& in, std::size_t index) {
  const Context ctx = prepare(cfg, in);
  return simulate(ctx, index);
}

MarketEnsembleResult run_ensemble(const MarketConfig& cfg, const MarketInputs& in, unsigned threads) {
  const Context ctx = prepare(cfg, in);
  return run_prepared(ctx, threads);
}

std::vector<BucketStat> match_prob_by_bucket(const std::vector<std::size_t>& matched,
                                             const std::vector<std::size_t>& total) {
  std::vector<BucketStat> out;
  for (std::size_t b = 0; b < total.size(); ++b) {
    BucketStat s;
    s.bucket = static_cast<int>(b);
    s.matched = matched[b];
    s.total = total[b];
    if (s.total > 0) {
      const double p = static_cast<double>(s.matched) / static_cast<double>(s.total);
      s.probability = p;
      s.se = std::sqrt(p * (1.0 - p) / static_cast<double>(s.total));
    }
    out.push_back(s);
  }
  return out;
}

std::vector<BudgetStat> relative_match_probability(const std::vector<std::size_t>& matched,
                                                   const std::vector<std::size_t>& total) {
  if (total.empty() || total[0] == 0 || matched[0] == 0) {
    throw Error(ErrorKind::UndefinedBaseline, "no matched applicant with a single application");
  }
  const double n1 = static_cast<double>(total[0]);
  const double p1 = static_cast<double>(matched[0]) / n1;
  std::vector<BudgetStat> out;
  for (std::size_t t = 0; t < total.size(); ++t) {
    BudgetStat s;
    s.applications = t + 1;
    s.matched = matched[t];
    s.total = total[t];
    if (s.total > 0) {
      const double nt = static_cast<double>(s.total);
      const double p = static_cast<double>(s.matched) / nt;
      s.p_match = p;
      s.p_match_se = std::sqrt(p * (1.0 - p) / nt);
      const double rel = p / p1;
      s.p_relative = rel;
      if (t == 0) {
        s.p_relative_se = 0.0;
      } else if (p > 0.0) {
        // Delta method on log(p_t / p_1) with independent binomial samples.
        s.p_relative_se = rel * std::sqrt((1.0 - p) / (nt * p) + (1.0 - p1) / (n1 * p1));
      } else {
        s.p_relative_se = std::sqrt(1.0 / nt) / p1;
      }
    }
    out.push_back(s);
  }
  return out;
}

std::vector<LlmCountPoint> exclusion_by_llm_count(const MarketConfig& cfg, const MarketInputs& in,
                                                  std::size_t max_combinations, unsigned threads) {
  if (in.ratings == nullptr) throw Error(ErrorKind::MissingRatings, "model-count sweep requires rating data");
  if (max_combinations < 1) throw Error(ErrorKind::InvalidConfig, "max_combinations must be >= 1");
  std::vector<std::string> pool = cfg.model_pool.empty() ? in.ratings->model_ids() : cfg.model_pool;
  const std::size_t np = pool.size();

  std::vector<LlmCountPoint> out;
  for (std::size_t n = 1; n <= std::min(np, cfg.firms); ++n) {
    // Enumerate every subset when few exist, else sample distinct ones.
    double count = 1.0;
    for (std::size_t i = 0; i < n; ++i) count = count * static_cast<double>(np - i) / static_cast<double>(i + 1);
    std::vector<std::vector<std::size_t>> combos;
    if (count <= static_cast<double>(max_combinations) + 0.5) {
      std::vector<bool> mask(np, false);
      std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(n), true);
      do {
        std::vector<std::size_t> c;
        for (std::size_t i = 0; i < np; ++i) {
          if (mask[i]) c.push_back(i);
        }
        combos.push_back(std::move(c));
      } while (std::prev_permutation(mask.begin(), mask.end()));
    } else {
      Engine eng = make_engine(derive_seed(derive_seed(cfg.seed, "llm-count"), static_cast<std::uint64_t>(n)));
      std::set<std::vector<std::size_t>> seen;
      std::vector<std::size_t> idx(np);
      while (combos.size() < max_combinations) {
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        shuffle(std::span(idx), eng);
        std::vector<std::size_t> c(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n));
        std::sort(c.begin(), c.end());
        if (seen.insert(c).second) combos.push_back(std::move(c));
      }
    }

    std::vector<MarketConfig> cfgs(combos.size(), cfg);
    std::vector<Context> ctxs;
    ctxs.reserve(combos.size());
    for (std::size_t c = 0; c < combos.size(); ++c) {
      MarketConfig& k = cfgs[c];
      k.method = PreferenceMethod::FixedModels;
      k.fixed_models.clear();
      for (auto i : combos[c]) k.fixed_models.push_back(pool[i]);
      k.model_pool = k.fixed_models;
      k.run_matching = false;
      k.seed = derive_seed(derive_seed(derive_seed(cfg.seed, "llm-count"), static_cast<std::uint64_t>(n)),
                           static_cast<std::uint64_t>(c));
      ctxs.push_back(prepare(k, in));
      ctxs.back().cfg = &cfgs[c];
    }
    std::vector<double> means(combos.size());
    parallel_for(combos.size(), threads, [&](std::size_t c) { means[c] = run_prepared(ctxs[c], 1).exclusion.mean; });
    LlmCountPoint pt;
    pt.llms = n;
    pt.combinations = combos.size();
    pt.exclusion = estimate(means);
    out.push_back(pt);
  }
  return out;
}

namespace {

void opt_field(csv::Writer& w, const std::optional<double>& v) {
  if (v) w.field(*v);
  else w.empty();
}

}  // namespace

void write_summary_csv(std::ostream& out, const std::vector<std::pair<std::string, MarketEnsembleResult>>& results) {
  csv::Writer w(out);
  w.row({"label", "replicates", "exclusion", "exclusion_se", "avg_rank", "avg_rank_se", "avg_rank_replicates",
         "match_rate", "match_rate_se"});
  for (const auto& [label, r] : results) {
    w.field(label).field(r.replicates).field(r.exclusion.mean).field(r.exclusion.se);
    if (r.avg_rank.n > 0) w.field(r.avg_rank.mean).field(r.avg_rank.se);
    else w.empty().empty();
    w.field(r.avg_rank.n).field(r.match_rate.mean).field(r.match_rate.se);
    w.end_row();
  }
}

void write_buckets_csv(std::ostream& out, const std::vector<std::pair<std::string, MarketEnsembleResult>>& results) {
  csv::Writer w(out);
  w.row({"label", "bucket", "matched", "total", "probability", "se"});
  for (const auto& [label, r] : results) {
    for (const auto& b : r.buckets) {
      w.field(label).field(b.bucket).field(b.matched).field(b.total);
      opt_field(w, b.probability);
      if (b.probability) w.field(b.se);
      else w.empty();
      w.end_row();
    }
  }
}

void write_budget_csv(std::ostream& out, const std::vector<std::pair<std::string, MarketEnsembleResult>>& results) {
  csv::Writer w(out);
  w.row({"label", "applications", "matched", "total", "p_match", "p_match_se", "p_relative", "p_relative_se"});
  for (const auto& [label, r] : results) {
    for (const auto& b : r.by_budget) {
      if (b.total == 0) continue;
      w.field(label).field(b.applications).field(b.matched).field(b.total);
      opt_field(w, b.p_match);
      w.field(b.p_match_se);
      opt_field(w, b.p_relative);
      if (b.p_relative) w.field(b.p_relative_se);
      else w.empty();
      w.end_row();
    }
  }
}

void write_exclusion_curve_csv(std::ostream& out,
                               const std::vector<std::pair<std::string, MarketEnsembleResult>>& results) {
  csv::Writer w(out);
  w.row({"label", "firms", "exclusion", "se"});
  for (const auto& [label, r] : results) {
    for (std::size_t n = 0; n < r.exclusion_by_firms.size(); ++n) {
      w.field(label).field(n + 1).field(r.exclusion_by_firms[n].mean).field(r.exclusion_by_firms[n].se);
      w.end_row();
    }
  }
}

void write_llm_count_csv(std::ostream& out, const std::vector<LlmCountPoint>& points) {
  csv::Writer w(out);
  w.row({"llms", "combinations", "exclusion", "se"});
  for (const auto& p : points) {
    w.field(p.llms).field(p.combinations).field(p.exclusion.mean).field(p.exclusion.se);
    w.end_row();
  }
}

}  // namespace mono::market
