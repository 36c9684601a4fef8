#pragma once

// Hiring-market simulation.
//
// Each replicate draws one job description shared by all firms. Firms rank
// every applicant by a model's score for (applicant, job) under one of five
// preference regimes; ties are broken by independent uniform keys per
// (firm, applicant). A firm interviews the top ceil(p |A|) of its order; an
// applicant interviewed by no firm is systemically excluded. Applicants then
// apply to all firms or to a uniformly sized random subset and the market
// clears by applicant-proposing deferred acceptance.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mono/dataset.hpp"
#include "mono/rng.hpp"

namespace mono::market {

enum class PreferenceMethod { SameLLM, SameCompanyLLM, LatestLLM, RandomLLMs, UniformlyRandom, FixedModels };
enum class ApplicantPreferenceSource { UniformRandom, RatingFile };
enum class BudgetRule { AllFirms, Uniform1ToF };
/// Applicants a firm may hire: everyone, or only those it interviewed.
enum class FirmPool { AllApplicants, Interviewed };

std::string_view to_string(PreferenceMethod m);
std::optional<PreferenceMethod> preference_method_from_string(std::string_view s);
std::string_view to_string(ApplicantPreferenceSource s);
std::string_view to_string(BudgetRule b);
std::string_view to_string(FirmPool p);

/// Applicant-side scores over firms (firm index 0..F-1), used when applicant
/// preferences come from a rating file. CSV: resume_id,firm,score.
struct ApplicantScores {
  std::vector<std::string> applicants;
  std::size_t firms = 0;
  std::vector<double> scores;  // applicants x firms, NaN missing

  double score(std::size_t applicant, std::size_t firm) const { return scores[applicant * firms + firm]; }
};

ApplicantScores load_applicant_scores(const std::string& path);
ApplicantScores read_applicant_scores(std::istream& in, const std::string& source = "applicant-scores");

struct MarketConfig {
  std::size_t firms = 30;
  /// Applicant resume ids; empty means every resume in the rating data, or
  /// `applicant_count` anonymous applicants when no rating data is supplied.
  std::vector<std::string> applicants;
  std::size_t applicant_count = 60;
  /// Job pool sampled once per replicate; empty means every job in the data.
  std::vector<std::string> jobs;
  PreferenceMethod method = PreferenceMethod::UniformlyRandom;
  double interview_fraction = 0.25;
  std::size_t capacity = 1;
  ApplicantPreferenceSource applicant_preferences = ApplicantPreferenceSource::UniformRandom;
  BudgetRule budget = BudgetRule::AllFirms;
  FirmPool firm_pool = FirmPool::AllApplicants;
  std::size_t replicates = 1500;
  std::uint64_t seed = 0;
  /// Models eligible for the LLM methods; empty means every rated model.
  std::vector<std::string> model_pool;
  /// FixedModels: firm f uses fixed_models[f % size].
  std::vector<std::string> fixed_models;
  /// Check stability, capacity and application constraints on every replicate.
  bool verify = true;
  /// Skip matching when only exclusion is needed.
  bool run_matching = true;
};

/// Throws InvalidConfig.
void validate(const MarketConfig& cfg);

struct MarketInputs {
  const RatingDataset* ratings = nullptr;
  const MetadataTable* meta = nullptr;
  const ApplicantScores* applicant_scores = nullptr;
};

struct FirmOrder {
  std::string model_id;  // empty for uniformly random firms
  std::vector<std::uint32_t> order;  // applicant indices, most preferred first
};

struct FirmPreferences {
  std::vector<FirmOrder> firms;
};

/// Resolved applicant ids for a config (see MarketConfig::applicants).
std::vector<std::string> resolve_applicants(const MarketConfig& cfg, const MarketInputs& in);
std::vector<std::string> resolve_jobs(const MarketConfig& cfg, const MarketInputs& in);

/// Firm preferences for one replicate's job. `model_rng` drives model choice,
/// `tiebreak_rng` the per-(firm, applicant) tie-break keys.
/// Throws MissingRatings / NoLatestModels / InvalidConfig.
FirmPreferences build_firm_preferences(const MarketConfig& cfg, const MarketInputs& in,
                                       const std::vector<std::string>& applicants, const std::string& job,
                                       Engine& model_rng, Engine& tiebreak_rng);

std::size_t interview_count(double p, std::size_t applicants);

/// Top ceil(p |A|) applicants of each firm.
std::vector<std::vector<std::uint32_t>> interview_sets(const FirmPreferences& prefs, double p);

double systemic_exclusion_rate(const std::vector<std::vector<std::uint32_t>>& interviews, std::size_t applicants);

/// Exclusion rate of the first n firms for n = 1..F (non-increasing in n).
std::vector<double> exclusion_by_firm_prefix(const std::vector<std::vector<std::uint32_t>>& interviews,
                                             std::size_t applicants);

struct MatchingInstance {
  std::size_t applicants = 0;
  std::size_t firms = 0;
  std::size_t capacity = 1;
  /// firm_rank[f][a]: position of applicant a in firm f's order (0 best).
  std::vector<std::vector<std::uint32_t>> firm_rank;
  /// applicant_order[a]: firms, most preferred first (all firms).
  std::vector<std::vector<std::uint32_t>> applicant_order;
  /// applied[a][f]
  std::vector<std::vector<bool>> applied;
  /// acceptable[f][a]: a is in f's pool; empty means every applicant is.
  std::vector<std::vector<bool>> acceptable;

  bool in_pool(std::size_t f, std::size_t a) const { return acceptable.empty() || acceptable[f][a]; }
};

inline constexpr std::int32_t kUnmatched = -1;

struct MatchingOutcome {
  std::vector<std::int32_t> match;   // firm per applicant or kUnmatched
  std::vector<std::uint32_t> rank;   // 1-based rank of matched firm in applicant order; 0 if unmatched
  std::vector<std::uint32_t> budget; // applications submitted per applicant
};

/// Applicant-proposing deferred acceptance restricted to application sets.
MatchingOutcome deferred_acceptance(const MatchingInstance& inst);

struct BlockingPair {
  std::uint32_t applicant;
  std::uint32_t firm;
};

/// Pairs (a, f) with a applied to f and in f's pool where both strictly prefer each other to
/// their assignment (a firm with a free seat prefers any applicant).
std::vector<BlockingPair> blocking_pairs(const MatchingInstance& inst, const MatchingOutcome& out);
/// Capacity and application-set violations (empty when feasible).
std::vector<std::string> feasibility_violations(const MatchingInstance& inst, const MatchingOutcome& out);

/// Mean rank of matched firm over matched applicants. Throws NoMatches.
double avg_applicant_rank(const MatchingOutcome& out);

struct ReplicateDetail {
  std::size_t job_index = 0;
  std::string job;
  std::vector<std::string> applicants;
  FirmPreferences prefs;
  std::vector<std::vector<std::uint32_t>> interviews;
  MatchingInstance instance;
  MatchingOutcome outcome;
  double exclusion = 0.0;
  std::vector<double> exclusion_prefix;
  std::optional<double> avg_rank;
  std::size_t matched = 0;
};

/// One replicate; seeds derive from (cfg.seed, index).
ReplicateDetail simulate_replicate(const MarketConfig& cfg, const MarketInputs& in, std::size_t index);

struct Estimate {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

struct BucketStat {
  int bucket = 0;  // covers human labels in [bucket, bucket + 1)
  std::size_t matched = 0;
  std::size_t total = 0;
  std::optional<double> probability;  // absent for an empty bucket
  double se = 0.0;
};

struct BudgetStat {
  std::size_t applications = 0;
  std::size_t matched = 0;
  std::size_t total = 0;
  std::optional<double> p_match;
  double p_match_se = 0.0;
  std::optional<double> p_relative;
  double p_relative_se = 0.0;
};

struct MarketEnsembleResult {
  std::size_t replicates = 0;
  Estimate exclusion;
  Estimate avg_rank;  // over replicates with at least one match
  Estimate match_rate;
  std::vector<Estimate> exclusion_by_firms;  // index n-1 for the first n firms
  std::vector<BucketStat> buckets;           // empty without human labels
  std::vector<BudgetStat> by_budget;         // t = 1..F
};

/// Aggregates per-replicate results in index order; identical for any thread count.
MarketEnsembleResult run_ensemble(const MarketConfig& cfg, const MarketInputs& in, unsigned threads = 1);

/// Match probability per human-label bucket, pooled over replicates.
std::vector<BucketStat> match_prob_by_bucket(const std::vector<std::size_t>& matched, const std::vector<std::size_t>& total);

/// P_match(t) / P_match(1). Throws UndefinedBaseline when P_match(1) is 0 or unobserved.
std::vector<BudgetStat> relative_match_probability(const std::vector<std::size_t>& matched,
                                                   const std::vector<std::size_t>& total);

struct LlmCountPoint {
  std::size_t llms = 0;
  std::size_t combinations = 0;
  Estimate exclusion;  // across combinations
};

/// Exclusion as a function of the number of distinct models in use: for each
/// n, up to `max_combinations` random n-subsets of the pool, models assigned to
/// firms round-robin, `cfg.replicates` markets per subset.
std::vector<LlmCountPoint> exclusion_by_llm_count(const MarketConfig& cfg, const MarketInputs& in,
                                                  std::size_t max_combinations = 100, unsigned threads = 1);

void write_llm_count_csv(std::ostream& out, const std::vector<LlmCountPoint>& points);
void write_summary_csv(std::ostream& out, const std::vector<std::pair<std::string, MarketEnsembleResult>>& results);
void write_buckets_csv(std::ostream& out, const std::vector<std::pair<std::string, MarketEnsembleResult>>& results);
void write_budget_csv(std::ostream& out, const std::vector<std::pair<std::string, MarketEnsembleResult>>& results);
void write_exclusion_curve_csv(std::ostream& out,
                               const std::vector<std::pair<std::string, MarketEnsembleResult>>& results);

}  // namespace mono::market
