#pragma once

// Declarative JSON configuration for synthetic dataset specs and market
// scenarios. Unknown keys are rejected so typos surface as InvalidConfig.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mono/market.hpp"
#include "mono/synthetic.hpp"

namespace mono::config {

using Json = nlohmann::json;

/// Reads and parses a JSON file. Throws Io / Parse.
Json load_json(const std::string& path);

enum class SynthKind { Responses, Ratings };

struct SynthSpec {
  SynthKind kind = SynthKind::Responses;
  synthetic::SyntheticEnsembleSpec responses;
  synthetic::SyntheticRatingSpec ratings;
};

/// Either an explicit spec or {"preset": name, ...}. Presets:
///   "independent"           10 models, rho 0, k 4, 14042 items
///   "accuracy_correlated"   models/companies/items/company_weight knobs
///   "company_ratings"       20 company-structured raters
SynthSpec parse_synth_spec(const Json& j);
Json to_json(const SynthSpec& s);

struct MarketScenario {
  market::MarketConfig base;
  std::vector<market::PreferenceMethod> methods;
  std::string ratings_path;
  std::string human_path;
  std::string metadata_path;
  std::string applicant_scores_path;
  ScoreScale scale;
  /// "all", "labeled" or empty when explicit ids / a count are given.
  std::string applicants_mode = "all";
  std::string jobs_mode = "all";
  /// Model-count exclusion sweep; absent when not requested.
  std::optional<std::size_t> llm_sweep_combinations;
};

/// Relative paths resolve against `base_dir`.
MarketScenario parse_market_scenario(const Json& j, const std::string& base_dir = "");
Json to_json(const MarketScenario& s);

/// Resumes / jobs appearing in at least one human-labeled pair, in first-appearance order.
std::vector<std::string> labeled_resumes(const RatingDataset& r);
std::vector<std::string> labeled_jobs(const RatingDataset& r);

}  // namespace mono::config
