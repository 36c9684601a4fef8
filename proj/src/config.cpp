#include "mono/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include "mono/error.hpp"

namespace mono::config {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::InvalidConfig, where + ": " + what);
}

void check_keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(where, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, _] : j.items()) {
    if (!ok.count(k)) fail(where, "unknown key '" + k + "'");
  }
}

double get_double(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

std::size_t get_size(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) fail(where, "expected a non-negative integer");
  return j.get<std::size_t>();
}

std::uint64_t get_seed(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0)) {
    fail(where, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

bool get_bool(const Json& j, const std::string& where) {
  if (!j.is_boolean()) fail(where, "expected true or false");
  return j.get<bool>();
}

std::string get_string(const Json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

std::vector<std::string> get_strings(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_string(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

template <typename T, typename F>
void opt(const Json& j, const char* key, const std::string& where, T& slot, F get) {
  if (j.contains(key)) slot = get(j.at(key), where + "." + key);
}

std::map<int, double> get_choices(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return {{j.get<int>(), 1.0}};
  if (!j.is_object()) fail(where, "expected an integer or an object of fractions");
  std::map<int, double> out;
  for (const auto& [k, v] : j.items()) {
    int key = 0;
    try {
      std::size_t used = 0;
      key = std::stoi(k, &used);
      if (used != k.size()) throw std::invalid_argument(k);
    } catch (const std::exception&) {
      fail(where, "choice count '" + k + "' is not an integer");
    }
    out[key] = get_double(v, where + "." + k);
  }
  return out;
}

synthetic::SyntheticModel parse_model(const Json& j, const std::string& where) {
  check_keys(j, where, {"id", "accuracy", "rho", "company_weight", "company", "architecture", "params_billions",
                        "generation", "is_moe", "latest_model"});
  synthetic::SyntheticModel m;
  if (!j.contains("id")) fail(where, "missing 'id'");
  m.id = get_string(j.at("id"), where + ".id");
  opt(j, "accuracy", where, m.accuracy, get_double);
  opt(j, "rho", where, m.rho, get_double);
  opt(j, "company_weight", where, m.company_weight, get_double);
  opt(j, "company", where, m.company, get_string);
  if (j.contains("architecture")) m.architecture = get_string(j["architecture"], where + ".architecture");
  if (j.contains("params_billions")) m.params_billions = get_double(j["params_billions"], where + ".params_billions");
  if (j.contains("generation")) m.generation = static_cast<int>(get_size(j["generation"], where + ".generation"));
  if (j.contains("is_moe")) m.is_moe = get_bool(j["is_moe"], where + ".is_moe");
  if (j.contains("latest_model")) m.latest_model = get_bool(j["latest_model"], where + ".latest_model");
  return m;
}

synthetic::SyntheticRater parse_rater(const Json& j, const std::string& where) {
  check_keys(j, where, {"id", "shared_loading", "company_loading", "noise_sd", "company", "latest_model",
                        "correlation_with_human_score"});
  synthetic::SyntheticRater m;
  if (!j.contains("id")) fail(where, "missing 'id'");
  m.id = get_string(j.at("id"), where + ".id");
  opt(j, "shared_loading", where, m.shared_loading, get_double);
  opt(j, "company_loading", where, m.company_loading, get_double);
  opt(j, "noise_sd", where, m.noise_sd, get_double);
  opt(j, "company", where, m.company, get_string);
  if (j.contains("latest_model")) m.latest_model = get_bool(j["latest_model"], where + ".latest_model");
  if (j.contains("correlation_with_human_score")) {
    m.correlation_with_human_score =
        get_double(j["correlation_with_human_score"], where + ".correlation_with_human_score");
  }
  return m;
}

ScoreScale parse_scale(const Json& j, const std::string& where) {
  check_keys(j, where, {"lo", "hi"});
  ScoreScale s;
  opt(j, "lo", where, s.lo, get_double);
  opt(j, "hi", where, s.hi, get_double);
  if (!(s.lo < s.hi)) fail(where, "lo must be below hi");
  return s;
}

std::string resolve_path(const std::string& p, const std::string& base_dir) {
  if (p.empty() || base_dir.empty()) return p;
  const std::filesystem::path path(p);
  if (path.is_absolute()) return p;
  return (std::filesystem::path(base_dir) / path).lexically_normal().string();
}

}  // namespace

Json load_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::Parse, path + ": " + e.what());
  }
}

SynthSpec parse_synth_spec(const Json& j) {
  const std::string where = "spec";
  if (!j.is_object()) fail(where, "expected an object");
  SynthSpec s;
  std::uint64_t seed = 0;
  if (j.contains("seed")) seed = get_seed(j["seed"], "spec.seed");

  if (j.contains("preset")) {
    const std::string preset = get_string(j["preset"], "spec.preset");
    if (preset == "independent") {
      check_keys(j, where, {"preset", "seed", "models", "items", "choices"});
      s.kind = SynthKind::Responses;
      std::size_t models = 10;
      opt(j, "models", where, models, get_size);
      s.responses.items = 14042;
      opt(j, "items", where, s.responses.items, get_size);
      if (j.contains("choices")) s.responses.choices = get_choices(j["choices"], "spec.choices");
      s.responses.seed = seed;
      for (std::size_t i = 0; i < models; ++i) {
        synthetic::SyntheticModel m;
        m.id = "model-" + std::to_string(i);
        m.accuracy = 0.5 + 0.4 * (models > 1 ? static_cast<double>(i) / static_cast<double>(models - 1) : 0.0);
        s.responses.models.push_back(m);
      }
    } else if (preset == "accuracy_correlated") {
      check_keys(j, where, {"preset", "seed", "models", "companies", "items", "company_weight", "choices"});
      s.kind = SynthKind::Responses;
      std::size_t models = 20, companies = 5, items = 5000;
      double cw = 0.2;
      opt(j, "models", where, models, get_size);
      opt(j, "companies", where, companies, get_size);
      opt(j, "items", where, items, get_size);
      opt(j, "company_weight", where, cw, get_double);
      s.responses = synthetic::accuracy_correlated_ensemble(models, companies, items, cw, seed);
      if (j.contains("choices")) s.responses.choices = get_choices(j["choices"], "spec.choices");
    } else if (preset == "company_ratings") {
      check_keys(j, where, {"preset", "seed"});
      s.kind = SynthKind::Ratings;
      s.ratings = synthetic::company_structured_rating_spec(seed);
    } else {
      fail("spec.preset", "unknown preset '" + preset + "'");
    }
    return s;
  }

  const std::string kind = j.contains("kind") ? get_string(j["kind"], "spec.kind") : std::string("responses");
  if (kind == "responses") {
    check_keys(j, where, {"kind", "seed", "items", "choices", "models"});
    s.kind = SynthKind::Responses;
    s.responses.seed = seed;
    opt(j, "items", where, s.responses.items, get_size);
    if (j.contains("choices")) s.responses.choices = get_choices(j["choices"], "spec.choices");
    if (!j.contains("models") || !j["models"].is_array()) fail(where, "'models' must be an array");
    for (std::size_t i = 0; i < j["models"].size(); ++i) {
      s.responses.models.push_back(parse_model(j["models"][i], "spec.models[" + std::to_string(i) + "]"));
    }
    synthetic::validate(s.responses);
  } else if (kind == "ratings") {
    check_keys(j, where, {"kind", "seed", "resumes", "jobs", "labeled_resumes", "labeled_jobs", "latent", "scale",
                          "round", "clamp", "models"});
    s.kind = SynthKind::Ratings;
    auto& r = s.ratings;
    r.seed = seed;
    opt(j, "resumes", where, r.resumes, get_size);
    opt(j, "jobs", where, r.jobs, get_size);
    opt(j, "labeled_resumes", where, r.labeled_resumes, get_size);
    opt(j, "labeled_jobs", where, r.labeled_jobs, get_size);
    if (j.contains("latent")) {
      const auto& l = j["latent"];
      check_keys(l, "spec.latent", {"mean", "resume_sd", "pair_sd"});
      opt(l, "mean", "spec.latent", r.latent.mean, get_double);
      opt(l, "resume_sd", "spec.latent", r.latent.resume_sd, get_double);
      opt(l, "pair_sd", "spec.latent", r.latent.pair_sd, get_double);
    }
    if (j.contains("scale")) r.scale = parse_scale(j["scale"], "spec.scale");
    opt(j, "round", where, r.round, get_bool);
    opt(j, "clamp", where, r.clamp, get_bool);
    if (!j.contains("models") || !j["models"].is_array()) fail(where, "'models' must be an array");
    for (std::size_t i = 0; i < j["models"].size(); ++i) {
      r.models.push_back(parse_rater(j["models"][i], "spec.models[" + std::to_string(i) + "]"));
    }
    synthetic::validate(r);
  } else {
    fail("spec.kind", "expected 'responses' or 'ratings'");
  }
  return s;
}

Json to_json(const SynthSpec& s) {
  Json j;
  if (s.kind == SynthKind::Responses) {
    const auto& r = s.responses;
    j["kind"] = "responses";
    j["seed"] = r.seed;
    j["items"] = r.items;
    Json choices = Json::object();
    for (const auto& [k, f] : r.choices) choices[std::to_string(k)] = f;
    j["choices"] = choices;
    j["models"] = Json::array();
    for (const auto& m : r.models) {
      Json o{{"id", m.id}, {"accuracy", m.accuracy}, {"rho", m.rho}, {"company_weight", m.company_weight},
             {"company", m.company}};
      if (m.architecture) o["architecture"] = *m.architecture;
      if (m.params_billions) o["params_billions"] = *m.params_billions;
      if (m.generation) o["generation"] = *m.generation;
      if (m.is_moe) o["is_moe"] = *m.is_moe;
      if (m.latest_model) o["latest_model"] = *m.latest_model;
      j["models"].push_back(o);
    }
  } else {
    const auto& r = s.ratings;
    j["kind"] = "ratings";
    j["seed"] = r.seed;
    j["resumes"] = r.resumes;
    j["jobs"] = r.jobs;
    j["labeled_resumes"] = r.labeled_resumes;
    j["labeled_jobs"] = r.labeled_jobs;
    j["latent"] = {{"mean", r.latent.mean}, {"resume_sd", r.latent.resume_sd}, {"pair_sd", r.latent.pair_sd}};
    j["scale"] = {{"lo", r.scale.lo}, {"hi", r.scale.hi}};
    j["round"] = r.round;
    j["clamp"] = r.clamp;
    j["models"] = Json::array();
    for (const auto& m : r.models) {
      Json o{{"id", m.id},
             {"shared_loading", m.shared_loading},
             {"company_loading", m.company_loading},
             {"noise_sd", m.noise_sd},
             {"company", m.company}};
      if (m.latest_model) o["latest_model"] = *m.latest_model;
      if (m.correlation_with_human_score) o["correlation_with_human_score"] = *m.correlation_with_human_score;
      j["models"].push_back(o);
    }
  }
  return j;
}

MarketScenario parse_market_scenario(const Json& j, const std::string& base_dir) {
  const std::string where = "scenario";
  check_keys(j, where, {"method", "methods", "firms", "applicants", "jobs", "interview_fraction", "capacity",
                        "applicant_preferences", "applicant_scores", "budget", "firm_pool", "replicates", "seed", "ratings",
                        "human", "metadata", "scale", "model_pool", "fixed_models", "llm_count_sweep"});
  MarketScenario s;
  auto& c = s.base;
  auto method = [](const Json& v, const std::string& w) {
    const auto m = market::preference_method_from_string(get_string(v, w));
    if (!m) fail(w, "unknown preference method '" + v.get<std::string>() + "'");
    return *m;
  };
  if (j.contains("method") && j.contains("methods")) fail(where, "give either 'method' or 'methods'");
  if (j.contains("method")) s.methods.push_back(method(j["method"], "scenario.method"));
  if (j.contains("methods")) {
    if (!j["methods"].is_array() || j["methods"].empty()) fail("scenario.methods", "expected a non-empty array");
    for (std::size_t i = 0; i < j["methods"].size(); ++i) {
      s.methods.push_back(method(j["methods"][i], "scenario.methods[" + std::to_string(i) + "]"));
    }
  }
  if (s.methods.empty()) s.methods.push_back(market::PreferenceMethod::UniformlyRandom);

  opt(j, "firms", where, c.firms, get_size);
  if (j.contains("applicants")) {
    const auto& a = j["applicants"];
    if (a.is_string()) {
      s.applicants_mode = a.get<std::string>();
      if (s.applicants_mode != "all" && s.applicants_mode != "labeled") {
        fail("scenario.applicants", "expected \"all\", \"labeled\", a count or a list of resume ids");
      }
    } else if (a.is_number_integer()) {
      s.applicants_mode.clear();
      c.applicant_count = get_size(a, "scenario.applicants");
    } else {
      s.applicants_mode.clear();
      c.applicants = get_strings(a, "scenario.applicants");
    }
  }
  if (j.contains("jobs")) {
    const auto& a = j["jobs"];
    if (a.is_string()) {
      s.jobs_mode = a.get<std::string>();
      if (s.jobs_mode != "all" && s.jobs_mode != "labeled") {
        fail("scenario.jobs", "expected \"all\", \"labeled\" or a list of job ids");
      }
    } else {
      s.jobs_mode.clear();
      c.jobs = get_strings(a, "scenario.jobs");
    }
  }
  opt(j, "interview_fraction", where, c.interview_fraction, get_double);
  opt(j, "capacity", where, c.capacity, get_size);
  if (j.contains("applicant_preferences")) {
    const auto v = get_string(j["applicant_preferences"], "scenario.applicant_preferences");
    if (v == "uniform_random") c.applicant_preferences = market::ApplicantPreferenceSource::UniformRandom;
    else if (v == "rating_file") c.applicant_preferences = market::ApplicantPreferenceSource::RatingFile;
    else fail("scenario.applicant_preferences", "expected \"uniform_random\" or \"rating_file\"");
  }
  if (j.contains("budget")) {
    const auto v = get_string(j["budget"], "scenario.budget");
    if (v == "all_firms") c.budget = market::BudgetRule::AllFirms;
    else if (v == "uniform_1_to_F") c.budget = market::BudgetRule::Uniform1ToF;
    else fail("scenario.budget", "expected \"all_firms\" or \"uniform_1_to_F\"");
  }
  if (j.contains("firm_pool")) {
    const auto v = get_string(j["firm_pool"], "scenario.firm_pool");
    if (v == "all") c.firm_pool = market::FirmPool::AllApplicants;
    else if (v == "interviewed") c.firm_pool = market::FirmPool::Interviewed;
    else fail("scenario.firm_pool", "expected \"all\" or \"interviewed\"");
  }
  opt(j, "replicates", where, c.replicates, get_size);
  if (j.contains("seed")) c.seed = get_seed(j["seed"], "scenario.seed");
  opt(j, "ratings", where, s.ratings_path, get_string);
  opt(j, "human", where, s.human_path, get_string);
  opt(j, "metadata", where, s.metadata_path, get_string);
  opt(j, "applicant_scores", where, s.applicant_scores_path, get_string);
  s.ratings_path = resolve_path(s.ratings_path, base_dir);
  s.human_path = resolve_path(s.human_path, base_dir);
  s.metadata_path = resolve_path(s.metadata_path, base_dir);
  s.applicant_scores_path = resolve_path(s.applicant_scores_path, base_dir);
  if (j.contains("scale")) s.scale = parse_scale(j["scale"], "scenario.scale");
  if (j.contains("model_pool")) c.model_pool = get_strings(j["model_pool"], "scenario.model_pool");
  if (j.contains("fixed_models")) c.fixed_models = get_strings(j["fixed_models"], "scenario.fixed_models");
  if (j.contains("llm_count_sweep")) {
    const auto& sw = j["llm_count_sweep"];
    check_keys(sw, "scenario.llm_count_sweep", {"max_combinations"});
    std::size_t m = 100;
    opt(sw, "max_combinations", "scenario.llm_count_sweep", m, get_size);
    s.llm_sweep_combinations = m;
  }
  return s;
}

Json to_json(const MarketScenario& s) {
  const auto& c = s.base;
  Json j;
  j["methods"] = Json::array();
  for (auto m : s.methods) j["methods"].push_back(std::string(market::to_string(m)));
  j["firms"] = c.firms;
  if (!c.applicants.empty()) j["applicants"] = c.applicants;
  else if (!s.applicants_mode.empty()) j["applicants"] = s.applicants_mode;
  else j["applicants"] = c.applicant_count;
  if (!c.jobs.empty()) j["jobs"] = c.jobs;
  else j["jobs"] = s.jobs_mode.empty() ? std::string("all") : s.jobs_mode;
  j["interview_fraction"] = c.interview_fraction;
  j["capacity"] = c.capacity;
  j["applicant_preferences"] = std::string(market::to_string(c.applicant_preferences));
  j["budget"] = std::string(market::to_string(c.budget));
  j["firm_pool"] = std::string(market::to_string(c.firm_pool));
  j["replicates"] = c.replicates;
  j["seed"] = c.seed;
  if (!s.ratings_path.empty()) j["ratings"] = s.ratings_path;
  if (!s.human_path.empty()) j["human"] = s.human_path;
  if (!s.metadata_path.empty()) j["metadata"] = s.metadata_path;
  if (!s.applicant_scores_path.empty()) j["applicant_scores"] = s.applicant_scores_path;
  j["scale"] = {{"lo", s.scale.lo}, {"hi", s.scale.hi}};
  if (!c.model_pool.empty()) j["model_pool"] = c.model_pool;
  if (!c.fixed_models.empty()) j["fixed_models"] = c.fixed_models;
  if (s.llm_sweep_combinations) j["llm_count_sweep"] = {{"max_combinations", *s.llm_sweep_combinations}};
  return j;
}

std::vector<std::string> labeled_resumes(const RatingDataset& r) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (std::size_t p = 0; p < r.pair_count(); ++p) {
    if (is_missing(r.human(p))) continue;
    if (seen.insert(r.pairs()[p].resume_id).second) out.push_back(r.pairs()[p].resume_id);
  }
  return out;
}

std::vector<std::string> labeled_jobs(const RatingDataset& r) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (std::size_t p = 0; p < r.pair_count(); ++p) {
    if (is_missing(r.human(p))) continue;
    if (seen.insert(r.pairs()[p].job_id).second) out.push_back(r.pairs()[p].job_id);
  }
  return out;
}

}  // namespace mono::config
