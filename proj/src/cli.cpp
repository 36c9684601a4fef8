#include "mono/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "mono/config.hpp"
#include "mono/correlation.hpp"
#include "mono/csv.hpp"
#include "mono/error.hpp"
#include "mono/io.hpp"
#include "mono/judge.hpp"
#include "mono/market.hpp"
#include "mono/regression.hpp"
#include "mono/svg.hpp"
#include "mono/synthetic.hpp"

namespace mono::cli {

namespace fs = std::filesystem;
using config::Json;

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  std::uint64_t h = 1469598103934665603ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

namespace {

struct Common {
  std::uint64_t seed = 0;
  bool seed_given = false;
  unsigned threads = 1;
  std::string format = "csv";
  std::string out;
};

// Collects output files and the manifest for one subcommand run.
class Output {
 public:
  Output(std::string subcommand, const Common& common) : subcommand_(std::move(subcommand)), common_(common) {
    std::string dir = common.out;
    if (dir.empty()) {
      const char* env = std::getenv(kOutDirEnv);
      dir = env != nullptr && *env != '\0' ? env : "out";
    }
    dir_ = dir;
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create output directory '" + dir_.string() + "': " + ec.message());
  }

  bool json() const { return common_.format == "json"; }
  fs::path path(const std::string& name) const { return dir_ / name; }

  void file(const std::string& name, const std::string& content) {
    std::ofstream f(path(name), std::ios::binary);
    if (!f) throw Error(ErrorKind::Io, "cannot write '" + path(name).string() + "'");
    f << content;
    if (!f) throw Error(ErrorKind::Io, "write failed for '" + path(name).string() + "'");
    outputs_.push_back(name);
  }

  /// Tabular output as stem.csv, or stem.json (array of row objects) with --format json.
  void table(const std::string& stem, const std::string& csv_text) {
    if (!json()) {
      file(stem + ".csv", csv_text);
      return;
    }
    std::istringstream in(csv_text);
    const csv::Table t = csv::read(in, stem);
    Json rows = Json::array();
    for (const auto& r : t.rows) {
      Json o = Json::object();
      for (std::size_t c = 0; c < t.header.size(); ++c) {
        const std::string& v = c < r.fields.size() ? r.fields[c] : std::string();
        if (v.empty()) o[t.header[c]] = nullptr;
        else if (auto d = csv::parse_double(v)) o[t.header[c]] = *d;
        else o[t.header[c]] = v;
      }
      rows.push_back(std::move(o));
    }
    file(stem + ".json", rows.dump(2) + "\n");
  }

  void input(const std::string& p) {
    if (!p.empty()) inputs_[p] = file_digest(p);
  }

  void finish(const Json& resolved, std::ostream& out) {
    Json m;
    m["subcommand"] = subcommand_;
    m["version"] = kVersion;
    m["seed"] = common_.seed;
    m["format"] = common_.format;
    m["config"] = resolved;
    m["inputs"] = Json::object();
    for (const auto& [p, d] : inputs_) m["inputs"][p] = {{"fnv1a64", d}};
    std::vector<std::string> outs = outputs_;
    outs.push_back("manifest.json");
    std::sort(outs.begin(), outs.end());
    m["outputs"] = outs;
    std::ofstream f(path("manifest.json"), std::ios::binary);
    if (!f) throw Error(ErrorKind::Io, "cannot write manifest");
    f << m.dump(2) << "\n";
    out << "wrote " << outs.size() << " files to " << dir_.string() << "\n";
  }

 private:
  std::string subcommand_;
  const Common& common_;
  fs::path dir_;
  std::vector<std::string> outputs_;
  std::map<std::string, std::string> inputs_;
};

std::string sanitize(const std::string& id) {
  std::string s;
  for (char c : id) s.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' ? c : '_');
  return s;
}

template <typename F>
std::string to_text(F&& write) {
  std::ostringstream o;
  write(o);
  return o.str();
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Master seed")->each([&c](const std::string&) { c.seed_given = true; });
  app->add_option("--threads", c.threads, "Worker threads (outputs do not depend on this)")
      ->check(CLI::Range(1u, 1024u));
  app->add_option("--format", c.format, "Tabular output format")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--out", c.out, std::string("Output directory (default $") + kOutDirEnv + " or ./out)");
}

struct DataArgs {
  std::string responses, key, ratings, human, metadata;
  double scale_lo = 1.0, scale_hi = 10.0;
};

void add_data(CLI::App* app, DataArgs& d, bool ratings_allowed) {
  app->add_option("--responses", d.responses, "Responses CSV or JSONL");
  app->add_option("--key", d.key, "Answer key CSV");
  if (ratings_allowed) {
    app->add_option("--ratings", d.ratings, "Ratings CSV");
    app->add_option("--human", d.human, "Human label CSV");
    app->add_option("--scale-lo", d.scale_lo, "Lowest valid score");
    app->add_option("--scale-hi", d.scale_hi, "Highest valid score");
  }
}

bool rating_mode(const DataArgs& d) {
  const bool mc = !d.responses.empty() || !d.key.empty();
  const bool rt = !d.ratings.empty();
  if (mc == rt) throw Error(ErrorKind::Usage, "give either --responses with --key or --ratings");
  if (mc && (d.responses.empty() || d.key.empty())) throw Error(ErrorKind::Usage, "--responses requires --key");
  return rt;
}

Json data_json(const DataArgs& d) {
  Json j;
  if (!d.responses.empty()) j["responses"] = d.responses;
  if (!d.key.empty()) j["key"] = d.key;
  if (!d.ratings.empty()) {
    j["ratings"] = d.ratings;
    j["scale"] = {{"lo", d.scale_lo}, {"hi", d.scale_hi}};
  }
  if (!d.human.empty()) j["human"] = d.human;
  if (!d.metadata.empty()) j["metadata"] = d.metadata;
  return j;
}

std::vector<MetricKind> parse_metrics(const std::vector<std::string>& names, bool ratings, bool has_human) {
  std::vector<MetricKind> out;
  for (const auto& n : names) {
    const auto k = metric_kind_from_string(n);
    if (!k) throw Error(ErrorKind::Usage, "unknown metric '" + n + "'");
    if (is_agreement(*k) == ratings) {
      throw Error(ErrorKind::Usage, "metric '" + n + "' does not apply to " + (ratings ? "ratings" : "responses"));
    }
    out.push_back(*k);
  }
  if (out.empty()) {
    if (ratings) {
      if (has_human) out.push_back(MetricKind::ResidualCorrelation);
      out.push_back(MetricKind::ScoreCorrelation);
    } else {
      out = {MetricKind::AgreementBothWrong, MetricKind::AgreementEitherWrong, MetricKind::AgreementOverall};
    }
  }
  return out;
}

CorrelationMethod parse_method(const std::string& m) {
  return m == "spearman" ? CorrelationMethod::Spearman : CorrelationMethod::Pearson;
}

std::string short_name(MetricKind k) {
  switch (k) {
    case MetricKind::AgreementOverall: return "overall";
    case MetricKind::AgreementBothWrong: return "both_wrong";
    case MetricKind::AgreementEitherWrong: return "either_wrong";
    case MetricKind::ResidualCorrelation: return "residual";
    case MetricKind::ScoreCorrelation: return "score";
  }
  return "metric";
}

// ---- synth ---------------------------------------------------------------

struct SynthArgs {
  std::string spec;
  std::string preset;
};

void cmd_synth(const SynthArgs& a, const Common& c, std::ostream& out) {
  if (a.spec.empty() == a.preset.empty()) throw Error(ErrorKind::Usage, "give exactly one of --spec or --preset");
  Json j = a.spec.empty() ? Json{{"preset", a.preset}} : config::load_json(a.spec);
  if (c.seed_given) j["seed"] = c.seed;
  const config::SynthSpec spec = config::parse_synth_spec(j);
  Common effective = c;
  effective.seed = spec.kind == config::SynthKind::Responses ? spec.responses.seed : spec.ratings.seed;
  Output o("synth", effective);
  if (!a.spec.empty()) o.input(a.spec);

  if (spec.kind == config::SynthKind::Responses) {
    const ResponseDataset d = synthetic::generate_responses(spec.responses);
    if (o.json()) o.file("responses.jsonl", to_text([&](std::ostream& s) { io::write_responses_jsonl(s, d); }));
    else o.file("responses.csv", to_text([&](std::ostream& s) { io::write_responses(s, d); }));
    o.file("key.csv", to_text([&](std::ostream& s) { io::write_key(s, d); }));
    o.file("metadata.csv",
           to_text([&](std::ostream& s) { io::write_metadata(s, synthetic::ensemble_metadata(spec.responses)); }));
    o.table("expected_agreement", to_text([&](std::ostream& s) {
              csv::Writer w(s);
              w.row({"model_a", "model_b", "expected_both_wrong"});
              const auto& ms = spec.responses.models;
              for (std::size_t i = 0; i < ms.size(); ++i) {
                for (std::size_t k = i + 1; k < ms.size(); ++k) {
                  w.field(ms[i].id).field(ms[k].id);
                  w.field(synthetic::expected_conditional_agreement(ms[i], ms[k], spec.responses.choices));
                  w.end_row();
                }
              }
            }));
  } else {
    const RatingDataset r = synthetic::generate_ratings(spec.ratings);
    o.file("ratings.csv", to_text([&](std::ostream& s) { io::write_ratings(s, r); }));
    o.file("human.csv", to_text([&](std::ostream& s) { io::write_human(s, r); }));
    o.file("metadata.csv",
           to_text([&](std::ostream& s) { io::write_metadata(s, synthetic::rating_metadata(spec.ratings)); }));
    o.table("expected_residual_correlation", to_text([&](std::ostream& s) {
              csv::Writer w(s);
              w.row({"model_a", "model_b", "expected_residual_correlation"});
              const auto& ms = spec.ratings.models;
              for (std::size_t i = 0; i < ms.size(); ++i) {
                for (std::size_t k = i + 1; k < ms.size(); ++k) {
                  w.field(ms[i].id).field(ms[k].id).field(synthetic::expected_residual_correlation(ms[i], ms[k]));
                  w.end_row();
                }
              }
            }));
  }
  o.finish(config::to_json(spec), out);
}

// ---- correlate -----------------------------------------------------------

struct CorrelateArgs {
  DataArgs data;
  std::vector<std::string> metrics;
  std::string method = "pearson";
  double band = 0.03;
};

void cmd_correlate(const CorrelateArgs& a, const Common& c, std::ostream& out) {
  const bool ratings = rating_mode(a.data);
  Output o("correlate", c);
  Json cfg = data_json(a.data);
  std::vector<AgreementMatrix> mats;
  std::vector<std::optional<double>> baselines;
  if (ratings) {
    o.input(a.data.ratings);
    o.input(a.data.human);
    const RatingDataset r = io::load_ratings(a.data.ratings, a.data.human, {a.data.scale_lo, a.data.scale_hi});
    for (auto k : parse_metrics(a.metrics, true, r.has_human_labels())) {
      mats.push_back(rating_matrix(r, k, parse_method(a.method), c.threads));
      baselines.push_back(0.0);
    }
    cfg["method"] = a.method;
  } else {
    o.input(a.data.responses);
    o.input(a.data.key);
    const ResponseDataset d = io::load_responses(a.data.responses, a.data.key);
    const double base = random_error_baseline(d);
    for (auto k : parse_metrics(a.metrics, false, false)) {
      mats.push_back(agreement_matrix(d, k, c.threads));
      baselines.push_back(k == MetricKind::AgreementBothWrong ? std::optional<double>(base) : std::nullopt);
    }
  }
  cfg["metrics"] = Json::array();
  cfg["band"] = a.band;

  std::ostringstream summary;
  csv::Writer w(summary);
  w.row({"metric", "models", "defined_pairs", "undefined_pairs", "mean", "baseline", "fraction_above_baseline",
         "fraction_within_band"});
  for (std::size_t i = 0; i < mats.size(); ++i) {
    const auto& m = mats[i];
    const std::string name = short_name(m.kind);
    cfg["metrics"].push_back(name);
    o.table("matrix_" + name, to_text([&](std::ostream& s) { write_matrix_csv(s, m); }));
    const double lo = is_agreement(m.kind) ? 0.0 : -1.0;
    o.file("heatmap_" + name + ".svg", svg::heatmap(m.models, m.cells, std::string(to_string(m.kind)), lo, 1.0));
    const MatrixSummary s = summarize(m, baselines[i], a.band);
    w.field(std::string(to_string(m.kind))).field(m.size()).field(s.defined_pairs).field(s.undefined_pairs);
    if (s.defined_pairs > 0) w.field(s.mean);
    else w.empty();
    if (baselines[i]) {
      w.field(*baselines[i]).field(s.fraction_above_baseline).field(s.fraction_within_band);
    } else {
      w.empty().empty().empty();
    }
    w.end_row();
  }
  o.table("summary", summary.str());
  o.finish(cfg, out);
}

// ---- regress -------------------------------------------------------------

struct RegressArgs {
  DataArgs data;
  std::vector<std::string> metrics;
  std::vector<std::string> covariates;
  std::string method = "pearson";
};

void cmd_regress(const RegressArgs& a, const Common& c, std::ostream& out) {
  const bool ratings = rating_mode(a.data);
  if (a.data.metadata.empty()) throw Error(ErrorKind::Usage, "--metadata is required");
  Output o("regress", c);
  Json cfg = data_json(a.data);
  o.input(a.data.metadata);
  std::vector<std::string> warnings;
  const MetadataTable meta = io::load_metadata(a.data.metadata, &warnings);

  PairTableOptions opts;
  opts.seed = c.seed;
  opts.covariates = a.covariates;
  opts.method = parse_method(a.method);
  opts.threads = c.threads;

  std::vector<FitReport> reports;
  std::vector<PairTable> tables;
  std::optional<ResponseDataset> d;
  std::optional<RatingDataset> r;
  std::vector<MetricKind> kinds;
  if (ratings) {
    o.input(a.data.ratings);
    o.input(a.data.human);
    r = io::load_ratings(a.data.ratings, a.data.human, {a.data.scale_lo, a.data.scale_hi});
    kinds = parse_metrics(a.metrics, true, r->has_human_labels());
  } else {
    o.input(a.data.responses);
    o.input(a.data.key);
    d = io::load_responses(a.data.responses, a.data.key);
    kinds = parse_metrics(a.metrics, false, false);
  }
  cfg["metrics"] = Json::array();
  for (auto k : kinds) {
    opts.metric = k;
    PairTable t = ratings ? build_pair_table(*r, meta, opts) : build_pair_table(*d, meta, opts);
    const auto terms = default_terms(t);
    reports.push_back({std::string(to_string(k)), std::string(to_string(k)), fit_pair_table(t, terms)});
    o.table("pairs_" + short_name(k), to_text([&](std::ostream& s) { write_pair_table_csv(s, t); }));
    cfg["metrics"].push_back(short_name(k));
  }
  o.table("fit", to_text([&](std::ostream& s) { write_fit_csv(s, reports); }));
  o.file("fit.txt", to_text([&](std::ostream& s) {
           for (const auto& rep : reports) {
             write_fit_text(s, rep);
             s << "\n";
           }
         }));
  cfg["covariates"] = a.covariates;
  cfg["method"] = a.method;
  for (const auto& wmsg : warnings) out << "warning: " << wmsg << "\n";
  o.finish(cfg, out);
}

// ---- judge ---------------------------------------------------------------

struct JudgeArgs {
  DataArgs data;
  std::vector<std::string> judges;
  std::string grouping = "company";
};

void cmd_judge(const JudgeArgs& a, const Common& c, std::ostream& out) {
  if (rating_mode(a.data)) throw Error(ErrorKind::Usage, "judge requires --responses and --key");
  if (a.data.metadata.empty()) throw Error(ErrorKind::Usage, "--metadata is required");
  Output o("judge", c);
  o.input(a.data.responses);
  o.input(a.data.key);
  o.input(a.data.metadata);
  const ResponseDataset d = io::load_responses(a.data.responses, a.data.key);
  const MetadataTable meta = io::load_metadata(a.data.metadata);
  const Grouping g = a.grouping == "architecture" ? Grouping::Architecture : Grouping::Company;
  const std::vector<std::string> judges = a.judges.empty() ? group_max_judges(d, meta, g) : a.judges;

  std::vector<JudgeReport> reports;
  for (const auto& j : judges) reports.push_back(judge_report(d, meta, j, g));
  o.table("judge", to_text([&](std::ostream& s) { write_judge_csv(s, reports); }));

  std::ostringstream summary;
  csv::Writer w(summary);
  w.row({"judge", "judge_accuracy", "same_group_below", "mean_inflation_same_group", "other_below",
         "mean_inflation_other"});
  for (const auto& rep : reports) {
    const std::string stem = "judge_" + sanitize(rep.judge_id);
    o.table(stem, to_text([&](std::ostream& s) { write_judge_csv(s, {rep}); }));
    std::vector<svg::ScatterPoint> pts;
    for (const auto& row : rep.rows) {
      if (row.model_id == rep.judge_id) continue;
      pts.push_back({row.true_accuracy, row.inflation, row.model_id, row.same_group});
    }
    o.file(stem + ".svg", svg::scatter(pts, {"Judge: " + rep.judge_id, "true accuracy", "judged - true accuracy"},
                                       rep.judge_accuracy, g == Grouping::Company ? "same company" : "same architecture",
                                       "other"));
    const InflationSummary s = summarize_below_judge(rep);
    w.field(rep.judge_id).field(rep.judge_accuracy).field(s.same_group);
    if (s.same_group > 0) w.field(s.mean_same_group);
    else w.empty();
    w.field(s.other);
    if (s.other > 0) w.field(s.mean_other);
    else w.empty();
    w.end_row();
  }
  o.table("judge_summary", summary.str());
  Json cfg = data_json(a.data);
  cfg["judges"] = judges;
  cfg["grouping"] = a.grouping;
  o.finish(cfg, out);
}

// ---- market --------------------------------------------------------------

struct MarketArgs {
  std::string scenario;
  std::vector<std::string> methods;
  std::optional<std::size_t> firms, applicants, replicates, capacity, llm_sweep;
  std::optional<double> p;
  std::string budget, firm_pool, applicant_prefs, ratings, human, metadata, applicant_scores;
};

void cmd_market(const MarketArgs& a, const Common& c, std::ostream& out) {
  config::MarketScenario s;
  if (!a.scenario.empty()) {
    const std::string base = fs::path(a.scenario).parent_path().string();
    s = config::parse_market_scenario(config::load_json(a.scenario), base);
  } else {
    s = config::parse_market_scenario(Json::object());
  }
  auto& cfg = s.base;
  if (!a.methods.empty()) {
    s.methods.clear();
    for (const auto& m : a.methods) {
      const auto pm = market::preference_method_from_string(m);
      if (!pm) throw Error(ErrorKind::Usage, "unknown preference method '" + m + "'");
      s.methods.push_back(*pm);
    }
  }
  if (a.firms) cfg.firms = *a.firms;
  if (a.applicants) {
    cfg.applicant_count = *a.applicants;
    cfg.applicants.clear();
    s.applicants_mode.clear();
  }
  if (a.replicates) cfg.replicates = *a.replicates;
  if (a.capacity) cfg.capacity = *a.capacity;
  if (a.p) cfg.interview_fraction = *a.p;
  if (a.llm_sweep) s.llm_sweep_combinations = *a.llm_sweep;
  if (!a.budget.empty()) {
    cfg.budget = a.budget == "all_firms" ? market::BudgetRule::AllFirms : market::BudgetRule::Uniform1ToF;
  }
  if (!a.firm_pool.empty()) {
    cfg.firm_pool = a.firm_pool == "interviewed" ? market::FirmPool::Interviewed : market::FirmPool::AllApplicants;
  }
  if (!a.applicant_prefs.empty()) {
    cfg.applicant_preferences = a.applicant_prefs == "rating_file" ? market::ApplicantPreferenceSource::RatingFile
                                                                   : market::ApplicantPreferenceSource::UniformRandom;
  }
  if (!a.ratings.empty()) s.ratings_path = a.ratings;
  if (!a.human.empty()) s.human_path = a.human;
  if (!a.metadata.empty()) s.metadata_path = a.metadata;
  if (!a.applicant_scores.empty()) s.applicant_scores_path = a.applicant_scores;
  if (c.seed_given) cfg.seed = c.seed;
  Common effective = c;
  effective.seed = cfg.seed;

  Output o("market", effective);
  if (!a.scenario.empty()) o.input(a.scenario);
  std::optional<RatingDataset> ratings;
  std::optional<MetadataTable> meta;
  std::optional<market::ApplicantScores> ascores;
  if (!s.ratings_path.empty()) {
    o.input(s.ratings_path);
    o.input(s.human_path);
    ratings = io::load_ratings(s.ratings_path, s.human_path, s.scale);
    if (cfg.applicants.empty() && s.applicants_mode == "labeled") cfg.applicants = config::labeled_resumes(*ratings);
    if (cfg.jobs.empty() && s.jobs_mode == "labeled") cfg.jobs = config::labeled_jobs(*ratings);
  } else if (!s.human_path.empty()) {
    throw Error(ErrorKind::Usage, "human labels require a ratings file");
  }
  if (!s.metadata_path.empty()) {
    o.input(s.metadata_path);
    meta = io::load_metadata(s.metadata_path);
  }
  if (!s.applicant_scores_path.empty()) {
    o.input(s.applicant_scores_path);
    ascores = market::load_applicant_scores(s.applicant_scores_path);
  }
  market::MarketInputs in;
  in.ratings = ratings ? &*ratings : nullptr;
  in.meta = meta ? &*meta : nullptr;
  in.applicant_scores = ascores ? &*ascores : nullptr;

  std::vector<std::pair<std::string, market::MarketEnsembleResult>> results;
  for (auto m : s.methods) {
    market::MarketConfig k = cfg;
    k.method = m;
    results.emplace_back(std::string(market::to_string(m)), market::run_ensemble(k, in, c.threads));
  }

  o.table("summary", to_text([&](std::ostream& st) { market::write_summary_csv(st, results); }));
  o.table("exclusion_curve", to_text([&](std::ostream& st) { market::write_exclusion_curve_csv(st, results); }));
  std::vector<svg::Series> curves;
  for (const auto& [label, r] : results) {
    svg::Series se{label, {}, {}, {}};
    for (std::size_t n = 0; n < r.exclusion_by_firms.size(); ++n) {
      se.x.push_back(static_cast<double>(n + 1));
      se.y.push_back(r.exclusion_by_firms[n].mean);
      se.se.push_back(r.exclusion_by_firms[n].se);
    }
    curves.push_back(std::move(se));
  }
  o.file("exclusion_curve.svg",
         svg::line_chart(curves, {"Systemic exclusion by number of firms", "firms", "exclusion rate"}));

  {
    std::ostringstream st;
    csv::Writer w(st);
    w.row({"label", "avg_rank", "se"});
    std::vector<std::string> cats;
    svg::Series bars{"average applicant rank", {}, {}, {}};
    for (const auto& [label, r] : results) {
      if (r.avg_rank.n == 0) continue;
      w.field(label).field(r.avg_rank.mean).field(r.avg_rank.se);
      w.end_row();
      cats.push_back(label);
      bars.y.push_back(r.avg_rank.mean);
      bars.se.push_back(r.avg_rank.se);
    }
    o.table("avg_rank", st.str());
    o.file("avg_rank.svg", svg::bar_chart(cats, {bars}, {"Average applicant rank of match", "method", "rank"}));
  }

  const bool any_buckets = std::any_of(results.begin(), results.end(), [](const auto& r) { return !r.second.buckets.empty(); });
  if (any_buckets) {
    o.table("buckets", to_text([&](std::ostream& st) { market::write_buckets_csv(st, results); }));
    std::vector<svg::Series> lines;
    for (const auto& [label, r] : results) {
      svg::Series se{label, {}, {}, {}};
      for (const auto& b : r.buckets) {
        if (!b.probability) continue;
        se.x.push_back(b.bucket);
        se.y.push_back(*b.probability);
        se.se.push_back(b.se);
      }
      lines.push_back(std::move(se));
    }
    o.file("buckets.svg", svg::line_chart(lines, {"Match probability by human rating", "human rating bucket",
                                                  "match probability"}));
  }

  if (cfg.budget == market::BudgetRule::Uniform1ToF) {
    o.table("budget", to_text([&](std::ostream& st) { market::write_budget_csv(st, results); }));
    std::vector<svg::Series> lines;
    for (const auto& [label, r] : results) {
      svg::Series se{label, {}, {}, {}};
      for (const auto& b : r.by_budget) {
        if (!b.p_relative) continue;
        se.x.push_back(static_cast<double>(b.applications));
        se.y.push_back(*b.p_relative);
        se.se.push_back(b.p_relative_se);
      }
      lines.push_back(std::move(se));
    }
    o.file("budget.svg", svg::line_chart(lines, {"Relative match probability", "applications submitted",
                                                 "P(match | t) / P(match | 1)"}));
  }

  if (s.llm_sweep_combinations) {
    const auto pts = market::exclusion_by_llm_count(cfg, in, *s.llm_sweep_combinations, c.threads);
    o.table("llm_count", to_text([&](std::ostream& st) { market::write_llm_count_csv(st, pts); }));
    svg::Series se{"distinct models", {}, {}, {}};
    for (const auto& p : pts) {
      se.x.push_back(static_cast<double>(p.llms));
      se.y.push_back(p.exclusion.mean);
      se.se.push_back(p.exclusion.se);
    }
    o.file("llm_count.svg", svg::line_chart({se}, {"Systemic exclusion by number of models", "models in use",
                                                   "exclusion rate"}));
  }

  o.finish(config::to_json(s), out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Correlated model error analysis and hiring-market simulation", "mono"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Common common;

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic dataset with known correlation structure");
  s->add_option("--spec", synth.spec, "JSON dataset spec");
  s->add_option("--preset", synth.preset, "Built-in spec")
      ->check(CLI::IsMember({"independent", "accuracy_correlated", "company_ratings"}));
  add_common(s, common);

  CorrelateArgs corr;
  auto* co = app.add_subcommand("correlate", "Pairwise agreement or residual correlation matrices");
  add_data(co, corr.data, true);
  co->add_option("--metric", corr.metrics, "overall, both_wrong, either_wrong, residual, score (repeatable)");
  co->add_option("--method", corr.method, "Correlation method for ratings")
      ->check(CLI::IsMember({"pearson", "spearman"}));
  co->add_option("--band", corr.band, "Half-width of the near-baseline band");
  add_common(co, common);

  RegressArgs reg;
  auto* rg = app.add_subcommand("regress", "Pair-feature OLS regressions");
  add_data(rg, reg.data, true);
  rg->add_option("--metadata", reg.data.metadata, "Model metadata CSV");
  rg->add_option("--metric", reg.metrics, "Dependent metric (repeatable)");
  rg->add_option("--covariates", reg.covariates, "Covariates to include")->delimiter(',');
  rg->add_option("--method", reg.method, "Correlation method for ratings")
      ->check(CLI::IsMember({"pearson", "spearman"}));
  add_common(rg, common);

  JudgeArgs jd;
  auto* ju = app.add_subcommand("judge", "Judge-based accuracy inflation");
  add_data(ju, jd.data, false);
  ju->add_option("--metadata", jd.data.metadata, "Model metadata CSV");
  ju->add_option("--judge", jd.judges, "Judge model id (repeatable; default: best model per group)");
  ju->add_option("--grouping", jd.grouping, "Group definition")->check(CLI::IsMember({"company", "architecture"}));
  add_common(ju, common);

  MarketArgs mk;
  auto* ma = app.add_subcommand("market", "Hiring-market ensemble simulation");
  ma->add_option("--scenario", mk.scenario, "JSON scenario file");
  ma->add_option("--method", mk.methods, "same, company, latest, random, uniform (repeatable)");
  ma->add_option("--firms", mk.firms, "Number of firms");
  ma->add_option("--applicants", mk.applicants, "Number of anonymous applicants");
  ma->add_option("--p", mk.p, "Interview fraction");
  ma->add_option("--replicates", mk.replicates, "Markets per method");
  ma->add_option("--capacity", mk.capacity, "Seats per firm");
  ma->add_option("--budget", mk.budget, "Application budget rule")
      ->check(CLI::IsMember({"all_firms", "uniform_1_to_F"}));
  ma->add_option("--firm-pool", mk.firm_pool, "Applicants a firm may hire")
      ->check(CLI::IsMember({"all", "interviewed"}));
  ma->add_option("--applicant-preferences", mk.applicant_prefs, "Applicant preference source")
      ->check(CLI::IsMember({"uniform_random", "rating_file"}));
  ma->add_option("--ratings", mk.ratings, "Ratings CSV");
  ma->add_option("--human", mk.human, "Human label CSV");
  ma->add_option("--metadata", mk.metadata, "Model metadata CSV");
  ma->add_option("--applicant-scores", mk.applicant_scores, "Applicant-side firm scores CSV");
  ma->add_option("--llm-sweep", mk.llm_sweep, "Also sweep the number of distinct models (max subsets per count)");
  add_common(ma, common);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return 1;
  }

  try {
    if (*s) cmd_synth(synth, common, out);
    else if (*co) cmd_correlate(corr, common, out);
    else if (*rg) cmd_regress(reg, common, out);
    else if (*ju) cmd_judge(jd, common, out);
    else if (*ma) cmd_market(mk, common, out);
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    if (e.kind() == ErrorKind::Usage) {
      err << app.help();
      return 1;
    }
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace mono::cli
