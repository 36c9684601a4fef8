#include "mono/regression.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>

#include "mono/csv.hpp"
#include "mono/error.hpp"
#include "mono/parallel.hpp"
#include "mono/rng.hpp"

namespace mono {

bool PairTable::has_column(std::string_view name) const {
  return std::find(columns.begin(), columns.end(), name) != columns.end();
}

const std::vector<double>& PairTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return values[i];
  }
  throw Error(ErrorKind::MissingCovariate, "pair table has no column '" + std::string(name) + "'");
}

void PairTable::add_column(std::string name, std::vector<double> v) {
  if (v.size() != rows()) throw Error(ErrorKind::Usage, "column length mismatch for '" + name + "'");
  columns.push_back(std::move(name));
  values.push_back(std::move(v));
}

namespace {

enum class Cov {
  SameCompany,
  SameArchitecture,
  IsMoe1,
  IsMoe2,
  ParamsLog1,
  ParamsLog2,
  Generation1,
  Generation2,
  ParamDiff,
  Latest1,
  Latest2,
  Accuracy1,
  Accuracy2,
};

struct CovSpec {
  Cov cov;
  const char* name;
  bool numeric;
};

constexpr CovSpec kCovariates[] = {
    {Cov::SameCompany, "same_company", false},
    {Cov::SameArchitecture, "same_architecture", false},
    {Cov::IsMoe1, "is_moe_1", false},
    {Cov::IsMoe2, "is_moe_2", false},
    {Cov::ParamsLog1, "params_billions_log_1", true},
    {Cov::ParamsLog2, "params_billions_log_2", true},
    {Cov::Generation1, "generation_1", true},
    {Cov::Generation2, "generation_2", true},
    {Cov::ParamDiff, "param_diff", true},
    {Cov::Latest1, "latest_model_1", false},
    {Cov::Latest2, "latest_model_2", false},
    {Cov::Accuracy1, "accuracy_1", true},
    {Cov::Accuracy2, "accuracy_2", true},
};

const CovSpec& spec_for(std::string_view name) {
  for (const auto& s : kCovariates) {
    if (name == s.name) return s;
  }
  throw Error(ErrorKind::Usage, "unknown covariate '" + std::string(name) + "'");
}

struct ModelFacts {
  const ModelMeta* meta = nullptr;
  std::optional<double> accuracy;
};

std::optional<double> b2d(const std::optional<bool>& b) {
  if (!b) return std::nullopt;
  return *b ? 1.0 : 0.0;
}

std::optional<double> log_params(const ModelMeta* m) {
  if (!m || !m->params_billions) return std::nullopt;
  return std::log(*m->params_billions);
}

std::optional<double> covariate_value(Cov c, const ModelFacts& a, const ModelFacts& b) {
  const ModelMeta* ma = a.meta;
  const ModelMeta* mb = b.meta;
  switch (c) {
    case Cov::SameCompany:
      if (!ma || !mb || ma->company.empty() || mb->company.empty()) return std::nullopt;
      return ma->company == mb->company ? 1.0 : 0.0;
    case Cov::SameArchitecture:
      if (!ma || !mb || !ma->architecture || !mb->architecture) return std::nullopt;
      return *ma->architecture == *mb->architecture ? 1.0 : 0.0;
    case Cov::IsMoe1: return ma ? b2d(ma->is_moe) : std::nullopt;
    case Cov::IsMoe2: return mb ? b2d(mb->is_moe) : std::nullopt;
    case Cov::ParamsLog1: return log_params(ma);
    case Cov::ParamsLog2: return log_params(mb);
    case Cov::Generation1:
      if (!ma || !ma->generation) return std::nullopt;
      return static_cast<double>(*ma->generation);
    case Cov::Generation2:
      if (!mb || !mb->generation) return std::nullopt;
      return static_cast<double>(*mb->generation);
    case Cov::ParamDiff: {
      auto x = log_params(ma), y = log_params(mb);
      if (!x || !y) return std::nullopt;
      return std::abs(*x - *y);
    }
    case Cov::Latest1: return ma ? b2d(ma->latest_model) : std::nullopt;
    case Cov::Latest2: return mb ? b2d(mb->latest_model) : std::nullopt;
    case Cov::Accuracy1: return a.accuracy;
    case Cov::Accuracy2: return b.accuracy;
  }
  return std::nullopt;
}

bool field_present(Cov c, const ModelMeta& m) {
  switch (c) {
    case Cov::SameCompany: return !m.company.empty();
    case Cov::SameArchitecture: return m.architecture.has_value();
    case Cov::IsMoe1:
    case Cov::IsMoe2: return m.is_moe.has_value();
    case Cov::ParamsLog1:
    case Cov::ParamsLog2:
    case Cov::ParamDiff: return m.params_billions.has_value();
    case Cov::Generation1:
    case Cov::Generation2: return m.generation.has_value();
    case Cov::Latest1:
    case Cov::Latest2: return m.latest_model.has_value();
    case Cov::Accuracy1:
    case Cov::Accuracy2: return true;
  }
  return false;
}

using MetricFn = std::function<std::optional<double>(std::size_t, std::size_t)>;

PairTable build(const std::vector<std::string>& ids, const std::vector<ModelFacts>& facts, const MetadataTable& meta,
                const PairTableOptions& opts, bool rating_data, const MetricFn& metric) {
  const std::vector<std::string> covariates =
      opts.covariates.empty() ? available_covariates(ids, meta, rating_data) : opts.covariates;
  std::vector<const CovSpec*> specs;
  for (const auto& name : covariates) specs.push_back(&spec_for(name));

  const std::size_t n = ids.size();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

  std::vector<std::optional<double>> dep(pairs.size());
  parallel_for(pairs.size(), opts.threads, [&](std::size_t k) { dep[k] = metric(pairs[k].first, pairs[k].second); });

  PairTable t;
  t.metric = opts.metric;
  std::vector<std::vector<double>> cols(specs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (!dep[k]) {
      ++t.dropped_undefined;
      continue;
    }
    auto [i, j] = pairs[k];
    // Slot order depends only on the seed and the two ids, not on enumeration order.
    if (ids[j] < ids[i]) std::swap(i, j);
    Engine eng = make_engine(derive_seed(derive_seed(derive_seed(opts.seed, "pair-order"), ids[i]), ids[j]));
    if (uniform01(eng) < 0.5) std::swap(i, j);

    std::vector<double> row;
    bool complete = true;
    for (const auto* s : specs) {
      auto v = covariate_value(s->cov, facts[i], facts[j]);
      if (!v) {
        ++t.missing_by_covariate[s->name];
        complete = false;
        continue;
      }
      row.push_back(*v);
    }
    if (!complete) {
      ++t.dropped_missing;
      continue;
    }
    t.model_1.push_back(ids[i]);
    t.model_2.push_back(ids[j]);
    t.dependent.push_back(*dep[k]);
    for (std::size_t c = 0; c < specs.size(); ++c) cols[c].push_back(row[c]);
  }
  if (t.rows() == 0) {
    throw Error(ErrorKind::NoUsablePairs, "no model pair has a defined " + std::string(to_string(opts.metric)) +
                                              " and complete covariates (" + std::to_string(t.dropped_undefined) +
                                              " undefined, " + std::to_string(t.dropped_missing) +
                                              " missing covariates)");
  }
  for (std::size_t c = 0; c < specs.size(); ++c) {
    auto v = specs[c]->numeric ? stats::standardize(cols[c]) : std::move(cols[c]);
    t.add_column(specs[c]->name, std::move(v));
  }
  if (t.has_column("accuracy_1") && t.has_column("accuracy_2")) {
    const auto& a1 = t.column("accuracy_1");
    const auto& a2 = t.column("accuracy_2");
    std::vector<double> inter(t.rows());
    for (std::size_t r = 0; r < t.rows(); ++r) inter[r] = a1[r] * a2[r];
    t.add_column(kInteraction, std::move(inter));
  }
  return t;
}

}  // namespace

std::vector<std::string> available_covariates(const std::vector<std::string>& model_ids, const MetadataTable& meta,
                                              bool rating_data) {
  std::vector<std::string> out;
  for (const auto& s : kCovariates) {
    if (s.cov == Cov::Accuracy1 || s.cov == Cov::Accuracy2) {
      out.push_back(s.name);
      continue;
    }
    // Latest-model flags matter for rating markets; size/architecture
    // covariates only when the metadata carries them.
    if (!rating_data && (s.cov == Cov::Latest1 || s.cov == Cov::Latest2)) continue;
    bool any = false;
    for (const auto& id : model_ids) {
      if (const auto* m = meta.find(id); m && field_present(s.cov, *m)) any = true;
    }
    if (any) out.push_back(s.name);
  }
  return out;
}

PairTable build_pair_table(const ResponseDataset& d, const MetadataTable& meta, const PairTableOptions& opts) {
  if (!is_agreement(opts.metric)) {
    throw Error(ErrorKind::Usage, std::string(to_string(opts.metric)) + " is not defined on response data");
  }
  std::vector<ModelFacts> facts(d.model_count());
  for (std::size_t m = 0; m < d.model_count(); ++m) {
    facts[m].meta = meta.find(d.model_ids()[m]);
    facts[m].accuracy = model_accuracy(d, m);
  }
  return build(d.model_ids(), facts, meta, opts, false, [&](std::size_t i, std::size_t j) -> std::optional<double> {
    auto r = try_agreement(d, opts.metric, i, j);
    if (!r) return std::nullopt;
    return r->value;
  });
}

PairTable build_pair_table(const RatingDataset& r, const MetadataTable& meta, const PairTableOptions& opts) {
  if (opts.metric != MetricKind::ResidualCorrelation && opts.metric != MetricKind::ScoreCorrelation) {
    throw Error(ErrorKind::Usage, std::string(to_string(opts.metric)) + " is not defined on rating data");
  }
  std::vector<ModelFacts> facts(r.model_count());
  for (std::size_t m = 0; m < r.model_count(); ++m) {
    facts[m].meta = meta.find(r.model_ids()[m]);
    // The accuracy analog: the metadata's correlation with human scores when
    // recorded, otherwise the value measured on this dataset's labels.
    if (facts[m].meta && facts[m].meta->correlation_with_human_score) {
      facts[m].accuracy = facts[m].meta->correlation_with_human_score;
    } else {
      facts[m].accuracy = human_agreement(r, m);
    }
  }
  return build(r.model_ids(), facts, meta, opts, true, [&](std::size_t i, std::size_t j) -> std::optional<double> {
    auto v = try_rating_metric(r, opts.metric, i, j, opts.method);
    if (!v) return std::nullopt;
    return v->value;
  });
}

std::vector<std::string> default_terms(const PairTable& t) { return t.columns; }

stats::OlsFit fit_pair_table(const PairTable& t, const std::vector<std::string>& terms) {
  std::vector<std::string> names = {"Intercept"};
  std::vector<std::vector<double>> cols;
  for (const auto& term : terms) {
    if (t.has_column(term)) {
      cols.push_back(t.column(term));
    } else if (auto colon = term.find(':'); colon != std::string::npos) {
      const auto& a = t.column(term.substr(0, colon));
      const auto& b = t.column(term.substr(colon + 1));
      std::vector<double> v(t.rows());
      for (std::size_t r = 0; r < t.rows(); ++r) v[r] = a[r] * b[r];
      cols.push_back(std::move(v));
    } else {
      cols.push_back(t.column(term));  // throws MissingCovariate
    }
    names.push_back(term);
  }
  const std::size_t n = t.rows();
  const std::size_t p = names.size();
  std::vector<double> design(n * p);
  for (std::size_t r = 0; r < n; ++r) {
    design[r * p] = 1.0;
    for (std::size_t c = 1; c < p; ++c) design[r * p + c] = cols[c - 1][r];
  }
  return stats::ols(design, n, p, t.dependent, names, true);
}

void write_fit_csv(std::ostream& out, const std::vector<FitReport>& reports) {
  csv::Writer w(out);
  w.row({"model", "dependent", "term", "coef", "std_err", "t", "p_value", "ci_lower", "ci_upper", "n_obs",
         "r_squared"});
  for (const auto& rep : reports) {
    for (const auto& term : rep.fit.terms) {
      w.field(rep.title).field(rep.dependent).field(term.name).field(term.coef).field(term.std_err).field(term.t);
      w.field(term.p_value).field(term.ci_lower).field(term.ci_upper).field(rep.fit.observations);
      w.field(rep.fit.r_squared);
      w.end_row();
    }
  }
}

void write_fit_text(std::ostream& out, const FitReport& rep) {
  std::size_t width = 10;
  for (const auto& t : rep.fit.terms) width = std::max(width, t.name.size() + 2);
  char buf[256];
  out << rep.title << '\n';
  out << std::string(width, ' ');
  std::snprintf(buf, sizeof buf, "%12s %10s %10s %8s %10s %10s\n", "coef", "std err", "t", "P>|t|", "[0.025",
                "0.975]");
  out << buf;
  out << std::string(width + 66, '-') << '\n';
  for (const auto& t : rep.fit.terms) {
    out << t.name << std::string(width - t.name.size(), ' ');
    std::snprintf(buf, sizeof buf, "%12.4f %10.3f %10.3f %8.3f %10.3f %10.3f\n", t.coef, t.std_err, t.t, t.p_value,
                  t.ci_lower, t.ci_upper);
    out << buf;
  }
  out << std::string(width + 66, '-') << '\n';
  std::snprintf(buf, sizeof buf, "Dependent variable: %s. No. observations: %zu. R^2=%.3f.\n", rep.dependent.c_str(),
                rep.fit.observations, rep.fit.r_squared);
  out << buf;
}

void write_pair_table_csv(std::ostream& out, const PairTable& t) {
  csv::Writer w(out);
  w.field("model_1").field("model_2").field(to_string(t.metric));
  for (const auto& c : t.columns) w.field(c);
  w.end_row();
  for (std::size_t r = 0; r < t.rows(); ++r) {
    w.field(t.model_1[r]).field(t.model_2[r]).field(t.dependent[r]);
    for (const auto& v : t.values) w.field(v[r]);
    w.end_row();
  }
}

}  // namespace mono
