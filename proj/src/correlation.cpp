#include "mono/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "mono/csv.hpp"
#include "mono/error.hpp"
#include "mono/parallel.hpp"

namespace mono {

std::string_view to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::AgreementOverall: return "agreement_overall";
    case MetricKind::AgreementBothWrong: return "agreement_both_wrong";
    case MetricKind::AgreementEitherWrong: return "agreement_either_wrong";
    case MetricKind::ResidualCorrelation: return "residual_correlation";
    case MetricKind::ScoreCorrelation: return "score_correlation";
  }
  return "unknown";
}

std::optional<MetricKind> metric_kind_from_string(std::string_view s) {
  for (auto k : {MetricKind::AgreementOverall, MetricKind::AgreementBothWrong, MetricKind::AgreementEitherWrong,
                 MetricKind::ResidualCorrelation, MetricKind::ScoreCorrelation}) {
    if (s == to_string(k)) return k;
  }
  if (s == "overall") return MetricKind::AgreementOverall;
  if (s == "both_wrong") return MetricKind::AgreementBothWrong;
  if (s == "either_wrong") return MetricKind::AgreementEitherWrong;
  if (s == "residual") return MetricKind::ResidualCorrelation;
  if (s == "score" || s == "correlation") return MetricKind::ScoreCorrelation;
  return std::nullopt;
}

bool is_agreement(MetricKind kind) {
  return kind == MetricKind::AgreementOverall || kind == MetricKind::AgreementBothWrong ||
         kind == MetricKind::AgreementEitherWrong;
}

namespace {

PairMetric make(const std::string& a, const std::string& b, MetricKind kind, std::int64_t hits, std::int64_t support) {
  return PairMetric{a, b, kind, static_cast<double>(hits) / static_cast<double>(support), support};
}

}  // namespace

std::optional<PairMetric> try_agreement(const ResponseDataset& d, MetricKind kind, std::size_t i, std::size_t j) {
  const auto c = kernels::pair_counts(d.row(i), d.row(j), d.answer_key());
  const auto& a = d.model_ids()[i];
  const auto& b = d.model_ids()[j];
  switch (kind) {
    case MetricKind::AgreementOverall:
      return make(a, b, kind, c.agree(), c.items);
    case MetricKind::AgreementBothWrong:
      if (c.both_wrong == 0) return std::nullopt;
      return make(a, b, kind, c.both_wrong_agree, c.both_wrong);
    case MetricKind::AgreementEitherWrong:
      if (c.either_wrong() == 0) return std::nullopt;
      return make(a, b, kind, c.either_wrong_agree(), c.either_wrong());
    default:
      throw Error(ErrorKind::Usage, std::string(to_string(kind)) + " is not defined on response data");
  }
}

PairMetric agreement_overall(const ResponseDataset& d, std::string_view m1, std::string_view m2) {
  return *try_agreement(d, MetricKind::AgreementOverall, d.model_index(m1), d.model_index(m2));
}

PairMetric agreement_both_wrong(const ResponseDataset& d, std::string_view m1, std::string_view m2) {
  auto r = try_agreement(d, MetricKind::AgreementBothWrong, d.model_index(m1), d.model_index(m2));
  if (!r) {
    throw Error(ErrorKind::NoJointErrors,
                "models '" + std::string(m1) + "' and '" + std::string(m2) + "' are never wrong on the same item");
  }
  return *r;
}

PairMetric agreement_either_wrong(const ResponseDataset& d, std::string_view m1, std::string_view m2) {
  auto r = try_agreement(d, MetricKind::AgreementEitherWrong, d.model_index(m1), d.model_index(m2));
  if (!r) {
    throw Error(ErrorKind::NoErrors, "models '" + std::string(m1) + "' and '" + std::string(m2) + "' make no errors");
  }
  return *r;
}

double random_error_baseline(const std::map<int, double>& choice_fractions) {
  double total = 0.0;
  for (auto [k, p] : choice_fractions) {
    if (k < 2) throw Error(ErrorKind::Schema, "choice count below 2 in baseline");
    total += p / static_cast<double>(k - 1);
  }
  return total;
}

double random_error_baseline(const ResponseDataset& d) { return random_error_baseline(d.choice_count_histogram()); }

double pearson(std::span<const double> x, std::span<const double> y, std::int64_t* support) {
  const auto m = kernels::masked_moments(x, y);
  if (support) *support = m.n;
  if (m.n < 2) throw Error(ErrorKind::InsufficientSupport, "fewer than 2 jointly observed values");
  const double n = static_cast<double>(m.n);
  const double vx = m.sxx - m.sx * m.sx / n;
  const double vy = m.syy - m.sy * m.sy / n;
  const double cxy = m.sxy - m.sx * m.sy / n;
  // Relative threshold: one-pass sums leave rounding residue on constant input.
  const double eps = 1e-12;
  if (vx <= eps * std::max(1.0, m.sxx) || vy <= eps * std::max(1.0, m.syy)) {
    throw Error(ErrorKind::ZeroVariance, "a correlated series has zero variance");
  }
  return std::clamp(cxy / std::sqrt(vx * vy), -1.0, 1.0);
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y, std::int64_t* support) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (is_missing(x[i]) || is_missing(y[i])) continue;
    xs.push_back(x[i]);
    ys.push_back(y[i]);
  }
  if (support) *support = static_cast<std::int64_t>(xs.size());
  if (xs.size() < 2) throw Error(ErrorKind::InsufficientSupport, "fewer than 2 jointly observed values");
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  return pearson(rx, ry);
}

namespace {

std::vector<double> residuals(const RatingDataset& r, std::size_t m) {
  std::vector<double> out(r.pair_count(), kMissingScore);
  for (std::size_t p = 0; p < r.pair_count(); ++p) {
    const double h = r.human(p);
    const double s = r.score(m, p);
    if (!is_missing(h) && !is_missing(s)) out[p] = s - h;
  }
  return out;
}

double correlate(std::span<const double> x, std::span<const double> y, CorrelationMethod method,
                 std::int64_t* support) {
  return method == CorrelationMethod::Pearson ? pearson(x, y, support) : spearman(x, y, support);
}

}  // namespace

PairMetric residual_correlation(const RatingDataset& r, std::string_view m1, std::string_view m2,
                                CorrelationMethod method) {
  const auto i = r.model_index(m1);
  const auto j = r.model_index(m2);
  if (!r.has_human_labels()) throw Error(ErrorKind::InsufficientSupport, "rating dataset has no human labels");
  const auto x = residuals(r, i);
  const auto y = residuals(r, j);
  PairMetric pm{r.model_ids()[i], r.model_ids()[j], MetricKind::ResidualCorrelation, 0.0, 0};
  pm.value = correlate(x, y, method, &pm.support);
  return pm;
}

PairMetric score_correlation(const RatingDataset& r, std::string_view m1, std::string_view m2,
                             CorrelationMethod method) {
  const auto i = r.model_index(m1);
  const auto j = r.model_index(m2);
  PairMetric pm{r.model_ids()[i], r.model_ids()[j], MetricKind::ScoreCorrelation, 0.0, 0};
  pm.value = correlate(r.row(i), r.row(j), method, &pm.support);
  return pm;
}

std::optional<PairMetric> try_rating_metric(const RatingDataset& r, MetricKind kind, std::size_t i, std::size_t j,
                                            CorrelationMethod method) {
  try {
    if (kind == MetricKind::ResidualCorrelation) {
      return residual_correlation(r, r.model_ids()[i], r.model_ids()[j], method);
    }
    if (kind == MetricKind::ScoreCorrelation) return score_correlation(r, r.model_ids()[i], r.model_ids()[j], method);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InsufficientSupport || e.kind() == ErrorKind::ZeroVariance) return std::nullopt;
    throw;
  }
  throw Error(ErrorKind::Usage, std::string(to_string(kind)) + " is not defined on rating data");
}

std::optional<double> human_agreement(const RatingDataset& r, std::size_t model) {
  if (!r.has_human_labels()) return std::nullopt;
  try {
    return pearson(r.row(model), r.human_scores());
  } catch (const Error&) {
    return std::nullopt;
  }
}

namespace {

template <typename CellFn>
AgreementMatrix build_matrix(MetricKind kind, const std::vector<std::string>& ids, std::vector<double> keys,
                             unsigned threads, CellFn&& cell) {
  const std::size_t n = ids.size();
  if (n < 2) throw Error(ErrorKind::InsufficientSupport, "matrix needs at least 2 models");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (keys[a] != keys[b]) return keys[a] < keys[b];
    return ids[a] < ids[b];
  });
  AgreementMatrix m;
  m.kind = kind;
  for (auto i : order) {
    m.models.push_back(ids[i]);
    m.sort_key.push_back(keys[i]);
  }
  m.cells.assign(n * n, std::nullopt);
  for (std::size_t i = 0; i < n; ++i) m.cells[i * n + i] = 1.0;

  std::vector<std::pair<std::size_t, std::size_t>> tasks;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) tasks.emplace_back(i, j);
  parallel_for(tasks.size(), threads, [&](std::size_t t) {
    const auto [i, j] = tasks[t];
    if (auto v = cell(order[i], order[j])) {
      m.cells[i * n + j] = *v;
      m.cells[j * n + i] = *v;
    }
  });
  return m;
}

}  // namespace

AgreementMatrix agreement_matrix(const ResponseDataset& d, MetricKind kind, unsigned threads) {
  if (!is_agreement(kind)) throw Error(ErrorKind::Usage, "agreement matrix needs an agreement metric");
  std::vector<double> acc(d.model_count());
  for (std::size_t m = 0; m < d.model_count(); ++m) acc[m] = model_accuracy(d, m);
  return build_matrix(kind, d.model_ids(), std::move(acc), threads,
                      [&](std::size_t a, std::size_t b) -> std::optional<double> {
                        auto r = try_agreement(d, kind, a, b);
                        if (!r) return std::nullopt;
                        return r->value;
                      });
}

AgreementMatrix rating_matrix(const RatingDataset& r, MetricKind kind, CorrelationMethod method, unsigned threads) {
  if (kind != MetricKind::ResidualCorrelation && kind != MetricKind::ScoreCorrelation) {
    throw Error(ErrorKind::Usage, "rating matrix needs residual_correlation or score_correlation");
  }
  std::vector<double> keys(r.model_count());
  for (std::size_t m = 0; m < r.model_count(); ++m) {
    keys[m] = human_agreement(r, m).value_or(-2.0);
  }
  return build_matrix(kind, r.model_ids(), std::move(keys), threads,
                      [&](std::size_t a, std::size_t b) -> std::optional<double> {
                        auto v = try_rating_metric(r, kind, a, b, method);
                        if (!v) return std::nullopt;
                        return v->value;
                      });
}

MatrixSummary summarize(const AgreementMatrix& m, std::optional<double> baseline, double band) {
  MatrixSummary s;
  double total = 0.0;
  std::size_t above = 0, within = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      const auto& c = m.at(i, j);
      if (!c) {
        ++s.undefined_pairs;
        continue;
      }
      ++s.defined_pairs;
      total += *c;
      if (baseline) {
        above += *c > *baseline;
        within += std::abs(*c - *baseline) <= band;
      }
    }
  }
  if (s.defined_pairs > 0) {
    const double n = static_cast<double>(s.defined_pairs);
    s.mean = total / n;
    s.fraction_above_baseline = static_cast<double>(above) / n;
    s.fraction_within_band = static_cast<double>(within) / n;
  }
  return s;
}

void write_matrix_csv(std::ostream& out, const AgreementMatrix& m) {
  csv::Writer w(out);
  w.field("model_id");
  for (const auto& id : m.models) w.field(id);
  w.end_row();
  for (std::size_t i = 0; i < m.size(); ++i) {
    w.field(m.models[i]);
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (const auto& c = m.at(i, j)) w.field(*c);
      else w.empty();
    }
    w.end_row();
  }
}

}  // namespace mono
