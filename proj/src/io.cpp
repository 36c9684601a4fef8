#include "mono/io.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "mono/csv.hpp"
#include "mono/error.hpp"

namespace mono::io {

namespace {

using nlohmann::json;

std::string at(const std::string& source, std::size_t line) { return source + ":" + std::to_string(line); }

std::size_t require_column(const csv::Table& t, std::string_view name) {
  if (auto c = t.column(name)) return *c;
  throw Error(ErrorKind::Parse, t.source + ": missing required column '" + std::string(name) + "'");
}

const std::string& field(const csv::Table& t, const csv::Row& r, std::size_t col) {
  if (r.fields.size() != t.header.size()) {
    throw Error(ErrorKind::Parse, at(t.source, r.line) + ": expected " + std::to_string(t.header.size()) +
                                      " fields, found " + std::to_string(r.fields.size()));
  }
  return r.fields[col];
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  return out;
}

struct KeyTable {
  std::vector<std::string> item_ids;
  std::vector<std::int8_t> key;
  std::vector<std::int8_t> choices;
  std::unordered_map<std::string, std::size_t> index;
};

KeyTable read_key(std::istream& in, const std::string& source) {
  const auto t = csv::read(in, source);
  const auto c_item = require_column(t, "item_id");
  const auto c_key = require_column(t, "correct_answer");
  const auto c_k = require_column(t, "num_choices");
  KeyTable kt;
  for (const auto& r : t.rows) {
    std::string item(csv::trim(field(t, r, c_item)));
    const auto k = csv::parse_int(field(t, r, c_k));
    if (!k) throw Error(ErrorKind::Parse, at(source, r.line) + ": num_choices is not an integer");
    if (*k < 2 || *k > 127) {
      throw Error(ErrorKind::Schema, at(source, r.line) + ": item '" + item + "' has num_choices " +
                                         std::to_string(*k) + " (need 2..127)");
    }
    const auto ans = parse_answer(field(t, r, c_key));
    if (!ans) throw Error(ErrorKind::Parse, at(source, r.line) + ": malformed correct_answer");
    if (*ans == kMissingAnswer) {
      throw Error(ErrorKind::Schema, at(source, r.line) + ": missing correct_answer for item '" + item + "'");
    }
    if (*ans >= *k) {
      throw Error(ErrorKind::Schema, at(source, r.line) + ": correct_answer " + std::to_string(*ans) +
                                         " >= num_choices " + std::to_string(*k) + " for item '" + item + "'");
    }
    if (!kt.index.emplace(item, kt.item_ids.size()).second) {
      throw Error(ErrorKind::Schema, at(source, r.line) + ": duplicate item '" + item + "' in key");
    }
    kt.item_ids.push_back(std::move(item));
    kt.key.push_back(static_cast<std::int8_t>(*ans));
    kt.choices.push_back(static_cast<std::int8_t>(*k));
  }
  if (kt.item_ids.empty()) throw Error(ErrorKind::EmptyDataset, source + ": answer key has no items");
  return kt;
}

// Accumulates (model, item, answer) cells in first-appearance model order.
class ResponseBuilder {
 public:
  explicit ResponseBuilder(KeyTable key) : key_(std::move(key)) {}

  void add(const std::string& where, const std::string& model, const std::string& item, int answer) {
    auto it = key_.index.find(item);
    if (it == key_.index.end()) throw Error(ErrorKind::Schema, where + ": unknown item id '" + item + "'");
    const std::size_t q = it->second;
    const int k = key_.choices[q];
    if (answer != kMissingAnswer && answer >= k) {
      throw Error(ErrorKind::Schema, where + ": answer " + std::to_string(answer) + " for cell (model '" + model +
                                         "', item '" + item + "') is outside [0, " + std::to_string(k) + ")");
    }
    auto [mit, inserted] = model_index_.emplace(model, models_.size());
    if (inserted) {
      models_.push_back(model);
      answers_.resize(answers_.size() + key_.item_ids.size(), kMissingAnswer);
      seen_.resize(seen_.size() + key_.item_ids.size(), false);
    }
    const std::size_t cell = mit->second * key_.item_ids.size() + q;
    if (seen_[cell]) {
      throw Error(ErrorKind::Schema, where + ": duplicate cell (model '" + model + "', item '" + item + "')");
    }
    seen_[cell] = true;
    answers_[cell] = static_cast<std::int8_t>(answer);
  }

  ResponseDataset finish(const std::string& source) {
    if (models_.empty()) throw Error(ErrorKind::EmptyDataset, source + ": no responses");
    return ResponseDataset(std::move(models_), std::move(key_.item_ids), std::move(answers_), std::move(key_.key),
                           std::move(key_.choices));
  }

 private:
  KeyTable key_;
  std::vector<std::string> models_;
  std::unordered_map<std::string, std::size_t> model_index_;
  std::vector<std::int8_t> answers_;
  std::vector<bool> seen_;
};

void read_responses_csv(std::istream& in, const std::string& source, ResponseBuilder& b) {
  const auto t = csv::read(in, source);
  const auto c_model = require_column(t, "model_id");
  const auto c_item = require_column(t, "item_id");
  const auto c_ans = require_column(t, "answer");
  for (const auto& r : t.rows) {
    const std::string model(csv::trim(field(t, r, c_model)));
    const std::string item(csv::trim(field(t, r, c_item)));
    if (model.empty()) throw Error(ErrorKind::Parse, at(source, r.line) + ": empty model_id");
    const auto ans = parse_answer(field(t, r, c_ans));
    if (!ans) {
      throw Error(ErrorKind::Parse, at(source, r.line) + ": malformed answer '" + r.fields[c_ans] + "'");
    }
    b.add(at(source, r.line), model, item, *ans);
  }
}

void read_responses_jsonl(std::istream& in, const std::string& source, ResponseBuilder& b) {
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (csv::trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::Parse, at(source, n) + ": invalid JSON (" + e.what() + ")");
    }
    if (!obj.is_object() || !obj.contains("model_id") || !obj.contains("item_id") || !obj.contains("answer")) {
      throw Error(ErrorKind::Parse, at(source, n) + ": expected object with model_id, item_id, answer");
    }
    auto id_of = [&](const json& v) -> std::string {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_number_integer()) return std::to_string(v.get<long long>());
      throw Error(ErrorKind::Parse, at(source, n) + ": ids must be strings or integers");
    };
    const auto& a = obj["answer"];
    std::optional<int> ans;
    if (a.is_null()) ans = kMissingAnswer;
    else if (a.is_number_integer()) {
      const auto v = a.get<long long>();
      if (v >= 0 && v <= 127) ans = static_cast<int>(v);
    } else if (a.is_string()) {
      ans = parse_answer(a.get<std::string>());
    }
    if (!ans) throw Error(ErrorKind::Parse, at(source, n) + ": malformed answer");
    b.add(at(source, n), id_of(obj["model_id"]), id_of(obj["item_id"]), *ans);
  }
}

}  // namespace

std::optional<int> parse_answer(std::string_view raw) {
  const auto s = csv::trim(raw);
  if (s.empty() || s == "NA" || s == "na" || s == "null" || s == "-") return kMissingAnswer;
  if (s.size() == 1 && s[0] >= 'A' && s[0] <= 'J') return s[0] - 'A';
  if (s.size() == 1 && s[0] >= 'a' && s[0] <= 'j') return s[0] - 'a';
  const auto v = csv::parse_int(s);
  if (!v || *v < 0 || *v > 127) return std::nullopt;
  return static_cast<int>(*v);
}

ResponseFormat response_format_from_path(const std::string& path) {
  auto ends_with = [&](std::string_view suffix) {
    return path.size() >= suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  return ends_with(".jsonl") || ends_with(".ndjson") ? ResponseFormat::Jsonl : ResponseFormat::Csv;
}

ResponseDataset read_responses(std::istream& responses, std::istream& key, ResponseFormat format,
                               const std::string& source, const std::string& key_source) {
  ResponseBuilder b(read_key(key, key_source));
  if (format == ResponseFormat::Csv) read_responses_csv(responses, source, b);
  else read_responses_jsonl(responses, source, b);
  return b.finish(source);
}

ResponseDataset load_responses(const std::string& responses_path, const std::string& key_path,
                               ResponseFormat format) {
  auto r = open_in(responses_path);
  auto k = open_in(key_path);
  return read_responses(r, k, format, responses_path, key_path);
}

ResponseDataset load_responses(const std::string& responses_path, const std::string& key_path) {
  return load_responses(responses_path, key_path, response_format_from_path(responses_path));
}

void write_responses(std::ostream& out, const ResponseDataset& d) {
  csv::Writer w(out);
  w.row({"model_id", "item_id", "answer"});
  for (std::size_t m = 0; m < d.model_count(); ++m) {
    for (std::size_t q = 0; q < d.item_count(); ++q) {
      w.field(d.model_ids()[m]).field(d.item_ids()[q]);
      const auto a = d.answer(m, q);
      if (a == kMissingAnswer) w.empty();
      else w.field(static_cast<int>(a));
      w.end_row();
    }
  }
}

void write_responses_jsonl(std::ostream& out, const ResponseDataset& d) {
  for (std::size_t m = 0; m < d.model_count(); ++m) {
    for (std::size_t q = 0; q < d.item_count(); ++q) {
      json obj = json::object();
      obj["model_id"] = d.model_ids()[m];
      obj["item_id"] = d.item_ids()[q];
      const auto a = d.answer(m, q);
      obj["answer"] = a == kMissingAnswer ? json(nullptr) : json(static_cast<int>(a));
      out << obj.dump() << '\n';
    }
  }
}

void write_key(std::ostream& out, const ResponseDataset& d) {
  csv::Writer w(out);
  w.row({"item_id", "correct_answer", "num_choices"});
  for (std::size_t q = 0; q < d.item_count(); ++q) {
    w.field(d.item_ids()[q]).field(static_cast<int>(d.answer_key()[q])).field(static_cast<int>(d.choice_counts()[q]));
    w.end_row();
  }
}

void save_responses(const ResponseDataset& d, const std::string& responses_path, const std::string& key_path) {
  {
    auto out = open_out(responses_path);
    if (response_format_from_path(responses_path) == ResponseFormat::Jsonl) write_responses_jsonl(out, d);
    else write_responses(out, d);
  }
  auto out = open_out(key_path);
  write_key(out, d);
}

RatingDataset read_ratings(std::istream& ratings, std::istream* human, ScoreScale scale, const std::string& source,
                           const std::string& human_source) {
  const auto t = csv::read(ratings, source);
  const auto c_model = require_column(t, "model_id");
  const auto c_resume = require_column(t, "resume_id");
  const auto c_job = require_column(t, "job_id");
  const auto c_score = require_column(t, "score");

  auto parse_score = [&](const std::string& src, const csv::Row& r, const std::string& raw) {
    const auto s = csv::trim(raw);
    if (s.empty() || s == "NA" || s == "na") return kMissingScore;
    const auto v = csv::parse_double(s);
    if (!v) throw Error(ErrorKind::Parse, at(src, r.line) + ": malformed score '" + raw + "'");
    if (*v < scale.lo || *v > scale.hi) {
      throw Error(ErrorKind::Schema, at(src, r.line) + ": score " + csv::format_double(*v) + " outside [" +
                                         csv::format_double(scale.lo) + ", " + csv::format_double(scale.hi) + "]");
    }
    return *v;
  };

  struct Cell {
    std::size_t model, pair;
    double score;
    std::size_t line;
  };
  std::vector<std::string> models;
  std::unordered_map<std::string, std::size_t> model_index;
  std::vector<RatingPair> pairs;
  std::map<RatingPair, std::size_t> pair_index;
  std::vector<Cell> cells;
  for (const auto& r : t.rows) {
    std::string model(csv::trim(field(t, r, c_model)));
    RatingPair p{std::string(csv::trim(field(t, r, c_resume))), std::string(csv::trim(field(t, r, c_job)))};
    if (model.empty() || p.resume_id.empty() || p.job_id.empty()) {
      throw Error(ErrorKind::Parse, at(source, r.line) + ": empty identifier");
    }
    const double s = parse_score(source, r, r.fields[c_score]);
    auto [mit, mnew] = model_index.emplace(model, models.size());
    if (mnew) models.push_back(model);
    auto [pit, pnew] = pair_index.emplace(p, pairs.size());
    if (pnew) pairs.push_back(p);
    cells.push_back({mit->second, pit->second, s, r.line});
  }
  if (models.empty()) throw Error(ErrorKind::EmptyDataset, source + ": no ratings");

  const std::size_t P = pairs.size();
  std::vector<double> scores(models.size() * P, kMissingScore);
  std::vector<bool> seen(models.size() * P, false);
  for (const auto& c : cells) {
    const std::size_t idx = c.model * P + c.pair;
    if (seen[idx]) {
      throw Error(ErrorKind::Schema, at(source, c.line) + ": duplicate cell (model '" + models[c.model] + "', pair (" +
                                         pairs[c.pair].resume_id + ", " + pairs[c.pair].job_id + "))");
    }
    seen[idx] = true;
    scores[idx] = c.score;
  }

  std::vector<double> human_scores;
  if (human) {
    const auto h = csv::read(*human, human_source);
    const auto h_resume = require_column(h, "resume_id");
    const auto h_job = require_column(h, "job_id");
    const auto h_score = require_column(h, "score");
    human_scores.assign(P, kMissingScore);
    std::vector<bool> hseen(P, false);
    for (const auto& r : h.rows) {
      RatingPair p{std::string(csv::trim(field(h, r, h_resume))), std::string(csv::trim(field(h, r, h_job)))};
      auto it = pair_index.find(p);
      if (it == pair_index.end()) {
        throw Error(ErrorKind::Schema, at(human_source, r.line) + ": labeled pair (" + p.resume_id + ", " +
                                           p.job_id + ") not present in ratings");
      }
      if (hseen[it->second]) {
        throw Error(ErrorKind::Schema, at(human_source, r.line) + ": duplicate human label");
      }
      hseen[it->second] = true;
      human_scores[it->second] = parse_score(human_source, r, r.fields[h_score]);
    }
  }
  return RatingDataset(std::move(models), std::move(pairs), std::move(scores), std::move(human_scores), scale);
}

RatingDataset load_ratings(const std::string& ratings_path, const std::string& human_path, ScoreScale scale) {
  auto r = open_in(ratings_path);
  if (human_path.empty()) return read_ratings(r, nullptr, scale, ratings_path);
  auto h = open_in(human_path);
  return read_ratings(r, &h, scale, ratings_path, human_path);
}

void write_ratings(std::ostream& out, const RatingDataset& r) {
  csv::Writer w(out);
  w.row({"model_id", "resume_id", "job_id", "score"});
  for (std::size_t m = 0; m < r.model_count(); ++m) {
    for (std::size_t p = 0; p < r.pair_count(); ++p) {
      w.field(r.model_ids()[m]).field(r.pairs()[p].resume_id).field(r.pairs()[p].job_id).field(r.score(m, p));
      w.end_row();
    }
  }
}

void write_human(std::ostream& out, const RatingDataset& r) {
  csv::Writer w(out);
  w.row({"resume_id", "job_id", "score"});
  for (std::size_t p = 0; p < r.pair_count(); ++p) {
    if (is_missing(r.human(p))) continue;
    w.field(r.pairs()[p].resume_id).field(r.pairs()[p].job_id).field(r.human(p));
    w.end_row();
  }
}

void save_ratings(const RatingDataset& r, const std::string& ratings_path, const std::string& human_path) {
  {
    auto out = open_out(ratings_path);
    write_ratings(out, r);
  }
  if (!human_path.empty() && r.has_human_labels()) {
    auto out = open_out(human_path);
    write_human(out, r);
  }
}

MetadataTable read_metadata(std::istream& in, const std::string& source, std::vector<std::string>* warnings) {
  const auto t = csv::read(in, source);
  auto c_model = t.column("model_id");
  if (!c_model) c_model = t.column("model");
  if (!c_model) throw Error(ErrorKind::Parse, source + ": missing required column 'model_id'");
  const auto c_company = require_column(t, "company");
  const auto c_arch = t.column("architecture");
  const auto c_params = t.column("params_billions");
  const auto c_gen = t.column("generation");
  const auto c_moe = t.column("is_moe");
  const auto c_latest = t.column("latest_model");
  const auto c_corr = t.column("correlation_with_human_score");

  static const std::vector<std::string> known = {"model_id",   "model",  "company",      "architecture",
                                                 "params_billions", "generation", "is_moe", "latest_model",
                                                 "correlation_with_human_score"};
  if (warnings) {
    for (const auto& h : t.header) {
      if (std::find(known.begin(), known.end(), h) == known.end()) {
        warnings->push_back(source + ": ignoring unknown column '" + h + "'");
      }
    }
  }

  std::vector<ModelMeta> rows;
  for (const auto& r : t.rows) {
    ModelMeta m;
    m.model_id = std::string(csv::trim(field(t, r, *c_model)));
    m.company = std::string(csv::trim(field(t, r, c_company)));
    auto opt = [&](std::optional<std::size_t> c) -> std::optional<std::string_view> {
      if (!c) return std::nullopt;
      const auto v = csv::trim(r.fields[*c]);
      if (v.empty()) return std::nullopt;
      return v;
    };
    auto bad = [&](std::string_view col) {
      return Error(ErrorKind::Parse, at(source, r.line) + ": malformed " + std::string(col));
    };
    if (auto v = opt(c_arch)) m.architecture = std::string(*v);
    if (auto v = opt(c_params)) {
      m.params_billions = csv::parse_double(*v);
      if (!m.params_billions) throw bad("params_billions");
    }
    if (auto v = opt(c_gen)) {
      auto g = csv::parse_int(*v);
      if (!g) {
        // Tolerate "3.0" style integers from spreadsheet exports.
        auto d = csv::parse_double(*v);
        if (!d || *d != static_cast<double>(static_cast<long long>(*d))) throw bad("generation");
        g = static_cast<long long>(*d);
      }
      m.generation = static_cast<int>(*g);
    }
    if (auto v = opt(c_moe)) {
      m.is_moe = csv::parse_bool(*v);
      if (!m.is_moe) throw bad("is_moe");
    }
    if (auto v = opt(c_latest)) {
      m.latest_model = csv::parse_bool(*v);
      if (!m.latest_model) throw bad("latest_model");
    }
    if (auto v = opt(c_corr)) {
      m.correlation_with_human_score = csv::parse_double(*v);
      if (!m.correlation_with_human_score) throw bad("correlation_with_human_score");
    }
    rows.push_back(std::move(m));
  }
  return MetadataTable(std::move(rows));
}

MetadataTable load_metadata(const std::string& path, std::vector<std::string>* warnings) {
  auto in = open_in(path);
  return read_metadata(in, path, warnings);
}

void write_metadata(std::ostream& out, const MetadataTable& meta) {
  csv::Writer w(out);
  w.row({"model_id", "company", "architecture", "params_billions", "generation", "is_moe", "latest_model",
         "correlation_with_human_score"});
  auto b = [](const std::optional<bool>& v) -> std::string_view {
    if (!v) return "";
    return *v ? "True" : "False";
  };
  for (const auto& m : meta.rows()) {
    w.field(m.model_id).field(m.company).field(m.architecture.value_or(""));
    if (m.params_billions) w.field(*m.params_billions);
    else w.empty();
    if (m.generation) w.field(*m.generation);
    else w.empty();
    w.field(b(m.is_moe)).field(b(m.latest_model));
    if (m.correlation_with_human_score) w.field(*m.correlation_with_human_score);
    else w.empty();
    w.end_row();
  }
}

void save_metadata(const MetadataTable& meta, const std::string& path) {
  auto out = open_out(path);
  write_metadata(out, meta);
}

}  // namespace mono::io
