#pragma once

// Dataset file formats.
//
//   responses CSV   model_id,item_id,answer          (answer: 0-based index, A-J, or blank)
//   responses JSONL {"model_id": .., "item_id": .., "answer": 2 | "C" | null}
//   key CSV         item_id,correct_answer,num_choices
//   ratings CSV     model_id,resume_id,job_id,score  (blank score = missing)
//   human CSV       resume_id,job_id,score
//   metadata CSV    model_id,company,architecture,params_billions,generation,
//                   is_moe,latest_model,correlation_with_human_score
//
// The save functions write the canonical form: every cell of the grid in
// dataset order, missing values as blank fields. Loading a canonical file and
// saving it again reproduces it byte for byte.

#include <iosfwd>
#include <string>
#include <vector>

#include "mono/dataset.hpp"

namespace mono::io {

enum class ResponseFormat { Csv, Jsonl };

ResponseFormat response_format_from_path(const std::string& path);

ResponseDataset load_responses(const std::string& responses_path, const std::string& key_path,
                               ResponseFormat format);
ResponseDataset load_responses(const std::string& responses_path, const std::string& key_path);

/// Stream variants; `source` names the input in error messages.
ResponseDataset read_responses(std::istream& responses, std::istream& key, ResponseFormat format,
                               const std::string& source = "responses", const std::string& key_source = "key");

void write_responses(std::ostream& out, const ResponseDataset& d);
void write_responses_jsonl(std::ostream& out, const ResponseDataset& d);
void write_key(std::ostream& out, const ResponseDataset& d);
void save_responses(const ResponseDataset& d, const std::string& responses_path, const std::string& key_path);

/// `human_path` may be empty (no labels).
RatingDataset load_ratings(const std::string& ratings_path, const std::string& human_path, ScoreScale scale = {});
RatingDataset read_ratings(std::istream& ratings, std::istream* human, ScoreScale scale = {},
                           const std::string& source = "ratings", const std::string& human_source = "human");

void write_ratings(std::ostream& out, const RatingDataset& r);
void write_human(std::ostream& out, const RatingDataset& r);
void save_ratings(const RatingDataset& r, const std::string& ratings_path, const std::string& human_path);

/// Unknown columns and other non-fatal issues are appended to `warnings`.
MetadataTable load_metadata(const std::string& path, std::vector<std::string>* warnings = nullptr);
MetadataTable read_metadata(std::istream& in, const std::string& source = "metadata",
                            std::vector<std::string>* warnings = nullptr);
void write_metadata(std::ostream& out, const MetadataTable& meta);
void save_metadata(const MetadataTable& meta, const std::string& path);

/// Maps "2" -> 2, "C" -> 2, blank/NA -> kMissingAnswer; nullopt when malformed.
std::optional<int> parse_answer(std::string_view field);

}  // namespace mono::io
