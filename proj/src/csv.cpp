#include "mono/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mono/error.hpp"

namespace mono::csv {

std::optional<std::size_t> Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

Table read(std::istream& in, std::string source) {
  Table t;
  t.source = std::move(source);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  std::vector<Row> rows;
  Row current;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  current.line = 1;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    const bool blank = current.fields.size() == 1 && trim(current.fields[0]).empty();
    if (!blank) rows.push_back(std::move(current));
    current = Row{};
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field_started && field.empty()) {
          in_quotes = true;
          field_started = true;
        } else {
          field.push_back(c);
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        ++line;
        current.line = line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) {
    throw Error(ErrorKind::Parse, t.source + ":" + std::to_string(current.line) + ": unterminated quoted field");
  }
  if (!field.empty() || !current.fields.empty()) end_row();

  if (rows.empty()) return t;
  t.header = std::move(rows.front().fields);
  for (auto& h : t.header) h = std::string(trim(h));
  // A trailing comma in the header yields an empty final column; drop it.
  while (!t.header.empty() && t.header.back().empty()) t.header.pop_back();
  rows.erase(rows.begin());
  for (auto& r : rows) {
    while (r.fields.size() > t.header.size() && trim(r.fields.back()).empty()) r.fields.pop_back();
  }
  t.rows = std::move(rows);
  return t;
}

Table read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  return read(in, path);
}

std::string escape(std::string_view field) {
  const bool needs = field.find_first_of(",\"\n\r") != std::string_view::npos ||
                     (!field.empty() && (field.front() == ' ' || field.back() == ' '));
  if (!needs) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

void Writer::sep() {
  if (!first_) out_ << ',';
  first_ = false;
}

Writer& Writer::field(std::string_view v) {
  sep();
  out_ << escape(v);
  return *this;
}

Writer& Writer::field(double v) {
  sep();
  out_ << format_double(v);
  return *this;
}

Writer& Writer::field(long long v) {
  sep();
  out_ << v;
  return *this;
}

Writer& Writer::empty() {
  sep();
  return *this;
}

void Writer::end_row() {
  out_ << '\n';
  first_ = true;
}

void Writer::row(std::initializer_list<std::string_view> fields) {
  for (auto f : fields) field(f);
  end_row();
}

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  if (v == 0.0) return "0";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<long long> parse_int(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<bool> parse_bool(std::string_view s) {
  std::string v(trim(s));
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "t") return true;
  if (v == "false" || v == "0" || v == "no" || v == "f") return false;
  return std::nullopt;
}

}  // namespace mono::csv
