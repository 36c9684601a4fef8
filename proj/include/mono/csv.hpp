#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mono::csv {

struct Row {
  std::size_t line = 0;  // 1-based line number in the source
  std::vector<std::string> fields;
};

struct Table {
  std::string source;  // file name used in error messages
  std::vector<std::string> header;
  std::vector<Row> rows;

  /// Column position by name, or nullopt.
  std::optional<std::size_t> column(std::string_view name) const;
};

/// RFC 4180-style reader: quoted fields, doubled quotes, CRLF tolerated,
/// blank lines skipped. Throws ParseError on an unterminated quote.
Table read(std::istream& in, std::string source);
Table read_file(const std::string& path);

std::string escape(std::string_view field);

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  Writer& field(std::string_view v);
  Writer& field(double v);
  Writer& field(long long v);
  Writer& field(int v) { return field(static_cast<long long>(v)); }
  Writer& field(std::size_t v) { return field(static_cast<long long>(v)); }
  Writer& empty();
  void end_row();
  void row(std::initializer_list<std::string_view> fields);

 private:
  void sep();
  std::ostream& out_;
  bool first_ = true;
};

/// Shortest round-trip decimal for a double; NaN renders as the empty string.
std::string format_double(double v);

/// Strict number parsing of a whole field.
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);
std::optional<bool> parse_bool(std::string_view s);

std::string_view trim(std::string_view s);

}  // namespace mono::csv
