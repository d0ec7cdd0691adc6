#pragma once

#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>

namespace fattail {

/// Shortest decimal representation that round-trips to the same double.
std::string format_number(double v);

/// Builds one comma-separated line. Numbers use format_number so output is
/// byte-stable across runs.
class CsvRow {
 public:
  CsvRow& add(double v);
  CsvRow& add(std::uint64_t v);
  CsvRow& add(int v) { return add(static_cast<std::uint64_t>(v)); }
  CsvRow& add(std::string_view text);
  CsvRow& add(const char* text) { return add(std::string_view(text)); }
  CsvRow& add(bool v) { return add(std::string_view(v ? "1" : "0")); }

  const std::string& str() const { return line_; }

 private:
  void sep();
  std::string line_;
  bool first_ = true;
};

inline std::ostream& operator<<(std::ostream& out, const CsvRow& row) { return out << row.str() << '\n'; }

void write_csv_header(std::ostream& out, std::initializer_list<std::string_view> columns);

}  // namespace fattail
