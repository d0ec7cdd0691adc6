#include "fattail/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace fattail {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void CsvRow::sep() {
  if (!first_) line_.push_back(',');
  first_ = false;
}

CsvRow& CsvRow::add(double v) {
  sep();
  line_ += format_number(v);
  return *this;
}

CsvRow& CsvRow::add(std::uint64_t v) {
  sep();
  line_ += std::to_string(v);
  return *this;
}

CsvRow& CsvRow::add(std::string_view text) {
  sep();
  line_ += text;
  return *this;
}

void write_csv_header(std::ostream& out, std::initializer_list<std::string_view> columns) {
  bool first = true;
  for (auto c : columns) {
    if (!first) out << ',';
    out << c;
    first = false;
  }
  out << '\n';
}

}  // namespace fattail
