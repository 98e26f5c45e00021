#include "wgqed/csv.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace wgqed {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) x = 0.0;  // drop the sign of negative zero
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  for (const auto& h : header) cell(h);
  end_row();
}

void CsvWriter::sep() {
  if (in_row_ > 0) out_ += ',';
  ++in_row_;
}

CsvWriter& CsvWriter::cell(double x) {
  sep();
  out_ += format_number(x);
  return *this;
}

CsvWriter& CsvWriter::cell(const std::string& s) {
  if (s.find_first_of(",\"\n") != std::string::npos) throw std::invalid_argument("CSV cell needs quoting: " + s);
  sep();
  out_ += s;
  return *this;
}

CsvWriter& CsvWriter::cell(std::size_t n) {
  sep();
  out_ += std::to_string(n);
  return *this;
}

CsvWriter& CsvWriter::cell(bool b) {
  sep();
  out_ += b ? '1' : '0';
  return *this;
}

CsvWriter& CsvWriter::empty() {
  sep();
  return *this;
}

void CsvWriter::end_row() {
  if (in_row_ != columns_) throw std::logic_error("CSV row has the wrong number of cells");
  out_ += '\n';
  in_row_ = 0;
}

}  // namespace wgqed
