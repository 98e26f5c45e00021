// csv.hpp - number formatting and CSV assembly for datasets.
//
// Numbers use 17 significant digits (round-trip exact); rows end in LF.

#pragma once

#include <string>
#include <vector>

namespace wgqed {

std::string format_number(double x);

class CsvWriter {
public:
  explicit CsvWriter(std::vector<std::string> header);

  CsvWriter& cell(double x);
  CsvWriter& cell(const std::string& s);
  CsvWriter& cell(const char* s) { return cell(std::string(s)); }
  CsvWriter& cell(std::size_t n);
  CsvWriter& cell(bool b);
  CsvWriter& empty();
  void end_row();

  const std::string& str() const { return out_; }

private:
  void sep();
  std::size_t columns_;
  std::size_t in_row_ = 0;
  std::string out_;
};

}  // namespace wgqed
