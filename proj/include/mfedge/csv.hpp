#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfedge {

// Minimal CSV writer: header row, fixed column count, deterministic "%.12g"
// formatting for doubles.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header)
      : out_(path), columns_(header.size()) {
    if (!out_) throw std::runtime_error("cannot open " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
      out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }

  CsvWriter& cell(const std::string& v) {
    sep();
    out_ << v;
    return *this;
  }
  CsvWriter& cell(const char* v) { return cell(std::string(v)); }
  CsvWriter& cell(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return cell(std::string(buf));
  }
  CsvWriter& cell(int v) { return cell(std::to_string(v)); }
  CsvWriter& cell(long v) { return cell(std::to_string(v)); }
  CsvWriter& cell(unsigned long long v) { return cell(std::to_string(v)); }

  CsvWriter& end_row() {
    if (filled_ != columns_) throw std::logic_error("CSV row has wrong column count");
    out_ << '\n';
    filled_ = 0;
    return *this;
  }

 private:
  void sep() {
    if (filled_ > 0) out_ << ',';
    ++filled_;
  }
  std::ofstream out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

// Two-column whitespace-separated series, gnuplot/spreadsheet friendly.
inline void write_xy_series(const std::string& path,
                            const std::vector<std::pair<double, double>>& series) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  char buf[80];
  for (auto [x, y] : series) {
    std::snprintf(buf, sizeof buf, "%.12g %.12g\n", x, y);
    out << buf;
  }
}

}  // namespace mfedge
