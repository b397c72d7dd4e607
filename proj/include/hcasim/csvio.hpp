#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hcasim {

// Floats in every CSV are printed with 9 significant digits so reruns can be
// compared byte for byte.
inline std::string fmt_g9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return std::string(buf);
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';  // LF only
  }

 private:
  std::ofstream out_;
};

std::vector<std::vector<std::string>> read_csv(const std::string& path);
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace hcasim
