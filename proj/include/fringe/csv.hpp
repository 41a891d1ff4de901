#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fringe {

// Shortest round-trippable decimal form; keeps CSV output byte-stable
// across runs.
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string fmt_fixed(double v, int places) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", places, v);
  return buf;
}

// Minimal comma-separated writer; all quoting-free content by construction.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& header) : out_(path) {
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
    out_ << header << "\n";
  }

  void row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ",";
      out_ << cells[i];
    }
    out_ << "\n";
    if (!out_) throw std::runtime_error("CsvWriter: write failed");
  }

 private:
  std::ofstream out_;
};

}  // namespace fringe
