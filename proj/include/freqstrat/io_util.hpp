#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

namespace freqstrat {

// Fixed 17-significant-digit float formatting: round-trips doubles and keeps
// artifacts byte-stable across runs.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

struct CsvWriter {
  std::string text;
  void header(const std::vector<std::string>& cols);
  void row(const std::vector<std::string>& cells);
};

inline void CsvWriter::header(const std::vector<std::string>& cols) { row(cols); }
inline void CsvWriter::row(const std::vector<std::string>& cells) {
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) text += ',';
    text += cells[i];
  }
  text += '\n';
}

}  // namespace freqstrat
