#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace membrane::expcli {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}
inline std::string fmt(int v) { return std::to_string(v); }
inline std::string fmt(std::int64_t v) { return std::to_string(v); }
inline std::string fmt(std::uint64_t v) { return std::to_string(v); }
inline std::string fmt(const std::string& v) { return v; }

// Deterministic table writer: versioned schema line, comma separation,
// `.` decimals, `\n` endings. The same rows serialize byte-identically.
class TableWriter {
 public:
  TableWriter(std::string path, std::vector<std::string> columns, std::string format)
      : path_(std::move(path)), columns_(std::move(columns)),
        json_(format == "json") {}

  void add_row(std::vector<std::string> cells) {
    if (cells.size() != columns_.size())
      throw std::invalid_argument("TableWriter: column count mismatch");
    rows_.push_back(std::move(cells));
  }

  std::string filename() const { return path_ + (json_ ? ".json" : ".csv"); }

  void write() const {
    std::ofstream out(filename(), std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + filename());
    if (json_) {
      out << "{\n  \"schema\": \"membrane-lab/v1\",\n  \"rows\": [\n";
      for (std::size_t r = 0; r < rows_.size(); ++r) {
        out << "    {";
        for (std::size_t c = 0; c < columns_.size(); ++c) {
          if (c) out << ", ";
          out << "\"" << columns_[c] << "\": \"" << rows_[r][c] << "\"";
        }
        out << "}" << (r + 1 < rows_.size() ? "," : "") << "\n";
      }
      out << "  ]\n}\n";
      return;
    }
    out << "# schema=membrane-lab/v1\n";
    for (std::size_t c = 0; c < columns_.size(); ++c)
      out << columns_[c] << (c + 1 < columns_.size() ? ',' : '\n');
    for (const auto& row : rows_) {
      for (std::size_t c = 0; c < row.size(); ++c)
        out << row[c] << (c + 1 < row.size() ? ',' : '\n');
    }
  }

 private:
  std::string path_;
  std::vector<std::string> columns_;
  bool json_;
  std::vector<std::vector<std::string>> rows_;
};

// Whitespace-separated plot data for gnuplot.
class PlotWriter {
 public:
  explicit PlotWriter(std::string path) : path_(std::move(path)) {}
  void add_comment(const std::string& text) { lines_.push_back("# " + text); }
  void add_row(const std::vector<double>& values) {
    std::string line;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) line += " ";
      line += fmt(values[i]);
    }
    lines_.push_back(std::move(line));
  }
  void write() const {
    std::ofstream out(path_, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path_);
    for (const auto& l : lines_) out << l << "\n";
  }

 private:
  std::string path_;
  std::vector<std::string> lines_;
};

}  // namespace membrane::expcli
