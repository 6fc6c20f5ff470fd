#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace psector {

/// Shortest decimal string that round-trips to the same double.
std::string format_shortest(double value);

/// printf-style %.Ng; used for human-facing stdout.
std::string format_significant(double value, int digits = 10);

/// Writes `content` to `path`, creating parent directories.  LF line endings.
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Minimal CSV builder: '#'-prefixed comment lines, one header row, then rows
/// of numbers in shortest round-trip form.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_comment(std::string line) { comments_.push_back(std::move(line)); }
  void add_row(const std::vector<double>& values);
  void add_row_text(const std::vector<std::string>& values);

  std::size_t row_count() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::string> comments_;
  std::vector<std::string> rows_;
};

}  // namespace psector
