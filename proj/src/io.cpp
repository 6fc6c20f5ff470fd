#include "psector/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace psector {

std::string format_shortest(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw std::runtime_error("to_chars failed");
  return std::string(buf.data(), ptr);
}

std::string format_significant(double value, int digits) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.*g", digits, value);
  return std::string(buf.data());
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void CsvTable::add_row(const std::vector<double>& values) {
  if (values.size() != columns_.size()) throw std::invalid_argument("csv row width mismatch");
  std::string line;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) line += ',';
    line += format_shortest(values[i]);
  }
  rows_.push_back(std::move(line));
}

void CsvTable::add_row_text(const std::vector<std::string>& values) {
  if (values.size() != columns_.size()) throw std::invalid_argument("csv row width mismatch");
  std::string line;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) line += ',';
    line += values[i];
  }
  rows_.push_back(std::move(line));
}

std::string CsvTable::str() const {
  std::string out;
  for (const auto& c : comments_) out += "# " + c + "\n";
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) out += ',';
    out += columns_[i];
  }
  out += '\n';
  for (const auto& r : rows_) out += r + "\n";
  return out;
}

}  // namespace psector
