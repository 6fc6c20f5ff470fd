#include "psector/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "psector/types.hpp"

namespace psector {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& text, const std::string& key, int line) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw DomainError("config line " + std::to_string(line) + ": bad value for " + key + ": '" +
                      text + "'");
  }
  return value;
}

}  // namespace

void CliConfig::validate() const {
  if (n_r < 8 || n_phi < 8) throw DomainError("n_r and n_phi must be >= 8");
  if (samples < 16) throw DomainError("samples must be >= 16");
  if (!(R > 0.0)) throw DomainError("R must be > 0");
  if (!(tol > 0.0)) throw DomainError("tol must be > 0");
  if (!(eps_reg > 0.0)) throw DomainError("eps_reg must be > 0");
  if (max_iter < 1) throw DomainError("max_iter must be >= 1");
  if (!(r_min_ratio > 0.0 && r_min_ratio < 1.0)) throw DomainError("r_min_ratio must lie in (0, 1)");
  if (spacing != "logarithmic" && spacing != "uniform") {
    throw DomainError("spacing must be 'logarithmic' or 'uniform'");
  }
  if (walks < 1) throw DomainError("walks must be >= 1");
  if (out_dir.empty()) throw DomainError("out_dir must not be empty");
}

CliConfig parse_config(const std::string& text, CliConfig base) {
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw DomainError("config line " + std::to_string(line) + ": expected key = value");
    }
    const std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (key == "n_r") {
      base.n_r = parse_number<int>(value, key, line);
    } else if (key == "n_phi") {
      base.n_phi = parse_number<int>(value, key, line);
    } else if (key == "samples") {
      base.samples = parse_number<int>(value, key, line);
    } else if (key == "R") {
      base.R = parse_number<double>(value, key, line);
    } else if (key == "tol") {
      base.tol = parse_number<double>(value, key, line);
    } else if (key == "eps_reg") {
      base.eps_reg = parse_number<double>(value, key, line);
    } else if (key == "max_iter") {
      base.max_iter = parse_number<int>(value, key, line);
    } else if (key == "r_min_ratio") {
      base.r_min_ratio = parse_number<double>(value, key, line);
    } else if (key == "spacing") {
      base.spacing = value;
    } else if (key == "walks") {
      base.walks = parse_number<std::int64_t>(value, key, line);
    } else if (key == "seed") {
      base.seed = parse_number<std::uint64_t>(value, key, line);
    } else if (key == "out_dir") {
      base.out_dir = value;
    } else {
      throw DomainError("config line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
  }
  return base;
}

CliConfig load_config(const std::filesystem::path& path, CliConfig base) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::filesystem::path resolve_out_dir(const CliConfig& config) {
  if (const char* env = std::getenv("PSECTOR_OUT_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return config.out_dir;
}

}  // namespace psector
