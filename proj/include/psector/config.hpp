#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace psector {

/// Defaults shared by every CLI command.  Loaded from a `key = value` file;
/// command-line flags override whatever the file sets.
struct CliConfig {
  int n_r = 256;
  int n_phi = 256;
  int samples = 256;
  double R = 1.0;
  double tol = 1e-8;
  double eps_reg = 1e-6;
  int max_iter = 400;
  double r_min_ratio = 1e-3;
  std::string spacing = "logarithmic";
  std::int64_t walks = 100000;
  std::uint64_t seed = 7;
  std::string out_dir = "out";

  /// Throws DomainError if any field violates a module precondition.
  void validate() const;
};

/// Applies `key = value` lines from `text` on top of `base`.  Blank lines and
/// lines starting with '#' are ignored; values may be double-quoted.
/// Unknown keys and malformed values raise DomainError naming the line.
CliConfig parse_config(const std::string& text, CliConfig base = {});

CliConfig load_config(const std::filesystem::path& path, CliConfig base = {});

/// Output directory after the PSECTOR_OUT_DIR environment override.
std::filesystem::path resolve_out_dir(const CliConfig& config);

}  // namespace psector
