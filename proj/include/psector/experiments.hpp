#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "psector/measure.hpp"
#include "psector/types.hpp"

namespace psector {

struct Criterion {
  std::string name;
  bool passed;
  std::string detail;
};

/// Result of one experiment: a table whose rows carry their own parameters,
/// explicit pass/fail per criterion, and the settings needed to rerun it.
/// Contains no timings, so reruns are byte-identical.
class ExperimentReport {
 public:
  ExperimentReport(std::string experiment, std::string nu_tag, std::string p_tag);

  std::string experiment;
  std::string nu_tag;
  std::string p_tag;
  nlohmann::json parameters = nlohmann::json::object();
  nlohmann::json provenance = nlohmann::json::object();
  /// Free-form result blocks (residual reports, fits, MC agreement).
  nlohmann::json results = nlohmann::json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<Criterion> criteria;

  void check(std::string name, bool ok, std::string detail = {});
  bool passed() const;
  /// Null when every criterion passed.
  const Criterion* first_failure() const;

  /// {experiment}_{nu}_{p}
  std::string file_stem() const;
  nlohmann::json to_json() const;
  std::string to_csv() const;
  /// Writes <dir>/<stem>.json and <dir>/<stem>.csv.
  void write(const std::filesystem::path& dir) const;
};

/// Solver and fit settings for the measure experiments.
struct MeasureGrid {
  int n_r = 256;
  int n_phi = 256;
  double R = 1.0;
  double eps_reg = 1e-6;
  double tol = 1e-8;
  int max_iter = 400;
  RadialSpacing spacing = RadialSpacing::logarithmic;
  double r_min_ratio = 1e-3;
  double fit_lo = 0.05;  ///< fit window, relative to R
  double fit_hi = 0.4;

  MeasureProblem problem(double nu, double p, ArcTarget arc = ArcTarget::full_arc) const;
  nlohmann::json to_json() const;
};

/// Relative slope tolerance: 5% at p = 2, 15% for nu < 0.6, 10% otherwise.
double default_slope_tolerance(double nu, double p);

std::vector<double> default_nu_grid();       ///< 0.5, 0.6, ..., 4
std::vector<PExponent> default_p_grid();     ///< 1.1 1.5 2 3 4 10 100 inf

ExperimentReport run_exponent_table(const std::vector<double>& nu_grid,
                                    const std::vector<PExponent>& p_grid);

ExperimentReport run_profile_invariants(const std::vector<double>& nu_grid,
                                        const std::vector<PExponent>& p_grid, int n_samples,
                                        std::uint64_t seed);

ExperimentReport run_pde_residuals(const std::vector<double>& nu_grid,
                                   const std::vector<PExponent>& p_grid, int n_samples);

ExperimentReport run_stream_consistency(double nu, double q, int n_samples = 64);

/// Solve, slope fit and comparability certificate on S_2nu.  With
/// `mesh_check` the problem is also solved at half resolution and the
/// certificate drift is reported.
ExperimentReport run_measure_experiment(double nu, double p, const MeasureGrid& grid,
                                        double rel_tol, bool mesh_check);

/// Upper bound on S_nu from the full-arc measure and lower bound on
/// B(0, R/2) n S_2nu from the inner-arc measure, plus the decay-rate
/// observations near the cusp and the slit.
ExperimentReport run_growth_bounds(double nu, double p, const MeasureGrid& grid);

/// Fitted exponent at (8, 2) must reach 5; at (0.51, 3) it must lie within
/// 15% of 2/3.
ExperimentReport run_cusp_witness(const MeasureGrid& grid);

ExperimentReport run_phragmen_check(double nu, PExponent p, const std::vector<double>& R_list,
                                    int n_samples = 256);

/// Ten interior probe points used for the walk-on-spheres comparison.
std::vector<PolarPoint> mc_probe_points(double nu, double R);

ExperimentReport run_mc_oracle(double nu, const MeasureGrid& grid, std::int64_t walks,
                               std::uint64_t seed);

struct VerifyOptions {
  bool quick = false;
  MeasureGrid grid;
  int samples = 256;
  std::int64_t walks = 100000;
  std::uint64_t seed = 7;
};

const std::vector<std::string>& suite_names();

/// Runs a named suite; throws DomainError("unknown suite ...") otherwise.
/// `quick` halves the measure grids, skips the mesh-doubling check and cuts
/// the walk count.
std::vector<ExperimentReport> run_suite(const std::string& name, const VerifyOptions& options);

}  // namespace psector
