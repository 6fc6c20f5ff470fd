#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "psector/types.hpp"

namespace psector {

enum class RadialSpacing { uniform, logarithmic };
enum class ArcTarget { full_arc, inner_arc };

std::string to_string(RadialSpacing s);
std::string to_string(ArcTarget a);

/// p-harmonic measure of (part of) the arc |x| = R in the truncated sector
/// B(0, R) n S_nu.  Grid sizes count intervals: n_r = 256 means 257 radii.
struct MeasureProblem {
  double nu = 1.0;
  double p = 2.0;
  double R = 1.0;
  int n_r = 256;
  int n_phi = 256;
  RadialSpacing spacing = RadialSpacing::logarithmic;
  /// Gradient regularisation, relative to the data scale 1/R.
  double eps_reg = 1e-6;
  /// Stop once the max-norm update of a sweep drops below this.
  double tol = 1e-8;
  int max_iter = 400;
  ArcTarget arc = ArcTarget::full_arc;
  /// Innermost ring r_min = r_min_ratio * R carries omega = 0.
  double r_min_ratio = 1e-3;

  /// Throws DomainError naming the first violated bound.
  void validate() const;
};

/// Nodal values on the polar grid, radius-major: omega[i * (n_phi + 1) + j].
class MeasureSolution {
 public:
  /// Grid of `problem` with boundary data, interior values taken from
  /// `field(r, phi)`.  Used for planted fields and as the solver's start.
  static MeasureSolution from_field(const MeasureProblem& problem,
                                    const std::function<double(double, double)>& field);

  const MeasureProblem& problem() const { return problem_; }
  const std::vector<double>& r() const { return r_; }
  const std::vector<double>& phi() const { return phi_; }
  const std::vector<double>& omega() const { return omega_; }
  std::vector<double>& omega() { return omega_; }
  double at(int i, int j) const { return omega_[index(i, j)]; }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(problem_.n_phi + 1) +
           static_cast<std::size_t>(j);
  }

  /// Prescribed Dirichlet value at boundary node (i, j).
  double boundary_value(int i, int j) const;
  bool is_boundary(int i, int j) const {
    return i == 0 || i == problem_.n_r || j == 0 || j == problem_.n_phi;
  }

  /// Bilinear interpolation in (log r, phi); the point must lie in the grid.
  double interpolate(PolarPoint point) const;

  /// Linear solves, counting the p = 2 start.
  int iterations = 0;
  double final_update = 0.0;
  bool converged = false;
  std::vector<double> energy_history;

  /// Regularised discrete energy sum (|grad u|^2 + eps^2)^(p/2) / p dA.
  double energy() const;

  /// r, phi, omega triples.
  std::string to_csv() const;
  nlohmann::json summary() const;

 private:
  MeasureProblem problem_;
  std::vector<double> r_;
  std::vector<double> phi_;
  std::vector<double> omega_;
};

/// P1 elements on the (log r, phi) grid, started from the p = 2 solution.
/// Each step solves the frozen-weight problem and moves toward it by the
/// step that zeroes the directional derivative of the regularised
/// p-Dirichlet energy (capped at 1).  Stops when the undamped update falls
/// below `tol` in the max norm.
/// Non-convergence is reported through `converged`, never thrown.
MeasureSolution solve_measure(const MeasureProblem& problem);

struct SlopeFit {
  double exponent;
  double intercept;
  double rms;
  double r_min;
  double r_max;
  double ray_angle;
  int samples;

  nlohmann::json to_json() const;
};

/// Least-squares slope of log omega against log r over the grid radii in
/// [r_lo, r_hi] on the ray phi = ray_angle (linear in phi between nodes).
SlopeFit fit_slope(const MeasureSolution& solution, double ray_angle, double r_lo, double r_hi);

enum class ComparabilityRegion { S_2nu, S_nu };

struct ComparabilityBounds {
  double ratio_min;
  double ratio_max;
  int samples;
};

/// min and max of omega / (r/R)^k over grid nodes of the region, excluding a
/// two-cell margin at every boundary and radii outside
/// [r_lo_ratio * R, r_hi_ratio * R].
ComparabilityBounds comparability_constants(const MeasureSolution& solution, double k,
                                            ComparabilityRegion region,
                                            double r_lo_ratio = 0.05, double r_hi_ratio = 1.0);

struct McEstimate {
  double estimate;
  double std_error;
};

/// Walk-on-spheres estimate of the harmonic (p = 2) measure of the arc at
/// each point.  Walks stop inside a shell of width shell * R around the
/// boundary and score 1 when the arc is the nearest piece.  Results depend
/// only on `seed`, never on the worker count.
std::vector<McEstimate> mc_harmonic_measure(double nu, double R,
                                            const std::vector<PolarPoint>& points,
                                            std::int64_t n_walks, std::uint64_t seed,
                                            double shell = 1e-5);

}  // namespace psector
