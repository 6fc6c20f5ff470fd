#pragma once

#include <functional>
#include <vector>

#include "json.hpp"
#include "psector/profile.hpp"
#include "psector/types.hpp"

namespace psector {

/// A residual together with the magnitude it should be compared against:
/// the largest individual term of the equation at the sample point.
struct EquationResidual {
  double raw = 0.0;
  double scale = 0.0;

  /// |raw| / scale, or |raw| when every term vanishes.
  double relative() const;
};

/// Scalar field u(r, phi) on a sector of the given half-aperture.
struct PolarField {
  std::function<double(double r, double phi)> eval;
  double half_aperture;
};

/// Scalar field u(x, y); `ridge_angles` are polar angles where u is not C^2,
/// and points within `band_eps` of them are rejected.
struct CartesianField {
  std::function<double(double x, double y)> eval;
  std::vector<double> ridge_angles;
  double band_eps = 1e-3;
};

/// Left side of the polar p-Laplace equation multiplied by 2|grad u|^2,
///
///   (b+1) u_r^2 u_rr + (b/r^2)(u_rr u_phi^2 + u_r^2 u_phiphi)
///   + ((b+1)/r^4) u_phi^2 u_phiphi + (b/r) u_r^3 + ((b-1)/r^3) u_r u_phi^2
///   + (2/r^2) u_r u_phi u_rphi,           b = 1/(p-2),
///
/// with every partial taken by central differences of step `step` (in r and
/// in phi).  At p = 2 the harmonic form u_rr + u_r/r + u_phiphi/r^2 is used.
EquationResidual polar_plap_residual(const PolarField& field, PolarPoint point, PExponent p,
                                     double step);

/// [(b+1) f'^2 + b k^2 f^2] f'' + (2k + bk - 1) k f f'^2 + (bk + k - 1) k^3 f^3.
EquationResidual separation_residual(double f, double fprime, double fsecond, double k,
                                     PExponent p);

/// f'^2 f'' + (2k - 1) k f f'^2 + (k - 1) k^3 f^3.
EquationResidual inf_separation_residual(double f, double fprime, double fsecond, double k);

/// sum_ij u_i u_j u_ij by central differences; scale
/// |grad u|^2 max(|D^2 u|_F, |grad u| / |x|).
EquationResidual inf_lap_residual(const CartesianField& field, double x, double y, double step);

struct AngleBand {
  double lo;
  double hi;
};

struct ResidualReport {
  double max_abs_residual = 0.0;  ///< largest relative residual over the samples
  int sample_count = 0;
  std::vector<AngleBand> excluded_bands;
  double normalization_scale = 0.0;  ///< scale at the worst sample

  void add(const EquationResidual& r);
  nlohmann::json to_json() const;
};

/// u = r^k f(phi) evaluated exactly through the profile's closed form.
PolarField profile_field(const AngularProfile& profile);
CartesianField profile_cartesian_field(const AngularProfile& profile, double band_eps = 1e-3);

/// Separation ODE residual over the interior table nodes, with f'' from
/// second central differences of the tabulated f.  Finite p != 2 only.
ResidualReport separation_report(const AngularProfile& profile);

/// p = inf separation residual on `n_points` angles outside the ridge bands.
/// f'' comes from central differences of the exact profile with step
/// min(step, distance to the nearest ridge / 32).
ResidualReport inf_separation_report(const AngularProfile& profile, int n_points = 200,
                                     double step = 1e-3, double band_eps = 1e-3);

/// Polar p-Laplace residual at `n_points` equispaced interior angles on the
/// circle of radius r.  Finite p only.
ResidualReport polar_plap_report(const AngularProfile& profile, int n_points = 100,
                                 double step = 1e-3, double r = 1.0);

/// Cartesian inf-Laplace residual at `n_points` angles on radius r, skipping
/// ridge bands; the stencil step shrinks near a ridge as in the separation
/// report.
ResidualReport inf_lap_report(const AngularProfile& profile, int n_points = 100,
                              double step = 1e-3, double r = 1.0, double band_eps = 1e-3);

}  // namespace psector
