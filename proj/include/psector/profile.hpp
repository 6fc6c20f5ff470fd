#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "psector/types.hpp"

namespace psector {

/// Monotone reparametrisation theta -> phi through which the angular profile
/// has a closed form, for 2 < p <= inf (a = 1 at p = inf):
///
///   phi(theta) = theta - (1 - 1/k) sqrt(ak)/sqrt(ak - 1)
///                * [atan(lam tan(theta/2)) + atan(tan(theta/2)/lam)],
///   lam = sqrt(ak - 1)/(sqrt(ak) + 1).
///
/// It maps [-pi/2, pi/2] onto the sector [-pi/(2nu), pi/(2nu)] and
/// [-pi, pi] onto [-pi/nu, pi/nu].
///
/// When a k = 1 (p = inf with nu <= 1, where k = 1) the formula degenerates;
/// the map is then its a k -> 1 limit, theta + sign(theta) * w with plateau
/// half-width w = pi/(2nu) - pi/2: every |phi| <= w maps to theta = 0.
class AngleMap {
 public:
  static AngleMap make(SectorSpec sector, PExponent p, double tol = 1e-12);

  double nu() const { return nu_; }
  PExponent p() const { return p_; }
  double a() const { return a_; }
  double k() const { return k_; }
  double ak() const { return a_ * k_; }
  /// lam; zero in the degenerate case.
  double lam() const { return lam_; }
  double tolerance() const { return tol_; }
  bool degenerate() const { return degenerate_; }
  double plateau_half_width() const { return plateau_; }

  double phi_of_theta(double theta) const;
  /// Inverse of phi_of_theta on |phi| <= pi/nu.
  double theta_of_phi(double phi) const;
  /// (a - cos^2)/(ak - cos^2).
  double dphi_dtheta(double theta) const;

 private:
  AngleMap() = default;
  double nu_ = 1.0;
  PExponent p_ = PExponent::infinity();
  double a_ = 1.0;
  double k_ = 1.0;
  double lam_ = 0.0;
  double coef_ = 0.0;
  double tol_ = 1e-12;
  bool degenerate_ = false;
  double plateau_ = 0.0;
};

/// f and f' at angle phi for 2 < p <= inf, normalised so f(0) = 1.
double eval_f(double phi, const AngleMap& map);
double eval_fprime(double phi, const AngleMap& map);
/// Same, given theta directly.
std::pair<double, double> profile_at_theta(double theta, const AngleMap& map);

/// (cos(nu phi), -nu sin(nu phi)).
std::pair<double, double> eval_f_p2(double phi, double nu);

enum class ProfileCase { P2_CLOSED, P_GT2_ANGLEMAP, P_INF_ANGLEMAP, P_LT2_STREAM };

std::string to_string(ProfileCase c);

struct ProfileSample {
  double phi;
  double theta;
  double f;
  double fprime;
};

/// Conjugate pair produced from a p-harmonic r^K f(phi), p > 2.
struct StreamConjugate {
  std::vector<double> phi;
  std::vector<double> g;
  std::vector<double> gprime;
  double stream_exponent;  ///< (p-1)(K-1)+1 = k(nu, q)
};

/// Applies the stream-function conjugation pointwise to base samples of a
/// p-harmonic r^K f (p > 2):
///   g  = -(1/lam) f' (K^2 f^2 + f'^2)^((p-2)/2),
///   g' =  K f      (K^2 f^2 + f'^2)^((p-2)/2),
/// with lam = (p-1)(K-1)+1.  `q` is the target exponent, q = p/(p-1).
StreamConjugate stream_conjugate(const std::vector<ProfileSample>& base, double base_k, double q);

/// Band constants realised by one profile.
struct BandConstants {
  double min_f_middle;          ///< min f on |phi| <= pi/(4nu)
  double min_abs_fprime_outer;  ///< min |f'| on pi/(4nu) < |phi| <= pi/(2nu)
  double max_abs_fprime;        ///< max |f'| on the whole sector
};

/// Angular profile f_{nu,p} with u = r^k f(phi) p-harmonic in the sector,
/// f(0) = 1 and f(+-pi/(2nu)) = 0.
class AngularProfile {
 public:
  double nu() const { return nu_; }
  PExponent p() const { return p_; }
  double k() const { return k_; }
  double half_aperture() const;
  /// Constant multiplying the raw closed form (or the stream function) so
  /// that f(0) = 1.
  double normalization() const { return normalization_; }
  ProfileCase profile_case() const { return case_; }
  const std::vector<ProfileSample>& samples() const { return samples_; }
  const BandConstants& band_constants() const { return bands_; }

  /// Base map (conjugate exponent for the stream case); empty at p = 2.
  const std::optional<AngleMap>& angle_map() const { return map_; }
  /// Stream data on the extended base domain [-pi/(2nu), pi/nu]; only for
  /// the 1 < p < 2 case.
  const std::optional<StreamConjugate>& stream() const { return stream_; }
  const std::vector<ProfileSample>& base_samples() const { return base_samples_; }
  double base_k() const { return base_k_; }

  /// Exact evaluation (through the root finder), |phi| <= pi/(2nu).
  double f(double phi) const { return eval(phi).first; }
  double fprime(double phi) const { return eval(phi).second; }
  std::pair<double, double> eval(double phi) const;

  /// Monotone cubic Hermite interpolation of the sample table.
  double f_interp(double phi) const;

  /// Angles where f fails to be C^2 (the p = inf ridge); empty otherwise.
  std::vector<double> singular_angles() const;

  /// phi, theta, f, fprime with a '#' header carrying nu, p, k and the case.
  std::string to_csv() const;

  friend AngularProfile build_profile(SectorSpec sector, PExponent p, int n_samples);

 private:
  double nu_ = 1.0;
  PExponent p_ = PExponent::infinity();
  double k_ = 1.0;
  double normalization_ = 1.0;
  ProfileCase case_ = ProfileCase::P2_CLOSED;
  std::vector<ProfileSample> samples_;
  std::vector<double> hermite_slopes_lo_;
  std::vector<double> hermite_slopes_hi_;
  BandConstants bands_{};
  std::optional<AngleMap> map_;
  std::optional<StreamConjugate> stream_;
  std::vector<ProfileSample> base_samples_;
  double base_k_ = 0.0;
  double stream_top_ = 1.0;
};

/// Builds the profile for any p in (1, inf].  The table has an even number
/// of intervals (n_samples rounded up), so phi = 0 is a node.
AngularProfile build_profile(SectorSpec sector, PExponent p, int n_samples);

/// r^k f(phi) with f interpolated from the profile table.
double eval_u(PolarPoint point, const AngularProfile& profile);

}  // namespace psector
