#include <algorithm>
#include <cmath>
#include <numbers>

#include "psector/exponent.hpp"
#include "psector/profile.hpp"
#include "psector/root_find.hpp"

namespace psector {

namespace {

constexpr double kPi = std::numbers::pi;

// atan(lam t) + atan(t/lam) with t = tan(theta/2), for theta in [0, pi/2].
double arctan_pair(double theta, double lam) {
  const double t = std::tan(0.5 * theta);
  return std::atan(lam * t) + std::atan(t / lam);
}

}  // namespace

AngleMap AngleMap::make(SectorSpec sector, PExponent p, double tol) {
  if (p.is_finite() && !(p.value() > 2.0)) {
    throw DomainError("angle map needs 2 < p <= inf");
  }
  AngleMap m;
  m.nu_ = sector.nu();
  m.p_ = p;
  m.a_ = p.a();
  m.k_ = radial_exponent(sector, p).k;
  m.tol_ = tol;
  const double ak = m.a_ * m.k_;
  if (p.is_infinite() && ak <= 1.0 + 1e-14) {
    m.degenerate_ = true;
    m.plateau_ = std::max(0.0, sector.half_aperture() - 0.5 * kPi);
    return m;
  }
  if (!(ak > 1.0)) throw DomainError("angle map requires a*k > 1");
  m.lam_ = std::sqrt(ak - 1.0) / (std::sqrt(ak) + 1.0);
  m.coef_ = (1.0 - 1.0 / m.k_) * std::sqrt(ak) / std::sqrt(ak - 1.0);
  return m;
}

double AngleMap::phi_of_theta(double theta) const {
  if (!(std::abs(theta) <= kPi * (1.0 + 1e-15))) {
    throw DomainError("theta must lie in [-pi, pi]");
  }
  if (degenerate_) {
    if (theta == 0.0) return 0.0;
    return theta + std::copysign(plateau_, theta);
  }
  const double t = std::min(std::abs(theta), kPi);
  // The pair is singular at theta = pi through tan(theta/2); on (pi/2, pi]
  // use pair(theta) = pi - pair(pi - theta), the same constant-sum identity
  // that gives atan(lam) + atan(1/lam) = pi/2.
  const double pair = t <= 0.5 * kPi ? arctan_pair(t, lam_) : kPi - arctan_pair(kPi - t, lam_);
  return std::copysign(t - coef_ * pair, theta);
}

double AngleMap::dphi_dtheta(double theta) const {
  if (degenerate_) return 1.0;
  const double s2 = std::sin(theta) * std::sin(theta);
  return ((a_ - 1.0) + s2) / ((ak() - 1.0) + s2);
}

double AngleMap::theta_of_phi(double phi) const {
  const double limit = kPi / nu_;
  if (!(std::abs(phi) <= limit * (1.0 + 1e-12))) {
    throw DomainError("|phi| must be <= pi/nu");
  }
  const double target = std::abs(phi);
  if (target == 0.0) return 0.0;
  if (degenerate_) {
    if (target <= plateau_) return 0.0;
    return std::copysign(std::min(target - plateau_, kPi), phi);
  }
  if (target >= phi_of_theta(kPi)) return std::copysign(kPi, phi);
  auto residual = [&](double th) { return phi_of_theta(th) - target; };
  RootResult root = solve_bracketed(residual, 0.0, kPi, tol_);
  double th = root.x;
  // Newton polish; phi is smooth and strictly increasing off theta = 0.
  for (int i = 0; i < 2; ++i) {
    const double d = dphi_dtheta(th);
    if (!(d > 0.0)) break;
    const double next = th - residual(th) / d;
    if (!(next > 0.0 && next <= kPi)) break;
    th = next;
  }
  return std::copysign(th, phi);
}

std::pair<double, double> profile_at_theta(double theta, const AngleMap& map) {
  if (map.degenerate()) return {std::cos(theta), -std::sin(theta)};
  const double s = std::sin(theta);
  // c (1 - cos^2/(ak))^((k-1)/2) with c = ((ak-1)/ak)^(-(k-1)/2) folded in.
  const double scale = std::pow(1.0 + s * s / (map.ak() - 1.0), 0.5 * (map.k() - 1.0));
  return {scale * std::cos(theta), -map.k() * scale * s};
}

double eval_f(double phi, const AngleMap& map) {
  return profile_at_theta(map.theta_of_phi(phi), map).first;
}

double eval_fprime(double phi, const AngleMap& map) {
  return profile_at_theta(map.theta_of_phi(phi), map).second;
}

std::pair<double, double> eval_f_p2(double phi, double nu) {
  return {std::cos(nu * phi), -nu * std::sin(nu * phi)};
}

}  // namespace psector
