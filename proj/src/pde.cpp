#include "psector/pde.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <limits>

namespace psector {

namespace {

double max_abs(std::initializer_list<double> terms) {
  double m = 0.0;
  for (double t : terms) m = std::max(m, std::abs(t));
  return m;
}

double sum(std::initializer_list<double> terms) {
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

// Distance from phi to the nearest non-smooth angle, +inf when there is none.
double ridge_distance(double phi, const std::vector<double>& ridges) {
  double d = std::numeric_limits<double>::infinity();
  for (double s : ridges) d = std::min(d, std::abs(phi - s));
  return d;
}

// n angles evenly spread over [-lim, lim] with the ridge bands removed.
std::vector<double> sample_angles(double lim, int n, const std::vector<double>& ridges,
                                  double band_eps) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  const int raw = n + 2 * static_cast<int>(ridges.size()) * 4 + 8;
  for (int i = 0; i < raw && static_cast<int>(out.size()) < n; ++i) {
    const double phi = -lim + 2.0 * lim * (i + 0.5) / raw;
    if (ridge_distance(phi, ridges) < band_eps) continue;
    out.push_back(phi);
  }
  return out;
}

std::vector<AngleBand> ridge_bands(const std::vector<double>& ridges, double band_eps) {
  std::vector<AngleBand> bands;
  for (double s : ridges) bands.push_back({s - band_eps, s + band_eps});
  return bands;
}

}  // namespace

double EquationResidual::relative() const {
  return scale > 0.0 ? std::abs(raw) / scale : std::abs(raw);
}

void ResidualReport::add(const EquationResidual& r) {
  const double rel = r.relative();
  if (sample_count == 0 || rel > max_abs_residual) {
    max_abs_residual = rel;
    normalization_scale = r.scale;
  }
  ++sample_count;
}

nlohmann::json ResidualReport::to_json() const {
  nlohmann::json bands = nlohmann::json::array();
  for (const auto& b : excluded_bands) bands.push_back({b.lo, b.hi});
  return {{"max_abs_residual", max_abs_residual},
          {"sample_count", sample_count},
          {"excluded_bands", bands},
          {"normalization_scale", normalization_scale}};
}

EquationResidual polar_plap_residual(const PolarField& field, PolarPoint point, PExponent p,
                                     double step) {
  if (p.is_infinite()) throw DomainError("polar p-Laplace residual needs finite p");
  if (!(step > 0.0)) throw DomainError("step must be > 0");
  const double r = point.r;
  const double phi = point.phi;
  if (!(r > 2.0 * step)) throw DomainError("stencil reaches the apex: need r > 2 step");
  if (std::abs(phi) + step > field.half_aperture * (1.0 + 1e-12)) {
    throw DomainError("stencil exits the sector");
  }
  const double h = step;
  auto u = [&](double dr, double dp) { return field.eval(r + dr * h, phi + dp * h); };
  const double u0 = u(0, 0);
  const double urp = u(1, 0), urm = u(-1, 0), upp = u(0, 1), upm = u(0, -1);
  const double ur = (urp - urm) / (2 * h);
  const double urr = (urp - 2 * u0 + urm) / (h * h);
  const double up = (upp - upm) / (2 * h);
  const double upp2 = (upp - 2 * u0 + upm) / (h * h);
  const double urphi = (u(1, 1) - u(1, -1) - u(-1, 1) + u(-1, -1)) / (4 * h * h);

  if (p.value() == 2.0) {
    const double t1 = urr, t2 = ur / r, t3 = upp2 / (r * r);
    return {sum({t1, t2, t3}), max_abs({t1, t2, t3})};
  }
  const double b = p.b();
  const double r2 = r * r;
  const double t1 = (b + 1) * ur * ur * urr;
  const double t2 = (b / r2) * urr * up * up;
  const double t3 = (b / r2) * ur * ur * upp2;
  const double t4 = ((b + 1) / (r2 * r2)) * up * up * upp2;
  const double t5 = (b / r) * ur * ur * ur;
  const double t6 = ((b - 1) / (r2 * r)) * ur * up * up;
  const double t7 = (2 / r2) * ur * up * urphi;
  return {sum({t1, t2, t3, t4, t5, t6, t7}), max_abs({t1, t2, t3, t4, t5, t6, t7})};
}

EquationResidual separation_residual(double f, double fprime, double fsecond, double k,
                                     PExponent p) {
  const double b = p.b();
  const double f2 = f * f;
  const double fp2 = fprime * fprime;
  const double t1 = (b + 1) * fp2 * fsecond;
  const double t2 = b * k * k * f2 * fsecond;
  const double t3 = (2 * k + b * k - 1) * k * f * fp2;
  const double t4 = (b * k + k - 1) * k * k * k * f2 * f;
  return {sum({t1, t2, t3, t4}), max_abs({t1, t2, t3, t4})};
}

EquationResidual inf_separation_residual(double f, double fprime, double fsecond, double k) {
  const double fp2 = fprime * fprime;
  const double t1 = fp2 * fsecond;
  const double t2 = (2 * k - 1) * k * f * fp2;
  const double t3 = (k - 1) * k * k * k * f * f * f;
  return {sum({t1, t2, t3}), max_abs({t1, t2, t3})};
}

EquationResidual inf_lap_residual(const CartesianField& field, double x, double y, double step) {
  if (!(step > 0.0)) throw DomainError("step must be > 0");
  if (!field.ridge_angles.empty()) {
    const double phi = std::atan2(y, x);
    if (ridge_distance(phi, field.ridge_angles) < field.band_eps) {
      throw DomainError("point lies inside the excluded ridge band");
    }
  }
  const double h = step;
  auto u = [&](double dx, double dy) { return field.eval(x + dx * h, y + dy * h); };
  const double u0 = u(0, 0);
  const double uxp = u(1, 0), uxm = u(-1, 0), uyp = u(0, 1), uym = u(0, -1);
  const double ux = (uxp - uxm) / (2 * h);
  const double uy = (uyp - uym) / (2 * h);
  const double uxx = (uxp - 2 * u0 + uxm) / (h * h);
  const double uyy = (uyp - 2 * u0 + uym) / (h * h);
  const double uxy = (u(1, 1) - u(1, -1) - u(-1, 1) + u(-1, -1)) / (4 * h * h);
  const double t1 = ux * ux * uxx;
  const double t2 = 2 * ux * uy * uxy;
  const double t3 = uy * uy * uyy;
  const double hess = std::sqrt(uxx * uxx + 2 * uxy * uxy + uyy * uyy);
  const double g2 = ux * ux + uy * uy;
  // Where u is affine the Hessian is pure rounding noise; fall back to the
  // homogeneity scale |grad u| / |x| so the residual is not divided by noise.
  return {t1 + t2 + t3, g2 * std::max(hess, std::sqrt(g2) / std::hypot(x, y))};
}

PolarField profile_field(const AngularProfile& profile) {
  const double k = profile.k();
  return {[&profile, k](double r, double phi) { return std::pow(r, k) * profile.f(phi); },
          profile.half_aperture()};
}

CartesianField profile_cartesian_field(const AngularProfile& profile, double band_eps) {
  const double k = profile.k();
  return {[&profile, k](double x, double y) {
            return std::pow(std::hypot(x, y), k) * profile.f(std::atan2(y, x));
          },
          profile.singular_angles(), band_eps};
}

ResidualReport separation_report(const AngularProfile& profile) {
  const PExponent p = profile.p();
  if (p.is_infinite() || profile.profile_case() == ProfileCase::P2_CLOSED) {
    throw DomainError("separation report needs finite p != 2");
  }
  const auto& s = profile.samples();
  const double h = s[1].phi - s[0].phi;
  ResidualReport rep;
  for (std::size_t j = 1; j + 1 < s.size(); ++j) {
    const double fpp = (s[j + 1].f - 2.0 * s[j].f + s[j - 1].f) / (h * h);
    rep.add(separation_residual(s[j].f, s[j].fprime, fpp, profile.k(), p));
  }
  return rep;
}

ResidualReport inf_separation_report(const AngularProfile& profile, int n_points, double step,
                                     double band_eps) {
  if (!profile.p().is_infinite()) throw DomainError("inf separation report needs p = inf");
  const auto ridges = profile.singular_angles();
  const double lim = profile.half_aperture() - step;
  ResidualReport rep;
  rep.excluded_bands = ridge_bands(ridges, band_eps);
  for (double phi : sample_angles(lim, n_points, ridges, band_eps)) {
    const double h = std::min(step, ridge_distance(phi, ridges) / 32.0);
    const double fm = profile.f(phi - h);
    const double fp = profile.f(phi + h);
    const auto [f, fprime] = profile.eval(phi);
    const double fpp = (fp - 2.0 * f + fm) / (h * h);
    rep.add(inf_separation_residual(f, fprime, fpp, profile.k()));
  }
  return rep;
}

ResidualReport polar_plap_report(const AngularProfile& profile, int n_points, double step,
                                 double r) {
  const PolarField field = profile_field(profile);
  const double lim = profile.half_aperture() - 2.0 * step;
  ResidualReport rep;
  for (int i = 0; i < n_points; ++i) {
    const double phi = n_points == 1 ? 0.0 : -lim + 2.0 * lim * i / (n_points - 1);
    rep.add(polar_plap_residual(field, {r, phi}, profile.p(), step));
  }
  return rep;
}

ResidualReport inf_lap_report(const AngularProfile& profile, int n_points, double step, double r,
                              double band_eps) {
  const CartesianField field = profile_cartesian_field(profile, band_eps);
  const auto ridges = profile.singular_angles();
  const double half = profile.half_aperture();
  const double lim = half - 4.0 * step / r;
  ResidualReport rep;
  rep.excluded_bands = ridge_bands(ridges, band_eps);
  for (double phi : sample_angles(lim, n_points, ridges, band_eps)) {
    const double h = std::min(step, r * ridge_distance(phi, ridges) / 32.0);
    rep.add(inf_lap_residual(field, r * std::cos(phi), r * std::sin(phi), h));
  }
  return rep;
}

}  // namespace psector
