#include "psector/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "psector/exponent.hpp"
#include "psector/io.hpp"

namespace psector {

namespace {

constexpr double kPi = std::numbers::pi;

// Within this distance of p = 2 the harmonic closed form is used.
constexpr double kNearTwo = 1e-6;
// Extended-domain oversampling for the stream construction.
constexpr int kStreamOversample = 4;

std::pair<double, double> stream_pair(double f, double fp, double base_k, double big_p, double lam) {
  const double mod2 = base_k * base_k * f * f + fp * fp;
  const double w = std::pow(mod2, 0.5 * (big_p - 2.0));
  return {-fp * w / lam, base_k * f * w};
}

void require(bool ok, const char* what) {
  if (!ok) throw InvariantError(std::string("profile invariant failed: ") + what);
}

}  // namespace

std::string to_string(ProfileCase c) {
  switch (c) {
    case ProfileCase::P2_CLOSED: return "P2_CLOSED";
    case ProfileCase::P_GT2_ANGLEMAP: return "P_GT2_ANGLEMAP";
    case ProfileCase::P_INF_ANGLEMAP: return "P_INF_ANGLEMAP";
    case ProfileCase::P_LT2_STREAM: return "P_LT2_STREAM";
  }
  return "?";
}

StreamConjugate stream_conjugate(const std::vector<ProfileSample>& base, double base_k, double q) {
  if (!(q > 1.0 && q < 2.0)) throw DomainError("stream conjugation needs q in (1, 2)");
  const double big_p = q / (q - 1.0);
  const double lam = (big_p - 1.0) * (base_k - 1.0) + 1.0;
  StreamConjugate out;
  out.stream_exponent = lam;
  out.phi.reserve(base.size());
  out.g.reserve(base.size());
  out.gprime.reserve(base.size());
  for (const auto& s : base) {
    auto [g, gp] = stream_pair(s.f, s.fprime, base_k, big_p, lam);
    out.phi.push_back(s.phi);
    out.g.push_back(g);
    out.gprime.push_back(gp);
  }
  return out;
}

double AngularProfile::half_aperture() const { return kPi / (2.0 * nu_); }

std::pair<double, double> AngularProfile::eval(double phi) const {
  const double half = half_aperture();
  if (!(std::abs(phi) <= half * (1.0 + 1e-12))) {
    throw DomainError("|phi| must be <= pi/(2nu)");
  }
  switch (case_) {
    case ProfileCase::P2_CLOSED:
      return eval_f_p2(phi, nu_);
    case ProfileCase::P_GT2_ANGLEMAP:
    case ProfileCase::P_INF_ANGLEMAP:
      return profile_at_theta(map_->theta_of_phi(phi), *map_);
    case ProfileCase::P_LT2_STREAM: {
      const double psi = std::clamp(phi + half, 0.0, 2.0 * half);
      auto [fb, fpb] = profile_at_theta(map_->theta_of_phi(psi), *map_);
      const double big_p = p_.conjugate().value();
      auto [g, gp] = stream_pair(fb, fpb, base_k_, big_p, k_);
      return {g / stream_top_, gp / stream_top_};
    }
  }
  return {0.0, 0.0};
}

double AngularProfile::f_interp(double phi) const {
  const double half = half_aperture();
  if (!(std::abs(phi) <= half * (1.0 + 1e-12))) {
    throw DomainError("|phi| must be <= pi/(2nu)");
  }
  const std::size_t n = samples_.size() - 1;
  const double h = 2.0 * half / static_cast<double>(n);
  const double x = (phi + half) / h;
  std::size_t j = static_cast<std::size_t>(std::clamp(std::floor(x), 0.0, static_cast<double>(n - 1)));
  const double t = std::clamp(x - static_cast<double>(j), 0.0, 1.0);
  const double y0 = samples_[j].f;
  const double y1 = samples_[j + 1].f;
  const double m0 = hermite_slopes_lo_[j] * h;
  const double m1 = hermite_slopes_hi_[j] * h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1;
}

std::vector<double> AngularProfile::singular_angles() const {
  if (case_ != ProfileCase::P_INF_ANGLEMAP) return {};
  if (!map_->degenerate()) return {0.0};
  const double w = map_->plateau_half_width();
  if (w <= 0.0) return {};
  return {-w, w};
}

std::string AngularProfile::to_csv() const {
  CsvTable table({"phi", "theta", "f", "fprime"});
  table.add_comment("nu=" + format_shortest(nu_));
  table.add_comment("p=" + p_.to_string());
  table.add_comment("k=" + format_shortest(k_));
  table.add_comment("case=" + to_string(case_));
  table.add_comment("normalization=" + format_shortest(normalization_));
  for (const auto& s : samples_) table.add_row({s.phi, s.theta, s.f, s.fprime});
  return table.str();
}

AngularProfile build_profile(SectorSpec sector, PExponent p, int n_samples) {
  if (n_samples < 16) throw DomainError("n_samples must be >= 16");
  const int n = n_samples + (n_samples % 2);
  const double half = sector.half_aperture();
  auto node = [&](int j, int count) { return -half + 2.0 * half * static_cast<double>(j) / count; };

  AngularProfile prof;
  prof.nu_ = sector.nu();
  prof.p_ = p;
  prof.samples_.reserve(static_cast<std::size_t>(n) + 1);

  if (p.is_finite() && std::abs(p.value() - 2.0) < kNearTwo) {
    prof.case_ = ProfileCase::P2_CLOSED;
    prof.k_ = sector.nu();
    for (int j = 0; j <= n; ++j) {
      const double phi = j == n / 2 ? 0.0 : node(j, n);
      auto [f, fp] = eval_f_p2(phi, sector.nu());
      prof.samples_.push_back({phi, sector.nu() * phi, f, fp});
    }
  } else if (p.is_infinite() || p.value() > 2.0) {
    prof.case_ = p.is_infinite() ? ProfileCase::P_INF_ANGLEMAP : ProfileCase::P_GT2_ANGLEMAP;
    prof.map_ = AngleMap::make(sector, p);
    const AngleMap& map = *prof.map_;
    prof.k_ = map.k();
    prof.normalization_ = map.degenerate() ? 1.0 : std::pow((map.ak() - 1.0) / map.ak(), -0.5 * (map.k() - 1.0));
    for (int j = 0; j <= n; ++j) {
      const double phi = j == n / 2 ? 0.0 : node(j, n);
      const double theta = map.theta_of_phi(phi);
      auto [f, fp] = profile_at_theta(theta, map);
      prof.samples_.push_back({phi, theta, f, fp});
    }
  } else {
    // 1 < p < 2: conjugate of the p' = p/(p-1) > 2 solution, built on the
    // extended base domain [-pi/(2nu), pi/nu] and rotated by pi/(2nu).
    prof.case_ = ProfileCase::P_LT2_STREAM;
    const double q = p.value();
    const PExponent big_p = p.conjugate();
    prof.map_ = AngleMap::make(sector, big_p);
    const AngleMap& map = *prof.map_;
    prof.base_k_ = map.k();
    const int dense = kStreamOversample * n;  // intervals per sector width
    const int ext = 3 * dense / 2;            // intervals on [-half, 2 half]
    prof.base_samples_.reserve(static_cast<std::size_t>(ext) + 1);
    for (int m = 0; m <= ext; ++m) {
      double psi = -half + 3.0 * half * static_cast<double>(m) / ext;
      if (m == dense / 2) psi = 0.0;
      if (m == dense) psi = half;
      const double theta = map.theta_of_phi(psi);
      auto [f, fp] = profile_at_theta(theta, map);
      prof.base_samples_.push_back({psi, theta, f, fp});
    }
    prof.stream_ = stream_conjugate(prof.base_samples_, prof.base_k_, q);
    const StreamConjugate& st = *prof.stream_;
    prof.k_ = st.stream_exponent;
    require(std::abs(prof.k_ - radial_exponent(sector, p).k) <= 1e-10 * std::max(1.0, prof.k_),
            "stream exponent equals k(nu, q)");
    // psi = pi/(2nu) (theta = pi/2) is where the rotated profile peaks.
    const std::size_t top = static_cast<std::size_t>(dense);
    prof.stream_top_ = st.g[top];
    prof.normalization_ = 1.0 / prof.stream_top_;
    for (int j = 0; j <= n; ++j) {
      const std::size_t m = static_cast<std::size_t>(kStreamOversample * j + dense / 2);
      const double phi = j == n / 2 ? 0.0 : node(j, n);
      prof.samples_.push_back({phi, prof.base_samples_[m].theta, st.g[m] / prof.stream_top_,
                               st.gprime[m] / prof.stream_top_});
    }
  }

  // Table endpoints sit on the sides exactly.
  prof.samples_.front().phi = -half;
  prof.samples_.back().phi = half;

  // Fritsch-Carlson limited Hermite slopes, per interval.
  const std::size_t n_int = prof.samples_.size() - 1;
  prof.hermite_slopes_lo_.resize(n_int);
  prof.hermite_slopes_hi_.resize(n_int);
  const double h = 2.0 * half / static_cast<double>(n_int);
  for (std::size_t j = 0; j < n_int; ++j) {
    const auto& s0 = prof.samples_[j];
    const auto& s1 = prof.samples_[j + 1];
    const double delta = (s1.f - s0.f) / h;
    double m0 = s0.fprime;
    double m1 = s1.fprime;
    if (delta == 0.0) {
      m0 = m1 = 0.0;
    } else {
      if (m0 / delta < 0.0) m0 = 0.0;
      if (m1 / delta < 0.0) m1 = 0.0;
      const double al = m0 / delta;
      const double be = m1 / delta;
      const double r2 = al * al + be * be;
      if (r2 > 9.0) {
        const double tau = 3.0 / std::sqrt(r2);
        m0 = tau * al * delta;
        m1 = tau * be * delta;
      }
    }
    prof.hermite_slopes_lo_[j] = m0;
    prof.hermite_slopes_hi_[j] = m1;
  }

  BandConstants bands{1.0, std::numeric_limits<double>::infinity(), 0.0};
  const double quarter = 0.5 * half;
  for (const auto& s : prof.samples_) {
    if (std::abs(s.phi) <= quarter * (1.0 + 1e-12)) {
      bands.min_f_middle = std::min(bands.min_f_middle, s.f);
    } else {
      bands.min_abs_fprime_outer = std::min(bands.min_abs_fprime_outer, std::abs(s.fprime));
    }
    bands.max_abs_fprime = std::max(bands.max_abs_fprime, std::abs(s.fprime));
  }
  prof.bands_ = bands;

  const auto& mid = prof.samples_[static_cast<std::size_t>(n / 2)];
  require(std::abs(mid.f - 1.0) <= 1e-12, "f(0) = 1");
  require(std::abs(mid.fprime) <= 1e-9, "f'(0) = 0");
  require(std::abs(prof.samples_.front().f) <= 1e-9 && std::abs(prof.samples_.back().f) <= 1e-9,
          "f(+-pi/(2nu)) = 0");
  for (const auto& s : prof.samples_) {
    require(s.f >= -1e-12 && s.f <= 1.0 + 1e-12, "0 <= f <= 1");
  }
  require(bands.min_f_middle > 0.0, "f bounded below on the middle band");
  require(bands.min_abs_fprime_outer > 0.0, "|f'| bounded below outside the middle band");
  return prof;
}

double eval_u(PolarPoint point, const AngularProfile& profile) {
  if (!(point.r > 0.0)) throw DomainError("r must be > 0");
  if (!(std::abs(point.phi) <= profile.half_aperture() * (1.0 + 1e-12))) {
    throw DomainError("point lies outside the sector");
  }
  return std::pow(point.r, profile.k()) * profile.f_interp(point.phi);
}

}  // namespace psector
