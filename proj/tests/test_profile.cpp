#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "psector/exponent.hpp"
#include "psector/profile.hpp"

using namespace psector;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
PExponent P(double p) { return std::isinf(p) ? PExponent::infinity() : PExponent::finite(p); }
}  // namespace

TEST_CASE("p = 2 profile is cos(nu phi)") {
  for (double nu : {0.5, 1.0, 3.0}) {
    const AngularProfile prof = build_profile(SectorSpec(nu), P(2.0), 64);
    CHECK(prof.profile_case() == ProfileCase::P2_CLOSED);
    for (const auto& s : prof.samples()) {
      CHECK(std::abs(s.f - std::cos(nu * s.phi)) < 1e-12);
      CHECK(std::abs(s.fprime + nu * std::sin(nu * s.phi)) < 1e-12);
    }
  }
}

TEST_CASE("profiles agree with RK4 shooting of the separation ODE") {
  for (double nu : {0.6, 1.0, 2.0, 4.0}) {
    for (double p : {1.3, 1.5, 1.8, 2.5, 3.0, 4.0, 10.0}) {
      CAPTURE(nu);
      CAPTURE(p);
      const AngularProfile prof = build_profile(SectorSpec(nu), P(p), 128);
      const double k = k_of(nu, P(p));
      const double half = prof.half_aperture();
      for (double frac : {0.2, 0.5, 0.8, 0.95}) {
        const auto [f, fp] = oracle::shoot_profile(k, p, frac * half);
        const auto [g, gp] = prof.eval(frac * half);
        CHECK(g == doctest::Approx(f).epsilon(1e-8).scale(1.0));
        CHECK(gp == doctest::Approx(fp).epsilon(1e-8).scale(1.0));
      }
    }
  }
}

TEST_CASE("angle map agrees with quadrature of dphi/dtheta") {
  for (double nu : {0.6, 1.0, 2.0, 4.0}) {
    for (double p : {2.5, 3.0, 10.0, kInf}) {
      if (std::isinf(p) && nu <= 1.0) continue;
      CAPTURE(nu);
      CAPTURE(p);
      const AngleMap map = AngleMap::make(SectorSpec(nu), P(p));
      const double a = map.a(), k = map.k();
      auto rate = [&](double t) {
        const double c2 = std::cos(t) * std::cos(t);
        return (a - c2) / (a * k - c2);
      };
      for (double th : {0.3, 1.0, 1.5, oracle::kPi / 2, 2.5}) {
        CHECK(map.phi_of_theta(th) == doctest::Approx(oracle::simpson(rate, 0.0, th)).epsilon(1e-10));
        CHECK(map.phi_of_theta(-th) == doctest::Approx(-map.phi_of_theta(th)).epsilon(1e-14));
      }
      CHECK(map.phi_of_theta(oracle::kPi / 2) == doctest::Approx(oracle::kPi / (2 * nu)).epsilon(1e-12));
      CHECK(map.phi_of_theta(oracle::kPi) == doctest::Approx(oracle::kPi / nu).epsilon(1e-12));
    }
  }
}

TEST_CASE("degenerate map at p = inf, nu < 1 has a plateau") {
  const double nu = 0.75;
  const AngleMap map = AngleMap::make(SectorSpec(nu), P(kInf));
  CHECK(map.degenerate());
  const double w = oracle::kPi / (2 * nu) - oracle::kPi / 2;
  CHECK(map.plateau_half_width() == doctest::Approx(w));
  CHECK(map.theta_of_phi(0.5 * w) == 0.0);
  CHECK(map.phi_of_theta(0.3) == doctest::Approx(0.3 + w));
  const AngularProfile prof = build_profile(SectorSpec(nu), P(kInf), 128);
  // f = 1 on the plateau, then follows the p = inf profile of the half-plane.
  CHECK(prof.f(0.5 * w) == doctest::Approx(1.0));
  CHECK(prof.singular_angles().size() == 2);
}

TEST_CASE("stream profile for 1 < p < 2") {
  const AngularProfile prof = build_profile(SectorSpec(1.0), P(1.5), 128);
  CHECK(prof.profile_case() == ProfileCase::P_LT2_STREAM);
  CHECK(prof.stream().has_value());
  CHECK(prof.stream()->stream_exponent == doctest::Approx(1.0));
  CHECK(prof.to_csv().find("case=P_LT2_STREAM") != std::string::npos);
  // Half-plane: every p gives u = x, f = cos.
  for (double phi : {-1.2, -0.3, 0.0, 0.9}) CHECK(prof.f(phi) == doctest::Approx(std::cos(phi)).epsilon(1e-10));
}

TEST_CASE("property: normalisation, boundary values, symmetry, range") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unu(0.5, 5.0), uu(-1.0, 1.0);
  const double ps[] = {1.2, 1.6, 2.0, 2.4, 3.5, 8.0, kInf};
  for (int i = 0; i < 40; ++i) {
    const double nu = unu(rng);
    const double p = ps[i % 7];
    CAPTURE(nu);
    CAPTURE(p);
    const AngularProfile prof = build_profile(SectorSpec(nu), P(p), 64);
    const double half = prof.half_aperture();
    CHECK(prof.f(0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(prof.f(half)) < 1e-9);
    CHECK(std::abs(prof.fprime(0.0)) < 1e-9);
    for (int j = 0; j < 10; ++j) {
      const double phi = half * uu(rng);
      const auto [f, fp] = prof.eval(phi);
      const auto [g, gp] = prof.eval(-phi);
      CHECK(std::abs(f - g) < 1e-10);
      CHECK(std::abs(fp + gp) < 1e-10);
      CHECK(f >= -1e-15);
      CHECK(f <= 1.0 + 1e-15);
      // The cubic Hermite table stays close to the exact profile.
      CHECK(std::abs(prof.f_interp(phi) - f) < 1e-4);
    }
    const auto& bc = prof.band_constants();
    CHECK(bc.min_f_middle > 0.0);
    CHECK(bc.max_abs_fprime >= bc.min_abs_fprime_outer);
  }
}

TEST_CASE("table layout") {
  const AngularProfile prof = build_profile(SectorSpec(2.0), P(3.0), 127);
  const auto& s = prof.samples();
  CHECK((s.size() - 1) % 2 == 0);
  CHECK(s.front().phi == doctest::Approx(-oracle::kPi / 4));
  CHECK(std::abs(s.front().f) < 1e-9);
  CHECK(s[(s.size() - 1) / 2].phi == 0.0);
  CHECK_THROWS_AS(build_profile(SectorSpec(2.0), P(3.0), 8), DomainError);
  CHECK_THROWS_AS(prof.f(1.0), DomainError);
}

TEST_CASE("eval_u scales like r^k") {
  const AngularProfile prof = build_profile(SectorSpec(2.0), P(3.0), 256);
  const double k = prof.k();
  const double u1 = eval_u({1.0, 0.3}, prof);
  CHECK(eval_u({10.0, 0.3}, prof) == doctest::Approx(u1 * std::pow(10.0, k)).epsilon(1e-12));
  CHECK_THROWS_AS(eval_u({1.0, 1.0}, prof), DomainError);
}
