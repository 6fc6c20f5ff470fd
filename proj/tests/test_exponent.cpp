#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "psector/exponent.hpp"

using namespace psector;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
PExponent P(double p) { return std::isinf(p) ? PExponent::infinity() : PExponent::finite(p); }
}  // namespace

TEST_CASE("closed form agrees with bisection on the transcendental condition") {
  for (double nu : {0.55, 0.75, 0.9, 1.0, 1.3, 2.0, 3.0, 4.0, 8.0}) {
    for (double p : {1.05, 1.2, 1.5, 1.9, 2.0, 2.1, 3.0, 4.0, 10.0, 100.0, kInf}) {
      CAPTURE(nu);
      CAPTURE(p);
      const double ref = oracle::k_reference(nu, p);
      CHECK(k_of(nu, P(p)) == doctest::Approx(ref).epsilon(1e-10));
    }
  }
}

TEST_CASE("known values") {
  CHECK(k_of(0.5, P(3.0)) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(k_of(1.0, P(7.0)) == 1.0);
  CHECK(k_of(3.0, P(2.0)) == 3.0);
  CHECK(k_of(3.0, P(kInf)) == doctest::Approx(9.0 / 5.0).epsilon(1e-14));
  CHECK(k_of(0.7, P(kInf)) == 1.0);
  CHECK(radial_exponent(SectorSpec(2.0), P(3.0)).branch == ExponentBranch::k1);
}

TEST_CASE("slit limit is continuous") {
  for (double p : {1.2, 3.0, 50.0}) {
    const double at = k_of(0.5, P(p));
    CHECK(at == doctest::Approx((p - 1.0) / p).epsilon(1e-14));
    CHECK(k_of(0.5 + 1e-7, P(p)) == doctest::Approx(at).epsilon(1e-6));
  }
}

TEST_CASE("limits in p") {
  CHECK(k_of(0.9, P(1.0 + 1e-6)) < 1e-3);
  CHECK(k_of(1.5, P(1.0 + 1e-6)) > 1e4);
  for (double nu : {0.6, 1.0, 2.5}) {
    CHECK(std::abs(k_of(nu, P(1e6)) - k_of(nu, P(kInf))) < 1e-5);
  }
  // Large nu at fixed p: k grows like p nu / (2 (p - 1)).
  CHECK(k_of(1000.0, P(3.0)) / 750.0 == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("both roots of the squared condition") {
  const ExponentRoots r = radial_exponent_roots(SectorSpec(2.0), P(3.0));
  CHECK(r.k1 == doctest::Approx(k_of(2.0, P(3.0))).epsilon(1e-14));
  // The second root has the closed-form limit nu / (2nu - 1) at p = 2.
  const ExponentRoots near2 = radial_exponent_roots(SectorSpec(2.0), P(2.0 + 1e-7));
  CHECK(near2.k2 == doctest::Approx(2.0 / 3.0).epsilon(1e-5));
  CHECK_THROWS_AS(radial_exponent_roots(SectorSpec(0.5), P(3.0)), DomainError);
}

TEST_CASE("condition residual vanishes only at the root") {
  for (double nu : {0.6, 1.0, 2.0}) {
    for (double p : {1.5, 2.0, 3.0, kInf}) {
      const double k = k_of(nu, P(p));
      if (std::isinf(p) && nu <= 1.0) {
        // a k = 1: the condition degenerates and k = 1 comes from the limit.
        CHECK_THROWS_AS(exponent_condition_residual(k, SectorSpec(nu), P(p)), DomainError);
        continue;
      }
      CHECK(std::abs(exponent_condition_residual(k, SectorSpec(nu), P(p))) < 1e-10);
    }
  }
  CHECK(std::abs(exponent_condition_residual(2.1, SectorSpec(2.0), P(2.0))) > 1e-3);
}

TEST_CASE("derivatives match central differences of the bisection oracle") {
  const double h = 1e-5;
  for (double nu : {0.6, 0.8, 1.0, 1.7, 3.0}) {
    for (double p : {1.3, 1.8, 2.5, 4.0, 20.0}) {
      CAPTURE(nu);
      CAPTURE(p);
      const double fd_nu = (oracle::k_reference(nu + h, p) - oracle::k_reference(nu - h, p)) / (2 * h);
      const double fd_p = (oracle::k_reference(nu, p + h) - oracle::k_reference(nu, p - h)) / (2 * h);
      CHECK(dk_dnu(SectorSpec(nu), P(p)) == doctest::Approx(fd_nu).epsilon(1e-6).scale(1.0));
      CHECK(dk_dp(SectorSpec(nu), P(p)) == doctest::Approx(fd_p).epsilon(1e-6).scale(1.0));
    }
  }
  CHECK(dk_dp(SectorSpec(0.5), P(3.0)) == doctest::Approx(1.0 / 9.0));
  CHECK(dk_dnu(SectorSpec(3.0), P(kInf)) == doctest::Approx(2.0 * 3.0 * 2.0 / 25.0));
  CHECK_THROWS_AS(dk_dnu(SectorSpec(0.5), P(3.0)), DomainError);
}

TEST_CASE("property: monotone in nu, sign of dk/dp set by nu - 1") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unu(0.5, 6.0), up(1.01, 30.0);
  for (int i = 0; i < 500; ++i) {
    const double nu = unu(rng), p = up(rng), d = 1e-3;
    CHECK(k_of(nu + d, P(p)) >= k_of(nu, P(p)));
    if (std::abs(nu - 1.0) > 1e-6 && nu > 0.5 + 1e-6) {
      const double s = dk_dp(SectorSpec(nu), P(p));
      CHECK((nu < 1.0 ? s > 0.0 : s < 0.0));
    }
    if (p > 2.0) CHECK(P(p).a() * k_of(nu, P(p)) > 1.0);
  }
  CHECK(dk_dp(SectorSpec(1.0), P(3.0)) == 0.0);
}

TEST_CASE("domain errors") {
  CHECK_THROWS_WITH_AS(SectorSpec(0.4), "nu must be >= 0.5", DomainError);
  CHECK_THROWS_AS(PExponent::finite(1.0), DomainError);
  CHECK_THROWS_AS(PExponent::finite(std::nan("")), DomainError);
  CHECK_THROWS_AS(PExponent::parse("abc"), DomainError);
  CHECK(PExponent::parse("inf").is_infinite());
  CHECK(PExponent::parse("3").value() == 3.0);
  CHECK(PExponent::finite(3.0).conjugate().value() == doctest::Approx(1.5));
}
