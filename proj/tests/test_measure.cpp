#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "psector/measure.hpp"

using namespace psector;

namespace {

MeasureProblem small(double nu, double p, int n = 64) {
  MeasureProblem pb;
  pb.nu = nu;
  pb.p = p;
  pb.n_r = n;
  pb.n_phi = n;
  return pb;
}

}  // namespace

TEST_CASE("p = 2 solve matches the exact Fourier series, second order") {
  for (double nu : {1.0, 2.0}) {
    double err[2] = {0.0, 0.0};
    for (int level = 0; level < 2; ++level) {
      MeasureProblem pb = small(nu, 2.0, 64 << level);
      const MeasureSolution sol = solve_measure(pb);
      REQUIRE(sol.converged);
      const double r_min = pb.r_min_ratio * pb.R;
      // Probe at grid nodes of both meshes so interpolation adds no error.
      for (int i : {40, 48, 56}) {
        for (int j : {16, 24, 32}) {
          const int ii = i << level, jj = j << level;
          const double r = sol.r()[ii], phi = sol.phi()[jj];
          const double exact = oracle::harmonic_series(nu, pb.R, r_min, r, phi);
          err[level] = std::max(err[level], std::abs(sol.at(ii, jj) - exact));
        }
      }
    }
    MESSAGE("nu = " << nu << ", max error vs series " << err[0] << " (64), " << err[1] << " (128)");
    CHECK(err[1] < 5e-4);
    CHECK(err[0] / err[1] > 3.0);
  }
}

TEST_CASE("planted power law: fit and comparability recover it exactly") {
  MeasureProblem pb = small(2.0, 3.0, 64);
  const double k = 1.75;
  const MeasureSolution planted = MeasureSolution::from_field(
      pb, [&](double r, double phi) { return std::pow(r, k) * std::cos(2.0 * phi); });
  const SlopeFit fit = fit_slope(planted, 0.0, 0.05, 0.4);
  CHECK(fit.exponent == doctest::Approx(k).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(fit.rms < 1e-12);
  CHECK(fit.samples >= 8);
  const ComparabilityBounds b = comparability_constants(planted, k, ComparabilityRegion::S_2nu, 0.05, 0.9);
  // On S_2nu the ratio is cos(2 phi) for |phi| up to pi/8 minus the margin.
  CHECK(b.ratio_max == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b.ratio_min > std::cos(std::numbers::pi / 4) - 1e-12);
  CHECK(b.ratio_min < 1.0);
  CHECK_THROWS_AS(fit_slope(planted, 0.0, 0.5, 0.4), DomainError);
  CHECK_THROWS_AS(fit_slope(planted, 2.0, 0.05, 0.4), DomainError);
}

TEST_CASE("solution invariants for p != 2") {
  for (double p : {1.5, 3.0}) {
    CAPTURE(p);
    const MeasureSolution sol = solve_measure(small(1.5, p, 64));
    REQUIRE(sol.converged);
    const auto& pb = sol.problem();
    double lo = 1.0, hi = 0.0, asym = 0.0;
    for (int i = 0; i <= pb.n_r; ++i) {
      for (int j = 0; j <= pb.n_phi; ++j) {
        if (!sol.is_boundary(i, j)) {
          lo = std::min(lo, sol.at(i, j));
          hi = std::max(hi, sol.at(i, j));
        } else {
          CHECK(sol.at(i, j) == sol.boundary_value(i, j));
        }
        asym = std::max(asym, std::abs(sol.at(i, j) - sol.at(i, pb.n_phi - j)));
      }
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
    CHECK(asym < 1e-10);
    for (int i = 0; i < pb.n_r; ++i) CHECK(sol.at(i + 1, pb.n_phi / 2) >= sol.at(i, pb.n_phi / 2) - 1e-12);
    // Energy decreases along the damped iteration.
    for (std::size_t m = 1; m < sol.energy_history.size(); ++m) {
      CHECK(sol.energy_history[m] <= sol.energy_history[m - 1] * (1 + 1e-12));
    }
  }
}

TEST_CASE("inner arc data and comparison with the full arc") {
  MeasureProblem pb = small(2.0, 3.0, 64);
  pb.arc = ArcTarget::inner_arc;
  const MeasureSolution inner = solve_measure(pb);
  pb.arc = ArcTarget::full_arc;
  const MeasureSolution full = solve_measure(pb);
  REQUIRE(inner.converged);
  REQUIRE(full.converged);
  CHECK(inner.boundary_value(64, 32) == 1.0);
  CHECK(inner.boundary_value(64, 16) == 0.5);
  CHECK(inner.boundary_value(64, 4) == 0.0);
  // Comparison principle: smaller data, smaller solution.
  for (std::size_t m = 0; m < inner.omega().size(); ++m) CHECK(inner.omega()[m] <= full.omega()[m] + 1e-9);
}

TEST_CASE("non-convergence is reported, not thrown") {
  MeasureProblem pb = small(1.0, 4.0, 32);
  pb.max_iter = 1;
  const MeasureSolution sol = solve_measure(pb);
  CHECK_FALSE(sol.converged);
  CHECK(sol.final_update > pb.tol);
  CHECK(sol.summary()["converged"] == false);
}

TEST_CASE("problem validation") {
  MeasureProblem pb = small(1.0, 2.0, 32);
  pb.n_phi = 33;
  CHECK_THROWS_AS(pb.validate(), DomainError);
  pb.n_phi = 34;
  pb.arc = ArcTarget::inner_arc;
  CHECK_THROWS_AS(pb.validate(), DomainError);
  pb = small(0.4, 2.0);
  CHECK_THROWS_AS(solve_measure(pb), DomainError);
  pb = small(1.0, 1.0);
  CHECK_THROWS_AS(solve_measure(pb), DomainError);
}

TEST_CASE("walk-on-spheres against the series") {
  const double nu = 1.0, R = 1.0;
  const std::vector<PolarPoint> pts = {{0.5, 0.0}, {0.8, 0.6}};
  const auto a = mc_harmonic_measure(nu, R, pts, 20000, 42);
  const auto b = mc_harmonic_measure(nu, R, pts, 20000, 42);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    // Unbounded domain limit: r_min -> 0 leaves the series unchanged here.
    const double exact = oracle::harmonic_series(nu, R, 0.0, pts[i].r, pts[i].phi);
    CHECK(std::abs(a[i].estimate - exact) < 4.0 * a[i].std_error);
    CHECK(a[i].estimate == b[i].estimate);
    CHECK(a[i].std_error > 0.0);
  }
  CHECK_THROWS_AS(mc_harmonic_measure(nu, R, {{1.5, 0.0}}, 10, 1), DomainError);
}

TEST_CASE("csv and summary") {
  const MeasureSolution sol = solve_measure(small(1.0, 2.0, 16));
  const std::string csv = sol.to_csv();
  CHECK(csv.find("r,phi,omega") != std::string::npos);
  CHECK(sol.summary()["iterations"] == 1);
  CHECK(sol.interpolate({0.5, 0.0}) > 0.0);
  CHECK_THROWS_AS(sol.interpolate({2.0, 0.0}), DomainError);
}
