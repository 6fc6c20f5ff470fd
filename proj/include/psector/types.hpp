#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace psector {

/// Raised when an argument lies outside the domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a constructed object fails one of its own invariants.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Planar sector { |phi| < pi/(2 nu) } with apex at the origin, nu >= 1/2.
class SectorSpec {
 public:
  explicit SectorSpec(double nu) : nu_(nu) {
    if (!(nu >= 0.5) || !std::isfinite(nu)) {
      throw DomainError("nu must be >= 0.5");
    }
  }

  double nu() const { return nu_; }
  /// pi/(2 nu); the sides sit at phi = +-half_aperture().
  double half_aperture() const { return std::numbers::pi / (2.0 * nu_); }

 private:
  double nu_;
};

/// Integrability exponent p in (1, inf].  Infinity is a flag, never a
/// large sentinel value.
class PExponent {
 public:
  static PExponent finite(double p) {
    if (!(p > 1.0) || !std::isfinite(p)) {
      throw DomainError("p must be > 1");
    }
    return PExponent(p, false);
  }
  static PExponent infinity() { return PExponent(0.0, true); }

  /// Parses "inf", "infinity" or a finite number.
  static PExponent parse(const std::string& text);

  bool is_infinite() const { return infinite_; }
  bool is_finite() const { return !infinite_; }

  /// Finite value; +inf when the flag is set.
  double value() const {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }

  /// a = (p-1)/(p-2), with a = 1 at p = inf.  Undefined at p = 2.
  double a() const;
  /// b = 1/(p-2).  Undefined at p = 2 and p = inf.
  double b() const;

  /// Conjugate exponent p/(p-1); only defined for finite p.
  PExponent conjugate() const;

  std::string to_string() const;

 private:
  PExponent(double v, bool inf) : value_(v), infinite_(inf) {}
  double value_;
  bool infinite_;
};

/// Point in polar coordinates, r > 0 and |phi| <= pi.
struct PolarPoint {
  double r;
  double phi;
};

}  // namespace psector
