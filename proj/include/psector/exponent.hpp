#pragma once

#include "psector/types.hpp"

namespace psector {

enum class ExponentBranch { k1, k2 };

/// Homogeneity degree k of the positive separable solution r^k f(phi).
struct RadialExponent {
  double k;
  ExponentBranch branch;
};

struct ExponentRoots {
  double k1;
  double k2;
};

/// k(nu, p).  Handles the removable singularity at nu = 1/2, the p = 2
/// special case, and the piecewise limit at p = inf.
RadialExponent radial_exponent(SectorSpec sector, PExponent p);

/// Convenience overload returning the plain value.
inline double k_of(double nu, PExponent p) {
  return radial_exponent(SectorSpec(nu), p).k;
}

/// Both roots of the squared exponent condition, evaluated literally from
/// their closed forms.  Only k1 is a solution of the unsquared condition.
ExponentRoots radial_exponent_roots(SectorSpec sector, PExponent p);

/// pi/nu - pi (1 - (1 - 1/k) sqrt(ak)/sqrt(ak - 1)); zero iff k solves the
/// exponent condition.  For 1 < p < 2 the value k is mapped to the conjugate
/// exponent K = (k - 1)(q - 1) + 1 and checked at p' = p/(p-1).  At p = 2 the
/// a -> inf limit pi/nu - pi/k is used.
double exponent_condition_residual(double k, SectorSpec sector, PExponent p);

/// dk/dnu.  Finite p uses the closed-form derivative; p = inf differentiates
/// the piecewise limit (the two branches meet with zero slope at nu = 1).
/// Throws at nu = 1/2 exactly.
double dk_dnu(SectorSpec sector, PExponent p);

/// dk/dp for finite p; returns the limit 1/p^2 at nu = 1/2.
double dk_dp(SectorSpec sector, PExponent p);

}  // namespace psector
