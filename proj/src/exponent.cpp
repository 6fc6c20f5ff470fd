#include "psector/exponent.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

#include "psector/io.hpp"

namespace psector {

namespace {

constexpr double kPi = std::numbers::pi;

// |2 nu - 1| below this is treated as the slit plane nu = 1/2.
constexpr double kHalfPlaneSlack = 1e-8;

bool at_slit(double nu) { return std::abs(2.0 * nu - 1.0) < kHalfPlaneSlack; }

// (nu-1)^2 p^2 + 4 (2nu-1)(p-1); equal to (1-2nu)(p-2)^2 + nu^2 p^2 but a sum
// of nonnegative terms on the whole domain.
double discriminant(double nu, double p) {
  return (nu - 1.0) * (nu - 1.0) * p * p + 4.0 * (2.0 * nu - 1.0) * (p - 1.0);
}

double condition_residual_core(double k, double nu, double a) {
  const double ak = a * k;
  if (!(ak > 1.0)) {
    throw DomainError("exponent condition requires a*k > 1");
  }
  return kPi / nu - kPi * (1.0 - (1.0 - 1.0 / k) * std::sqrt(ak) / std::sqrt(ak - 1.0));
}

}  // namespace

PExponent PExponent::parse(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Inf" || text == "INF") {
    return infinity();
  }
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw DomainError("cannot parse p from '" + text + "'");
  }
  return finite(v);
}

double PExponent::a() const {
  if (infinite_) return 1.0;
  if (value_ == 2.0) throw DomainError("a = (p-1)/(p-2) is undefined at p = 2");
  return (value_ - 1.0) / (value_ - 2.0);
}

double PExponent::b() const {
  if (infinite_) throw DomainError("b = 1/(p-2) is undefined at p = inf");
  if (value_ == 2.0) throw DomainError("b = 1/(p-2) is undefined at p = 2");
  return 1.0 / (value_ - 2.0);
}

PExponent PExponent::conjugate() const {
  if (infinite_) throw DomainError("conjugate exponent of p = inf is 1, outside (1, inf]");
  return finite(value_ / (value_ - 1.0));
}

std::string PExponent::to_string() const {
  return infinite_ ? std::string("inf") : format_shortest(value_);
}

RadialExponent radial_exponent(SectorSpec sector, PExponent p) {
  const double nu = sector.nu();
  if (p.is_infinite()) {
    const double k = nu <= 1.0 ? 1.0 : nu * nu / (2.0 * nu - 1.0);
    return {k, ExponentBranch::k1};
  }
  const double pv = p.value();
  if (pv == 2.0) return {nu, ExponentBranch::k1};
  if (at_slit(nu)) return {(pv - 1.0) / pv, ExponentBranch::k1};

  // k1 with its numerator rationalised: the product of the two conjugate
  // numerators is 4 (2nu-1) nu^2 (p-1)^2, which cancels the 2nu-1 in the
  // denominator and leaves a form without cancellation near nu = 1/2.
  const double root = std::sqrt(discriminant(nu, pv));
  const double denom = (2.0 * nu - 1.0) * (pv - 2.0) + nu * nu * pv - (nu - 1.0) * root;
  return {2.0 * nu * nu * (pv - 1.0) / denom, ExponentBranch::k1};
}

ExponentRoots radial_exponent_roots(SectorSpec sector, PExponent p) {
  const double nu = sector.nu();
  if (p.is_infinite()) throw DomainError("exponent roots need finite p");
  if (at_slit(nu)) throw DomainError("exponent roots are singular at nu = 1/2");
  const double pv = p.value();
  const double root = std::sqrt((1.0 - 2.0 * nu) * (pv - 2.0) * (pv - 2.0) + nu * nu * pv * pv);
  const double denom = 2.0 * (pv - 1.0) * (2.0 * nu - 1.0);
  const double k1 = (root * (nu - 1.0) + (2.0 - pv) * (1.0 - 2.0 * nu) + nu * nu * pv) / denom;
  const double k2 = (root * (1.0 - nu) + (2.0 - pv) * (2.0 * nu - 1.0) + nu * nu * pv) / denom;
  return {k1, k2};
}

double exponent_condition_residual(double k, SectorSpec sector, PExponent p) {
  const double nu = sector.nu();
  if (!(k > 0.0)) throw DomainError("k must be > 0");
  if (p.is_infinite()) return condition_residual_core(k, nu, 1.0);
  const double pv = p.value();
  if (pv == 2.0) return kPi / nu - kPi / k;
  if (pv > 2.0) return condition_residual_core(k, nu, p.a());
  // 1 < q < 2: k(nu, q) is the stream exponent (P-1)(K-1)+1 of the conjugate
  // P = q/(q-1) > 2, so K = (k-1)(q-1)+1 must solve the condition at P.
  const PExponent conj = p.conjugate();
  const double big_k = (k - 1.0) * (pv - 1.0) + 1.0;
  return condition_residual_core(big_k, nu, conj.a());
}

double dk_dnu(SectorSpec sector, PExponent p) {
  const double nu = sector.nu();
  if (at_slit(nu)) throw DomainError("dk/dnu has no closed form at nu = 1/2");
  if (p.is_infinite()) {
    if (nu <= 1.0) return 0.0;
    const double e = 2.0 * nu - 1.0;
    return (2.0 * nu * nu - 2.0 * nu) / (e * e);
  }
  const double pv = p.value();
  const double e = 2.0 * nu - 1.0;
  const double root = std::sqrt(discriminant(nu, pv));
  const double num = pv * (nu - 1.0) * root + (nu - 1.0) * (nu - 1.0) * pv * pv + 2.0 * e * (pv - 1.0);
  return nu * num / ((pv - 1.0) * e * e * root);
}

double dk_dp(SectorSpec sector, PExponent p) {
  if (p.is_infinite()) throw DomainError("dk/dp needs finite p");
  const double nu = sector.nu();
  const double pv = p.value();
  if (at_slit(nu)) return 1.0 / (pv * pv);
  const double e = 2.0 * nu - 1.0;
  const double root = std::sqrt(discriminant(nu, pv));
  const double num = (nu - 1.0) * root + nu * nu * pv + e * (pv - 2.0);
  return (1.0 - nu) * num / (2.0 * e * (pv - 1.0) * (pv - 1.0) * root);
}

}  // namespace psector
