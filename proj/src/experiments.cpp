#include "psector/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>

#include "psector/exponent.hpp"
#include "psector/io.hpp"
#include "psector/pde.hpp"
#include "psector/profile.hpp"

namespace psector {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

nlohmann::json json_number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

std::string g6(double x) { return format_significant(x, 6); }

std::string case_tag(double nu, PExponent p) {
  return "(nu=" + format_shortest(nu) + ", p=" + p.to_string() + ")";
}

// Tracks the worst value of some error over a sweep and where it happened.
struct Worst {
  double value = 0.0;
  std::string where = "-";
  void see(double v, const std::string& at) {
    if (std::isnan(value)) return;
    if (std::isnan(v) || v > value) {
      value = v;
      where = at;
    }
  }
  std::string str() const { return "max " + g6(value) + " at " + where; }
};

double fd_derivative(const std::function<double(double)>& fn, double x, double h) {
  return (fn(x + h) - fn(x - h)) / (2.0 * h);
}

// Fourth-order central difference.
double fd4(const std::function<double(double)>& fn, double x, double h) {
  return (-fn(x + 2 * h) + 8 * fn(x + h) - 8 * fn(x - h) + fn(x - 2 * h)) / (12 * h);
}

}  // namespace

// ---------------------------------------------------------------------------
// ExperimentReport

ExperimentReport::ExperimentReport(std::string experiment_, std::string nu_tag_, std::string p_tag_)
    : experiment(std::move(experiment_)), nu_tag(std::move(nu_tag_)), p_tag(std::move(p_tag_)) {}

void ExperimentReport::check(std::string name, bool ok, std::string detail) {
  criteria.push_back({std::move(name), ok, std::move(detail)});
}

bool ExperimentReport::passed() const { return first_failure() == nullptr; }

const Criterion* ExperimentReport::first_failure() const {
  for (const auto& c : criteria) {
    if (!c.passed) return &c;
  }
  return nullptr;
}

std::string ExperimentReport::file_stem() const { return experiment + "_" + nu_tag + "_" + p_tag; }

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json table = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t c = 0; c < columns.size() && c < row.size(); ++c) obj[columns[c]] = json_number(row[c]);
    table.push_back(std::move(obj));
  }
  nlohmann::json crit = nlohmann::json::array();
  for (const auto& c : criteria) crit.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return {{"experiment", experiment}, {"nu", nu_tag},         {"p", p_tag},
          {"parameters", parameters}, {"provenance", provenance}, {"results", results},
          {"table", table},           {"criteria", crit},     {"passed", passed()}};
}

std::string ExperimentReport::to_csv() const {
  CsvTable t(columns);
  t.add_comment("experiment=" + experiment);
  t.add_comment("nu=" + nu_tag);
  t.add_comment("p=" + p_tag);
  t.add_comment("passed=" + std::string(passed() ? "true" : "false"));
  for (const auto& row : rows) t.add_row(row);
  return t.str();
}

void ExperimentReport::write(const std::filesystem::path& dir) const {
  write_text_file(dir / (file_stem() + ".json"), to_json().dump(2) + "\n");
  write_text_file(dir / (file_stem() + ".csv"), to_csv());
}

// ---------------------------------------------------------------------------
// Grids and defaults

MeasureProblem MeasureGrid::problem(double nu, double p, ArcTarget arc) const {
  MeasureProblem pb;
  pb.nu = nu;
  pb.p = p;
  pb.R = R;
  pb.n_r = n_r;
  pb.n_phi = n_phi;
  pb.spacing = spacing;
  pb.eps_reg = eps_reg;
  pb.tol = tol;
  pb.max_iter = max_iter;
  pb.arc = arc;
  pb.r_min_ratio = r_min_ratio;
  return pb;
}

nlohmann::json MeasureGrid::to_json() const {
  return {{"n_r", n_r},         {"n_phi", n_phi},   {"R", R},
          {"eps_reg", eps_reg}, {"tol", tol},       {"max_iter", max_iter},
          {"spacing", to_string(spacing)},          {"r_min_ratio", r_min_ratio},
          {"fit_lo", fit_lo},   {"fit_hi", fit_hi}};
}

double default_slope_tolerance(double nu, double p) {
  if (nu < 0.6) return 0.15;
  return p == 2.0 ? 0.05 : 0.10;
}

std::vector<double> default_nu_grid() {
  std::vector<double> g;
  for (int i = 5; i <= 40; ++i) g.push_back(i / 10.0);
  return g;
}

std::vector<PExponent> default_p_grid() {
  std::vector<PExponent> g;
  for (double p : {1.1, 1.5, 2.0, 3.0, 4.0, 10.0, 100.0}) g.push_back(PExponent::finite(p));
  g.push_back(PExponent::infinity());
  return g;
}

// ---------------------------------------------------------------------------
// Exponent

ExperimentReport run_exponent_table(const std::vector<double>& nu_grid,
                                    const std::vector<PExponent>& p_grid) {
  ExperimentReport rep("exponent_table", "grid", "grid");
  nlohmann::json pj = nlohmann::json::array();
  for (const auto& p : p_grid) pj.push_back(p.to_string());
  rep.parameters = {{"nu_grid", nu_grid}, {"p_grid", pj}};
  rep.provenance = {{"fd_step", 1e-6}, {"fd_rel_tol", 1e-5}};
  rep.columns = {"nu", "p", "k", "dk_dnu", "dk_dp", "condition_residual"};

  Worst cond, fd_nu, fd_p, k2, k1p, kslit, kinf, lim;
  bool monotone_nu = true, sign_ok = true, ak_ok = true;
  std::string monotone_where = "-", sign_where = "-", ak_where = "-";

  for (const auto& p : p_grid) {
    double prev = -std::numeric_limits<double>::infinity();
    for (double nu : nu_grid) {
      const SectorSpec sec(nu);
      const double k = radial_exponent(sec, p).k;
      const std::string at = case_tag(nu, p);
      const bool slit = std::abs(2 * nu - 1) < 1e-8;
      const double dkn = slit ? kNaN : dk_dnu(sec, p);
      const double dkp = p.is_finite() ? dk_dp(sec, p) : kNaN;
      const bool two = p.is_finite() && p.value() == 2.0;
      const double res = p.is_finite() ? exponent_condition_residual(k, sec, p) : kNaN;
      rep.rows.push_back({nu, p.value(), k, dkn, dkp, res});

      if (!std::isnan(res)) cond.see(std::abs(res), at);
      if (k < prev - 1e-15) {
        monotone_nu = false;
        monotone_where = at;
      }
      prev = k;
      if (p.is_finite()) {
        const double pv = p.value();
        if (!(nu < 1.0 ? dkp > 0.0 : nu == 1.0 ? dkp == 0.0 : dkp < 0.0)) {
          sign_ok = false;
          sign_where = at;
        }
        if (pv > 2.0 && !(p.a() * k > 1.0)) {
          ak_ok = false;
          ak_where = at;
        }
        if (!slit && !two && std::abs(pv - 2.0) > 1e-3) {
          const double fd = fd_derivative([&](double x) { return k_of(nu, PExponent::finite(x)); }, pv, 1e-6);
          fd_p.see(std::abs(fd - dkp) / std::max(std::abs(dkp), 1.0), at);
        }
        if (slit) kslit.see(std::abs(k - (pv - 1.0) / pv), at);
      }
      if (!slit && !two && nu - 1e-6 > 0.5) {
        const double fd = fd_derivative([&](double x) { return k_of(x, p); }, nu, 1e-6);
        fd_nu.see(std::abs(fd - dkn) / std::max(std::abs(dkn), 1.0), at);
      }
      if (nu == 1.0) k1p.see(std::abs(k - 1.0), at);
      if (p.is_infinite()) {
        const double expect = nu <= 1.0 ? 1.0 : nu * nu / (2 * nu - 1);
        kinf.see(std::abs(k - expect), at);
      }
    }
  }
  for (double nu : nu_grid) {
    const SectorSpec sec(nu);
    k2.see(std::abs(radial_exponent(sec, PExponent::finite(2.0)).k - nu), case_tag(nu, PExponent::finite(2.0)));
    lim.see(std::abs(k_of(nu, PExponent::finite(1e6)) - k_of(nu, PExponent::infinity())),
            "nu=" + format_shortest(nu));
  }

  rep.check("k(nu,2) = nu to 1e-12", k2.value <= 1e-12, k2.str());
  rep.check("k(1,p) = 1 to 1e-12", k1p.value <= 1e-12, k1p.str());
  rep.check("k(1/2,p) = (p-1)/p to 1e-12", kslit.value <= 1e-12, kslit.str());
  rep.check("k(nu,inf) piecewise limit to 1e-12", kinf.value <= 1e-12, kinf.str());
  rep.check("condition residual <= 1e-9", cond.value <= 1e-9, cond.str());
  rep.check("k nondecreasing in nu", monotone_nu, "first violation at " + monotone_where);
  rep.check("dk/dp sign: > 0 for nu < 1, = 0 at nu = 1, < 0 for nu > 1", sign_ok,
            "first violation at " + sign_where);
  rep.check("dk/dnu matches finite differences to 1e-5", fd_nu.value <= 1e-5, fd_nu.str());
  rep.check("dk/dp matches finite differences to 1e-5", fd_p.value <= 1e-5, fd_p.str());
  rep.check("a k > 1 for p > 2", ak_ok, "first violation at " + ak_where);
  rep.check("|k(nu,1e6) - k(nu,inf)| <= 1e-4", lim.value <= 1e-4, lim.str());

  // Qualitative shape of the k(nu, .) curves.
  bool small_ok = true, large_ok = true;
  std::string small_where = "-", large_where = "-";
  for (double nu : nu_grid) {
    const double k_low = k_of(nu, PExponent::finite(1.0 + 1e-6));
    if (nu < 1.0 && !(k_low < 1e-3)) {
      small_ok = false;
      small_where = "nu=" + format_shortest(nu);
    }
    if (nu > 1.0 && !(k_low > 1e3)) {
      large_ok = false;
      large_where = "nu=" + format_shortest(nu);
    }
  }
  rep.check("nu < 1: k -> 0 as p -> 1+", small_ok, "k(nu,1+1e-6) < 1e-3; violation at " + small_where);
  rep.check("nu > 1: k -> inf as p -> 1+", large_ok, "k(nu,1+1e-6) > 1e3; violation at " + large_where);
  const double asym = k_of(100.0, PExponent::finite(3.0)) / (3.0 * 100.0 / 4.0);
  rep.check("k(100,3) / (p nu / (2(p-1))) in [0.9, 1.1]", asym >= 0.9 && asym <= 1.1, "ratio " + g6(asym));
  rep.results = {{"asymptotic_ratio", asym}};
  return rep;
}

// ---------------------------------------------------------------------------
// Profile

ExperimentReport run_profile_invariants(const std::vector<double>& nu_grid,
                                        const std::vector<PExponent>& p_grid, int n_samples,
                                        std::uint64_t seed) {
  ExperimentReport rep("profile_invariants", "grid", "grid");
  nlohmann::json pj = nlohmann::json::array();
  for (const auto& p : p_grid) pj.push_back(p.to_string());
  rep.parameters = {{"nu_grid", nu_grid}, {"p_grid", pj}, {"samples", n_samples}};
  rep.provenance = {{"seed", seed}, {"symmetry_angles", 100}, {"round_trip_angles", 200}};
  rep.columns = {"nu", "p", "k", "f_0", "f_left", "f_right", "fprime_0", "f_min", "f_max",
                 "symmetry_err", "round_trip_err", "min_f_middle", "min_abs_fprime_outer",
                 "max_abs_fprime"};

  Worst f0, fside, fp0, range, sym, rt;
  bool built = true, bands = true;
  std::string build_detail = "all built", band_where = "-";
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  for (double nu : nu_grid) {
    for (const auto& p : p_grid) {
      const std::string at = case_tag(nu, p);
      std::optional<AngularProfile> prof;
      try {
        prof = build_profile(SectorSpec(nu), p, n_samples);
      } catch (const std::exception& e) {
        built = false;
        build_detail = at + ": " + e.what();
        continue;
      }
      const double half = prof->half_aperture();
      const double v0 = prof->f(0.0);
      const double vl = prof->f(-half);
      const double vr = prof->f(half);
      const double d0 = prof->fprime(0.0);
      double fmin = 1.0, fmax = 0.0;
      for (const auto& s : prof->samples()) {
        fmin = std::min(fmin, s.f);
        fmax = std::max(fmax, s.f);
      }
      double sym_err = 0.0;
      for (int m = 1; m <= 100; ++m) {
        const double phi = half * m / 101.0;
        const auto [a, ap] = prof->eval(phi);
        const auto [b, bp] = prof->eval(-phi);
        sym_err = std::max({sym_err, std::abs(a - b), std::abs(ap + bp)});
      }
      const auto& tab = prof->samples();
      for (std::size_t j = 0; j < tab.size(); ++j) {
        const auto& m = tab[tab.size() - 1 - j];
        sym_err = std::max({sym_err, std::abs(tab[j].f - m.f), std::abs(tab[j].fprime + m.fprime)});
      }

      double rt_err = kNaN;
      if (prof->angle_map()) {
        const AngleMap& map = *prof->angle_map();
        const bool stream = prof->profile_case() == ProfileCase::P_LT2_STREAM;
        rt_err = 0.0;
        for (int m = 0; m < 200; ++m) {
          // Stream profiles use their base map on the extended domain.
          const double phi = stream ? half * (0.5 + 1.5 * unit(rng)) : half * unit(rng);
          if (map.degenerate() && std::abs(phi) <= map.plateau_half_width()) continue;
          rt_err = std::max(rt_err, std::abs(map.phi_of_theta(map.theta_of_phi(phi)) - phi));
        }
        for (int m = 0; m < 200; ++m) {
          const double theta = 0.5 * kPi * unit(rng);
          rt_err = std::max(rt_err, std::abs(map.theta_of_phi(map.phi_of_theta(theta)) - theta));
        }
        rt.see(rt_err, at);
      }
      const auto& bc = prof->band_constants();
      if (!(bc.min_f_middle > 0.0 && bc.min_abs_fprime_outer > 0.0)) {
        bands = false;
        band_where = at;
      }
      f0.see(std::abs(v0 - 1.0), at);
      fside.see(std::max(std::abs(vl), std::abs(vr)), at);
      fp0.see(std::abs(d0), at);
      range.see(std::max(-fmin, fmax - 1.0), at);
      sym.see(sym_err, at);
      rep.rows.push_back({nu, p.value(), prof->k(), v0, vl, vr, d0, fmin, fmax, sym_err, rt_err,
                          bc.min_f_middle, bc.min_abs_fprime_outer, bc.max_abs_fprime});
    }
  }
  rep.check("every profile builds", built, build_detail);
  rep.check("f(0) = 1", f0.value <= 1e-12, f0.str());
  rep.check("|f(+-pi/(2nu))| <= 1e-9", fside.value <= 1e-9, fside.str());
  rep.check("|f'(0)| <= 1e-9", fp0.value <= 1e-9, fp0.str());
  rep.check("0 <= f <= 1", range.value <= 1e-12, "largest excursion " + g6(range.value) + " at " + range.where);
  rep.check("f even, f' odd to 1e-10", sym.value <= 1e-10, sym.str());
  rep.check("theta <-> phi round trip to 1e-10", rt.value <= 1e-10, rt.str());
  rep.check("band constants positive", bands, "first violation at " + band_where);
  return rep;
}

// ---------------------------------------------------------------------------
// PDE residuals

ExperimentReport run_pde_residuals(const std::vector<double>& nu_grid,
                                   const std::vector<PExponent>& p_grid, int n_samples) {
  ExperimentReport rep("pde_residuals", "grid", "grid");
  nlohmann::json pj = nlohmann::json::array();
  for (const auto& p : p_grid) pj.push_back(p.to_string());
  rep.parameters = {{"nu_grid", nu_grid}, {"p_grid", pj}, {"samples", n_samples}};
  rep.provenance = {{"polar_points", 100},     {"polar_step", 1e-3}, {"halving_steps", {1e-2, 5e-3}},
                    {"inf_points", 200},       {"inf_step", 1e-3},   {"ridge_band", 1e-3}};
  rep.columns = {"nu", "p", "k", "separation", "polar", "halving_ratio", "inf_separation", "inf_laplace"};

  Worst sep, polar, infsep, inflap;
  double ratio_lo = std::numeric_limits<double>::infinity(), ratio_hi = 0.0;
  std::string ratio_lo_at = "-", ratio_hi_at = "-";
  nlohmann::json reports = nlohmann::json::array();

  for (double nu : nu_grid) {
    for (const auto& p : p_grid) {
      const std::string at = case_tag(nu, p);
      const AngularProfile prof = build_profile(SectorSpec(nu), p, n_samples);
      double s_res = kNaN, pl = kNaN, ratio = kNaN, is = kNaN, il = kNaN;
      nlohmann::json entry = {{"nu", nu}, {"p", p.to_string()}};
      if (p.is_finite()) {
        if (prof.profile_case() != ProfileCase::P2_CLOSED) {
          const auto r = separation_report(prof);
          s_res = r.max_abs_residual;
          sep.see(s_res, at);
          entry["separation"] = r.to_json();
        }
        const auto r = polar_plap_report(prof, 100, 1e-3, 1.0);
        pl = r.max_abs_residual;
        polar.see(pl, at);
        entry["polar"] = r.to_json();
        const double big = polar_plap_report(prof, 100, 1e-2, 1.0).max_abs_residual;
        const double small = polar_plap_report(prof, 100, 5e-3, 1.0).max_abs_residual;
        ratio = big / small;
        if (ratio < ratio_lo) {
          ratio_lo = ratio;
          ratio_lo_at = at;
        }
        if (ratio > ratio_hi) {
          ratio_hi = ratio;
          ratio_hi_at = at;
        }
      } else {
        const auto a = inf_separation_report(prof, 200, 1e-3, 1e-3);
        const auto b = inf_lap_report(prof, 100, 1e-3, 1.0, 1e-3);
        is = a.max_abs_residual;
        il = b.max_abs_residual;
        infsep.see(is, at);
        inflap.see(il, at);
        entry["inf_separation"] = a.to_json();
        entry["inf_laplace"] = b.to_json();
      }
      reports.push_back(std::move(entry));
      rep.rows.push_back({nu, p.value(), prof.k(), s_res, pl, ratio, is, il});
    }
  }
  rep.results = {{"reports", reports}};
  rep.check("separation residual <= 1e-3", sep.value <= 1e-3, sep.str());
  rep.check("polar p-Laplace residual <= 1e-3", polar.value <= 1e-3, polar.str());
  rep.check("step halving ratio in [3, 5]", ratio_lo >= 3.0 && ratio_hi <= 5.0,
            "min " + g6(ratio_lo) + " at " + ratio_lo_at + ", max " + g6(ratio_hi) + " at " + ratio_hi_at);
  rep.check("inf separation residual <= 1e-3 off the ridge", infsep.value <= 1e-3, infsep.str());
  rep.check("inf-Laplace residual <= 1e-3 off the ridge", inflap.value <= 1e-3, inflap.str());
  return rep;
}

// ---------------------------------------------------------------------------
// Stream function

ExperimentReport run_stream_consistency(double nu, double q, int n_samples) {
  if (!(q > 1.0 && q < 2.0)) throw DomainError("q must lie in (1, 2)");
  if (n_samples < 8) throw DomainError("n_samples must be >= 8");
  const SectorSpec sec(nu);
  const PExponent qq = PExponent::finite(q);
  const PExponent big_p = qq.conjugate();
  const double P = big_p.value();
  ExperimentReport rep("stream_consistency", format_shortest(nu), format_shortest(q));
  rep.parameters = {{"nu", nu}, {"q", q}, {"conjugate_p", P}, {"samples", n_samples}};
  rep.provenance = {{"derivative", "4th-order central difference"}, {"fd_step", 1e-3},
                    {"radii", {1.0, 2.0}}};
  rep.columns = {"psi", "theta", "f", "fprime", "g", "gprime", "identity1", "identity2", "identity3",
                 "gradient_err"};

  const AngleMap map = AngleMap::make(sec, big_p);
  const double K = map.k();
  const double a = map.a();
  const double lam = (P - 1.0) * (K - 1.0) + 1.0;
  const double kq = radial_exponent(sec, qq).k;
  const double c = std::pow((a * K - 1.0) / (a * K), -0.5 * (K - 1.0));
  const double half = sec.half_aperture();

  auto base = [&](double psi) { return profile_at_theta(map.theta_of_phi(psi), map); };
  // Closed form of the stream profile in terms of theta, independent of the
  // pointwise conjugation formula.
  auto g_closed = [&](double psi) {
    const double th = map.theta_of_phi(psi);
    const double cs = std::cos(th);
    return std::pow(K * c, P - 1.0) * std::pow(1.0 - cs * cs / (a * K), 0.5 * (lam - 1.0)) *
           std::sin(th) / lam;
  };
  auto u_at = [&](double r, double psi) { return std::pow(r, K) * base(psi).first; };
  auto v_at = [&](double r, double psi) { return std::pow(r, lam) * g_closed(psi); };

  Worst id1, id2, id3, grad;
  const double h = 1e-3;
  for (int m = 0; m < n_samples; ++m) {
    const double psi = -half + 3.0 * half * (m + 0.5) / n_samples;
    const auto [f, fp] = base(psi);
    const double mod2 = K * K * f * f + fp * fp;
    const double w = std::pow(mod2, 0.5 * (P - 2.0));
    const double g = g_closed(psi);
    const double gp = fd4(g_closed, psi, h);
    const double scale = std::pow(mod2, 0.5 * (P - 1.0));  // |grad v| at r = 1
    const std::string at = "psi=" + g6(psi);
    const double e1 = std::abs(lam * lam * g * g + gp * gp - mod2 * w * w) / (scale * scale);
    const double e2 = std::abs(lam * g + fp * w) / scale;
    const double e3 = std::abs(gp - K * f * w) / scale;
    double eg = 0.0;
    for (double r : {1.0, 2.0}) {
      const double ur = fd4([&](double x) { return u_at(x, psi); }, r, h);
      const double up = fd4([&](double x) { return u_at(r, x); }, psi, h) / r;
      const double vr = fd4([&](double x) { return v_at(x, psi); }, r, h);
      const double vp = fd4([&](double x) { return v_at(r, x); }, psi, h) / r;
      const double gu = std::hypot(ur, up);
      const double gv = std::hypot(vr, vp);
      eg = std::max(eg, std::abs(gv - std::pow(gu, P - 1.0)) / std::pow(gu, P - 1.0));
    }
    id1.see(e1, at);
    id2.see(e2, at);
    id3.see(e3, at);
    grad.see(eg, at);
    rep.rows.push_back({psi, map.theta_of_phi(psi), f, fp, g, gp, e1, e2, e3, eg});
  }

  // Window 1 - cos^2(theta)/D with D = (q-1) k(nu,q)/(2-q) + 1, which must
  // coincide with a k at the conjugate exponent.
  const double D = (q - 1.0) / (2.0 - q) * kq + 1.0;
  const double kappa = 1.0 - 1.0 / D;
  double wmin = 1.0, wmax = 0.0;
  for (int m = 0; m <= 720; ++m) {
    const double th = -0.5 * kPi + 1.5 * kPi * m / 720.0;
    const double v = 1.0 - std::cos(th) * std::cos(th) / D;
    wmin = std::min(wmin, v);
    wmax = std::max(wmax, v);
  }

  // The built profile is the rotated, renormalised closed form.
  const AngularProfile prof = build_profile(sec, qq, 2 * n_samples);
  const double top = g_closed(half);
  double rot_err = 0.0;
  for (int m = 0; m <= n_samples; ++m) {
    const double phi = -half + 2.0 * half * m / n_samples;
    rot_err = std::max(rot_err, std::abs(prof.f(phi) - g_closed(std::clamp(phi + half, 0.0, 2 * half)) / top));
  }

  rep.results = {{"stream_exponent", lam}, {"k_nu_q", kq},  {"kappa", kappa},
                 {"window_min", wmin},     {"window_max", wmax}, {"a_k_conjugate", a * K},
                 {"window_denominator", D}, {"rotation_err", rot_err}};
  rep.check("identity 1: lam^2 g^2 + g'^2 = (k^2 f^2 + f'^2)^(p-1), <= 1e-7", id1.value <= 1e-7, id1.str());
  rep.check("identity 2: lam g = -f' (k^2 f^2 + f'^2)^((p-2)/2), <= 1e-7", id2.value <= 1e-7, id2.str());
  rep.check("identity 3: g' = k f (k^2 f^2 + f'^2)^((p-2)/2), <= 1e-7", id3.value <= 1e-7, id3.str());
  rep.check("stream exponent = k(nu,q) to 1e-10", std::abs(lam - kq) <= 1e-10,
            "lam " + format_shortest(lam) + ", k(nu,q) " + format_shortest(kq));
  rep.check("|grad v| = |grad u|^(p-1) to 1e-7", grad.value <= 1e-7, grad.str());
  rep.check("window denominator equals a k at the conjugate exponent",
            std::abs(D - a * K) <= 1e-10 * D, "D " + g6(D) + ", aK " + g6(a * K));
  rep.check("0 < kappa < 1", kappa > 0.0 && kappa < 1.0, "kappa " + g6(kappa));
  rep.check("kappa <= 1 - cos^2/D <= 1", wmin >= kappa - 1e-15 && wmax <= 1.0,
            "range [" + g6(wmin) + ", " + g6(wmax) + "]");
  rep.check("built profile equals rotated closed form to 1e-9", rot_err <= 1e-9, "max " + g6(rot_err));
  return rep;
}

// ---------------------------------------------------------------------------
// Measure

namespace {

struct MeasureChecks {
  double min_interior = 1.0;
  double max_interior = 0.0;
  double boundary_err = 0.0;
  double symmetry_err = 0.0;
  double monotone_violation = 0.0;
};

MeasureChecks measure_checks(const MeasureSolution& sol) {
  MeasureChecks c;
  const auto& pb = sol.problem();
  for (int i = 0; i <= pb.n_r; ++i) {
    for (int j = 0; j <= pb.n_phi; ++j) {
      const double v = sol.at(i, j);
      if (sol.is_boundary(i, j)) {
        c.boundary_err = std::max(c.boundary_err, std::abs(v - sol.boundary_value(i, j)));
      } else {
        c.min_interior = std::min(c.min_interior, v);
        c.max_interior = std::max(c.max_interior, v);
      }
      c.symmetry_err = std::max(c.symmetry_err, std::abs(v - sol.at(i, pb.n_phi - j)));
    }
  }
  const int mid = pb.n_phi / 2;
  for (int i = 0; i < pb.n_r; ++i) {
    c.monotone_violation = std::max(c.monotone_violation, sol.at(i, mid) - sol.at(i + 1, mid));
  }
  return c;
}

void add_measure_invariants(ExperimentReport& rep, const MeasureSolution& sol, const std::string& tag) {
  const MeasureChecks c = measure_checks(sol);
  rep.check(tag + "solver converged", sol.converged,
            "iterations " + std::to_string(sol.iterations) + ", final update " + g6(sol.final_update));
  rep.check(tag + "0 < omega < 1 in the interior", c.min_interior > 0.0 && c.max_interior < 1.0,
            "range [" + g6(c.min_interior) + ", " + g6(c.max_interior) + "]");
  rep.check(tag + "boundary rows match the data", c.boundary_err == 0.0, "max " + g6(c.boundary_err));
  rep.check(tag + "omega(r,phi) = omega(r,-phi)", c.symmetry_err <= 1e-10, "max " + g6(c.symmetry_err));
  rep.check(tag + "omega nondecreasing in r along phi = 0", c.monotone_violation <= 1e-12,
            "largest decrease " + g6(c.monotone_violation));
}

nlohmann::json bounds_json(const ComparabilityBounds& b) {
  return {{"ratio_min", b.ratio_min}, {"ratio_max", b.ratio_max}, {"samples", b.samples}};
}

double drift(const ComparabilityBounds& a, const ComparabilityBounds& b) {
  return std::max(std::abs(a.ratio_min / b.ratio_min - 1.0), std::abs(a.ratio_max / b.ratio_max - 1.0));
}

// The certificate region stops at 0.9 R so that coarse and fine grids cover
// the same nodes; closer to the arc the two-cell margin moves with the mesh.
constexpr double kCertificateOuter = 0.9;

}  // namespace

ExperimentReport run_measure_experiment(double nu, double p, const MeasureGrid& grid, double rel_tol,
                                        bool mesh_check) {
  const double k = k_of(nu, PExponent::finite(p));
  ExperimentReport rep("measure", format_shortest(nu), format_shortest(p));
  rep.parameters = {{"nu", nu}, {"p", p}, {"k", k}, {"rel_tol", rel_tol}, {"mesh_check", mesh_check}};
  rep.provenance = {{"grid", grid.to_json()}, {"certificate_r_window", {grid.fit_lo, kCertificateOuter}}};
  rep.columns = {"r", "omega", "power_law"};

  const MeasureSolution sol = solve_measure(grid.problem(nu, p));
  add_measure_invariants(rep, sol, "");
  const SlopeFit fit = fit_slope(sol, 0.0, grid.fit_lo * grid.R, grid.fit_hi * grid.R);
  const double rel = std::abs(fit.exponent - k) / k;
  const auto cert = comparability_constants(sol, k, ComparabilityRegion::S_2nu, grid.fit_lo, kCertificateOuter);
  const auto upper = comparability_constants(sol, k, ComparabilityRegion::S_nu, grid.fit_lo, kCertificateOuter);
  const int mid = grid.n_phi / 2;
  for (int i = 0; i <= grid.n_r; ++i) {
    const double r = sol.r()[static_cast<std::size_t>(i)];
    rep.rows.push_back({r, sol.at(i, mid), std::pow(r / grid.R, k)});
  }
  rep.results = {{"solver", sol.summary()},
                 {"fit", fit.to_json()},
                 {"relative_error", rel},
                 {"certificate_S_2nu", bounds_json(cert)},
                 {"upper_S_nu", bounds_json(upper)}};
  rep.check("fitted exponent within tolerance of k(nu,p)", rel <= rel_tol,
            "fitted " + g6(fit.exponent) + ", k " + g6(k) + ", rel " + g6(rel) + ", tol " + g6(rel_tol));
  rep.check("certificate on S_2nu finite and positive",
            cert.ratio_min > 0.0 && std::isfinite(cert.ratio_max),
            "[" + g6(cert.ratio_min) + ", " + g6(cert.ratio_max) + "]");
  rep.check("upper ratio on S_nu finite", std::isfinite(upper.ratio_max), g6(upper.ratio_max));
  if (mesh_check) {
    MeasureGrid coarse = grid;
    coarse.n_r = grid.n_r / 2;
    coarse.n_phi = grid.n_phi / 2;
    const MeasureSolution csol = solve_measure(coarse.problem(nu, p));
    const auto ccert = comparability_constants(csol, k, ComparabilityRegion::S_2nu, grid.fit_lo, kCertificateOuter);
    const double d = drift(cert, ccert);
    const SlopeFit cfit = fit_slope(csol, 0.0, grid.fit_lo * grid.R, grid.fit_hi * grid.R);
    const double slope_change = std::abs(fit.exponent - cfit.exponent) / std::abs(fit.exponent);
    rep.results["coarse"] = {{"n_r", coarse.n_r},
                             {"n_phi", coarse.n_phi},
                             {"converged", csol.converged},
                             {"certificate_S_2nu", bounds_json(ccert)},
                             {"fit", cfit.to_json()},
                             {"certificate_drift", d},
                             {"slope_change", slope_change}};
    rep.check("certificate drift under mesh doubling < 2%", csol.converged && d < 0.02, "drift " + g6(d));
    rep.check("fitted exponent change under mesh doubling < 2%", slope_change < 0.02,
              "change " + g6(slope_change));
  }
  return rep;
}

ExperimentReport run_growth_bounds(double nu, double p, const MeasureGrid& grid) {
  const double k = k_of(nu, PExponent::finite(p));
  ExperimentReport rep("growth_bounds", format_shortest(nu), format_shortest(p));
  rep.parameters = {{"nu", nu}, {"p", p}, {"k", k}};
  rep.provenance = {{"grid", grid.to_json()}};
  rep.columns = {"r", "omega_full", "omega_inner", "power_law"};

  const MeasureSolution full = solve_measure(grid.problem(nu, p, ArcTarget::full_arc));
  const MeasureSolution inner = solve_measure(grid.problem(nu, p, ArcTarget::inner_arc));
  add_measure_invariants(rep, full, "full arc: ");
  add_measure_invariants(rep, inner, "inner arc: ");
  // Arc data: M = sup of the full-arc data, m = inf of the inner-arc data on
  // its support; both are 1.
  const double M = 1.0, m = 1.0;
  const auto up = comparability_constants(full, k, ComparabilityRegion::S_nu, grid.fit_lo, 1.0);
  const auto lo = comparability_constants(inner, k, ComparabilityRegion::S_2nu, grid.fit_lo, 0.5);
  const SlopeFit fit = fit_slope(full, 0.0, grid.fit_lo * grid.R, grid.fit_hi * grid.R);
  const double tol = default_slope_tolerance(nu, p);
  const double rel = std::abs(fit.exponent - k) / k;
  const int mid = grid.n_phi / 2;
  for (int i = 0; i <= grid.n_r; ++i) {
    const double r = full.r()[static_cast<std::size_t>(i)];
    rep.rows.push_back({r, full.at(i, mid), inner.at(i, mid), std::pow(r / grid.R, k)});
  }
  rep.results = {{"M", M},
                 {"m", m},
                 {"upper_constant", up.ratio_max / M},
                 {"lower_constant", lo.ratio_min / m},
                 {"upper_S_nu", bounds_json(up)},
                 {"lower_B_half_S_2nu", bounds_json(lo)},
                 {"fit", fit.to_json()},
                 {"solver_full", full.summary()},
                 {"solver_inner", inner.summary()}};
  rep.check("upper bound u <= c M (|x|/R)^k holds on S_nu with finite c", std::isfinite(up.ratio_max),
            "c = " + g6(up.ratio_max / M));
  rep.check("lower bound v >= c^-1 m (|x|/R)^k holds on B(0,R/2) n S_2nu with c^-1 > 0",
            lo.ratio_min > 0.0, "c^-1 = " + g6(lo.ratio_min / m));
  rep.check("fitted exponent within tolerance of k(nu,p)", rel <= tol,
            "fitted " + g6(fit.exponent) + ", k " + g6(k) + ", rel " + g6(rel));
  if (nu >= 4.0) {
    rep.check("cusp: decay faster than linear", fit.exponent > 1.0, "fitted " + g6(fit.exponent));
  }
  if (nu < 0.6) {
    const double slit = (p - 1.0) / p;
    const double srel = std::abs(fit.exponent - slit) / slit;
    rep.check("near the slit: rate within 15% of (p-1)/p", srel <= 0.15,
              "fitted " + g6(fit.exponent) + ", (p-1)/p " + g6(slit));
  }
  return rep;
}

ExperimentReport run_cusp_witness(const MeasureGrid& grid) {
  ExperimentReport rep("cusp_witness", "grid", "grid");
  rep.parameters = {{"cases", {{8.0, 2.0}, {0.51, 3.0}}}};
  rep.provenance = {{"grid", grid.to_json()}};
  rep.columns = {"nu", "p", "k", "fitted", "target"};
  const MeasureSolution cusp = solve_measure(grid.problem(8.0, 2.0));
  const MeasureSolution slit = solve_measure(grid.problem(0.51, 3.0));
  const SlopeFit fc = fit_slope(cusp, 0.0, grid.fit_lo * grid.R, grid.fit_hi * grid.R);
  const SlopeFit fs = fit_slope(slit, 0.0, grid.fit_lo * grid.R, grid.fit_hi * grid.R);
  rep.rows.push_back({8.0, 2.0, k_of(8.0, PExponent::finite(2.0)), fc.exponent, 5.0});
  rep.rows.push_back({0.51, 3.0, k_of(0.51, PExponent::finite(3.0)), fs.exponent, 2.0 / 3.0});
  rep.results = {{"cusp_fit", fc.to_json()}, {"slit_fit", fs.to_json()},
                 {"cusp_converged", cusp.converged}, {"slit_converged", slit.converged}};
  const double srel = std::abs(fs.exponent - 2.0 / 3.0) / (2.0 / 3.0);
  rep.check("fitted exponent at (8, 2) >= 5", cusp.converged && fc.exponent >= 5.0, "fitted " + g6(fc.exponent));
  rep.check("fitted exponent at (0.51, 3) within 15% of 2/3", slit.converged && srel <= 0.15,
            "fitted " + g6(fs.exponent) + ", rel " + g6(srel));
  return rep;
}

// ---------------------------------------------------------------------------
// Phragmen-Lindelof sharpness

ExperimentReport run_phragmen_check(double nu, PExponent p, const std::vector<double>& R_list, int n_samples) {
  ExperimentReport rep("phragmen", format_shortest(nu), p.to_string());
  const AngularProfile prof = build_profile(SectorSpec(nu), p, n_samples);
  const double k = prof.k();
  rep.parameters = {{"nu", nu}, {"p", p.to_string()}, {"k", k}, {"R_list", R_list}, {"samples", n_samples}};
  rep.columns = {"R", "M", "ratio"};
  double first = kNaN, spread = 0.0, worst_unit = 0.0;
  for (double R : R_list) {
    if (!(R > 0.0)) throw DomainError("R must be > 0");
    // sup over the arc of r^k f(phi), from the table and the exact centre.
    double M = eval_u({R, 0.0}, prof);
    for (const auto& s : prof.samples()) M = std::max(M, eval_u({R, s.phi}, prof));
    const double ratio = M / std::pow(R, k);
    if (std::isnan(first)) first = ratio;
    spread = std::max(spread, std::abs(ratio - first) / first);
    worst_unit = std::max(worst_unit, std::abs(ratio - 1.0));
    rep.rows.push_back({R, M, ratio});
  }
  rep.results = {{"spread", spread}, {"max_abs_ratio_minus_1", worst_unit}};
  rep.check("M(R)/R^k constant to 1e-9", spread <= 1e-9, "relative spread " + g6(spread));
  rep.check("M(R)/R^k = max f = 1", worst_unit <= 1e-9, "max |ratio - 1| " + g6(worst_unit));
  return rep;
}

// ---------------------------------------------------------------------------
// Walk-on-spheres oracle

std::vector<PolarPoint> mc_probe_points(double nu, double R) {
  const double half = SectorSpec(nu).half_aperture();
  static const double rs[10] = {0.3, 0.5, 0.7, 0.9, 0.5, 0.7, 0.3, 0.6, 0.8, 0.4};
  static const double fs[10] = {0, 0, 0, 0, 0.5, 0.5, -0.5, -0.25, 0.75, 0.25};
  std::vector<PolarPoint> pts;
  for (int i = 0; i < 10; ++i) pts.push_back({rs[i] * R, fs[i] * half});
  return pts;
}

ExperimentReport run_mc_oracle(double nu, const MeasureGrid& grid, std::int64_t walks, std::uint64_t seed) {
  ExperimentReport rep("mc_oracle", format_shortest(nu), "2");
  rep.parameters = {{"nu", nu}, {"p", 2.0}, {"walks", walks}};
  rep.provenance = {{"seed", seed}, {"shell", 1e-5}, {"grid", grid.to_json()}};
  rep.columns = {"r", "phi", "solver", "mc", "std_error", "z"};
  const MeasureSolution sol = solve_measure(grid.problem(nu, 2.0));
  const auto pts = mc_probe_points(nu, grid.R);
  const auto mc = mc_harmonic_measure(nu, grid.R, pts, walks, seed);
  double zmax = 0.0;
  std::string zwhere = "-";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double s = sol.interpolate(pts[i]);
    const double z = mc[i].std_error > 0.0 ? (mc[i].estimate - s) / mc[i].std_error : kNaN;
    if (!(std::abs(z) <= zmax)) {
      zmax = std::isnan(z) ? std::numeric_limits<double>::infinity() : std::abs(z);
      zwhere = "r=" + g6(pts[i].r) + " phi=" + g6(pts[i].phi);
    }
    rep.rows.push_back({pts[i].r, pts[i].phi, s, mc[i].estimate, mc[i].std_error, z});
  }
  rep.results = {{"max_abs_z", zmax}};
  rep.check("walk-on-spheres agrees with the solver within 3 stderr", zmax <= 3.0,
            "max |z| " + g6(zmax) + " at " + zwhere);
  return rep;
}

// ---------------------------------------------------------------------------
// Suites

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"exponent", "profile", "pde", "measure",
                                                 "stream",   "phragmen", "all"};
  return names;
}

std::vector<ExperimentReport> run_suite(const std::string& name, const VerifyOptions& options) {
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw DomainError("unknown suite '" + name + "'");
  }
  const bool all = name == "all";
  std::vector<ExperimentReport> out;
  const std::vector<double> profile_nus = {0.5, 1.0, 2.0, 4.0};
  std::vector<PExponent> profile_ps;
  for (double p : {1.5, 2.0, 3.0, 4.0}) profile_ps.push_back(PExponent::finite(p));
  profile_ps.push_back(PExponent::infinity());
  const int samples = options.samples;

  if (all || name == "exponent") out.push_back(run_exponent_table(default_nu_grid(), default_p_grid()));
  if (all || name == "profile") {
    out.push_back(run_profile_invariants(profile_nus, profile_ps, samples, options.seed));
  }
  if (all || name == "pde") out.push_back(run_pde_residuals(profile_nus, profile_ps, samples));
  if (all || name == "stream") {
    for (double nu : {0.5, 1.0, 2.0, 4.0}) {
      for (double q : {1.2, 1.5, 1.8}) out.push_back(run_stream_consistency(nu, q, 64));
    }
  }
  if (all || name == "phragmen") {
    const std::vector<double> Rs = {1.0, 10.0, 100.0, 1000.0};
    out.push_back(run_phragmen_check(1.0, PExponent::finite(2.0), Rs, samples));
    out.push_back(run_phragmen_check(2.0, PExponent::finite(3.0), Rs, samples));
    out.push_back(run_phragmen_check(1.0, PExponent::infinity(), Rs, samples));
    out.push_back(run_phragmen_check(2.0, PExponent::infinity(), Rs, samples));
  }
  if (all || name == "measure") {
    MeasureGrid grid = options.grid;
    std::int64_t walks = options.walks;
    if (options.quick) {
      grid.n_r = std::max(16, grid.n_r / 2);
      grid.n_phi = std::max(16, grid.n_phi / 2);
      walks = std::min<std::int64_t>(walks, 20000);
    }
    const std::pair<double, double> cases[] = {{1, 2}, {2, 2}, {1, 4}, {2, 3}, {0.75, 3}, {1, 1.5}};
    for (const auto& [nu, p] : cases) {
      out.push_back(run_measure_experiment(nu, p, grid, default_slope_tolerance(nu, p), !options.quick));
    }
    out.push_back(run_growth_bounds(2.0, 3.0, grid));
    out.push_back(run_growth_bounds(4.0, 2.0, grid));
    out.push_back(run_growth_bounds(0.51, 3.0, grid));
    out.push_back(run_cusp_witness(grid));
    for (double nu : {1.0, 2.0}) out.push_back(run_mc_oracle(nu, grid, walks, options.seed));
  }
  return out;
}

}  // namespace psector
