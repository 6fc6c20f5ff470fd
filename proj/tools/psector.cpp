// psector: command-line front end.
//
//   psector exponent --nu 0.5 --p 3
//   psector profile --nu 2 --p 3 --samples 128 --out profile.csv
//   psector measure --nu 1 --p 2 --mc-check
//   psector verify all --quick
//
// Exit codes: 0 ok, 1 verification failure, 2 usage or domain error,
// 3 internal invariant failure, 4 solver non-convergence.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "psector/config.hpp"
#include "psector/experiments.hpp"
#include "psector/exponent.hpp"
#include "psector/io.hpp"
#include "psector/measure.hpp"
#include "psector/profile.hpp"

using namespace psector;

namespace {

constexpr int kExitVerify = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInvariant = 3;
constexpr int kExitNoConvergence = 4;

std::string num(double x) { return format_significant(x, 10); }

void print(const std::string& key, double value) { std::cout << key << " = " << num(value) << "\n"; }

// Flags that may also come from the config file.  Unset optionals leave the
// file (or built-in) value alone.
struct Overrides {
  std::string config_path;
  std::string out_dir;
  std::optional<int> n_r, n_phi, samples, max_iter;
  std::optional<double> R, tol, eps_reg, r_min_ratio;
  std::optional<std::string> spacing;
  std::optional<std::int64_t> walks;
  std::optional<std::uint64_t> seed;

  CliConfig resolve() const {
    CliConfig c;
    if (!config_path.empty()) c = load_config(config_path, c);
    if (n_r) c.n_r = *n_r;
    if (n_phi) c.n_phi = *n_phi;
    if (samples) c.samples = *samples;
    if (max_iter) c.max_iter = *max_iter;
    if (R) c.R = *R;
    if (tol) c.tol = *tol;
    if (eps_reg) c.eps_reg = *eps_reg;
    if (r_min_ratio) c.r_min_ratio = *r_min_ratio;
    if (spacing) c.spacing = *spacing;
    if (walks) c.walks = *walks;
    if (seed) c.seed = *seed;
    if (!out_dir.empty()) c.out_dir = out_dir;
    c.validate();
    return c;
  }
};

MeasureGrid grid_from(const CliConfig& c) {
  MeasureGrid g;
  g.n_r = c.n_r;
  g.n_phi = c.n_phi;
  g.R = c.R;
  g.eps_reg = c.eps_reg;
  g.tol = c.tol;
  g.max_iter = c.max_iter;
  g.spacing = c.spacing == "uniform" ? RadialSpacing::uniform : RadialSpacing::logarithmic;
  g.r_min_ratio = c.r_min_ratio;
  return g;
}

void add_grid_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--n-r", o.n_r, "radial intervals");
  cmd->add_option("--n-phi", o.n_phi, "angular intervals");
  cmd->add_option("--R", o.R, "arc radius");
  cmd->add_option("--tol", o.tol, "solver tolerance on the max-norm update");
  cmd->add_option("--eps-reg", o.eps_reg, "gradient regularisation");
  cmd->add_option("--max-iter", o.max_iter, "solver iteration cap");
  cmd->add_option("--r-min-ratio", o.r_min_ratio, "inner ring radius relative to R");
  cmd->add_option("--spacing", o.spacing, "logarithmic or uniform");
}

int cmd_exponent(double nu, const std::string& p_text, bool derivatives, bool roots, bool table,
                 const Overrides& o) {
  const CliConfig cfg = o.resolve();
  if (table) {
    const ExperimentReport rep = run_exponent_table(default_nu_grid(), default_p_grid());
    const auto dir = resolve_out_dir(cfg);
    rep.write(dir);
    std::cout << "wrote " << (dir / (rep.file_stem() + ".csv")).string() << "\n";
    return 0;
  }
  const SectorSpec sec(nu);
  const PExponent p = PExponent::parse(p_text);
  print("k", radial_exponent(sec, p).k);
  if (derivatives) {
    if (std::abs(2 * nu - 1) > 1e-12) print("dk/dnu", dk_dnu(sec, p));
    if (p.is_finite()) print("dk/dp", dk_dp(sec, p));
  }
  if (roots) {
    if (p.is_infinite() || p.value() == 2.0) throw DomainError("roots need finite p != 2");
    const ExponentRoots r = radial_exponent_roots(sec, p);
    print("k1", r.k1);
    print("k2", r.k2);
  }
  return 0;
}

int cmd_profile(double nu, const std::string& p_text, const std::string& out, const Overrides& o) {
  const CliConfig cfg = o.resolve();
  const PExponent p = PExponent::parse(p_text);
  const AngularProfile prof = build_profile(SectorSpec(nu), p, cfg.samples);
  const std::filesystem::path path =
      out.empty() ? resolve_out_dir(cfg) / ("profile_" + format_shortest(nu) + "_" + p.to_string() + ".csv")
                  : std::filesystem::path(out);
  write_text_file(path, prof.to_csv());
  const double half = prof.half_aperture();
  std::cout << "case = " << to_string(prof.profile_case()) << "\n";
  print("k", prof.k());
  print("normalization", prof.normalization());
  const auto& bc = prof.band_constants();
  print("min_f_middle", bc.min_f_middle);
  print("min_abs_fprime_outer", bc.min_abs_fprime_outer);
  print("max_abs_fprime", bc.max_abs_fprime);
  print("f(-pi/(2nu))", prof.f(-half));
  print("f(pi/(2nu))", prof.f(half));
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}

int cmd_measure(double nu, double p, bool inner_arc, bool mc_check, const Overrides& o) {
  const CliConfig cfg = o.resolve();
  const MeasureGrid grid = grid_from(cfg);
  const ArcTarget arc = inner_arc ? ArcTarget::inner_arc : ArcTarget::full_arc;
  const MeasureProblem problem = grid.problem(nu, p, arc);
  problem.validate();
  const double k = k_of(nu, PExponent::finite(p));
  const MeasureSolution sol = solve_measure(problem);

  nlohmann::json summary = sol.summary();
  summary["k"] = k;
  bool mc_ok = true;
  print("k", k);
  if (sol.converged) {
    // A coarse grid may leave too few radii in the fit window; the field is
    // still written.
    try {
      const SlopeFit fit = fit_slope(sol, 0.0, grid.fit_lo * grid.R, grid.fit_hi * grid.R);
      const double r_hi = inner_arc ? 0.5 : 1.0;
      const auto cert = comparability_constants(sol, k, ComparabilityRegion::S_2nu, grid.fit_lo, r_hi);
      summary["fit"] = fit.to_json();
      summary["certificate_S_2nu"] = {{"ratio_min", cert.ratio_min},
                                      {"ratio_max", cert.ratio_max},
                                      {"samples", cert.samples},
                                      {"r_window", {grid.fit_lo, r_hi}}};
      print("slope", fit.exponent);
      print("ratio_min", cert.ratio_min);
      print("ratio_max", cert.ratio_max);
    } catch (const DomainError& e) {
      summary["fit_error"] = e.what();
      std::cerr << "warning: no slope fit: " << e.what() << "\n";
    }
  }
  if (mc_check) {
    if (p != 2.0 || inner_arc) throw DomainError("--mc-check needs p = 2 and the full arc");
    const auto pts = mc_probe_points(nu, grid.R);
    const auto mc = mc_harmonic_measure(nu, grid.R, pts, cfg.walks, cfg.seed);
    nlohmann::json block = nlohmann::json::array();
    double zmax = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double s = sol.interpolate(pts[i]);
      const double z = (mc[i].estimate - s) / mc[i].std_error;
      zmax = std::max(zmax, std::abs(z));
      block.push_back({{"r", pts[i].r}, {"phi", pts[i].phi}, {"solver", s},
                       {"mc", mc[i].estimate}, {"std_error", mc[i].std_error}, {"z", z}});
    }
    mc_ok = zmax <= 3.0;
    summary["mc_check"] = {{"walks", cfg.walks}, {"seed", cfg.seed}, {"points", block},
                           {"max_abs_z", zmax}, {"passed", mc_ok}};
    print("mc_max_abs_z", zmax);
  }

  const auto dir = resolve_out_dir(cfg);
  const std::string stem = std::string(inner_arc ? "measure_inner_" : "measure_") + format_shortest(nu) +
                           "_" + format_shortest(p);
  write_text_file(dir / (stem + ".csv"), sol.to_csv());
  write_text_file(dir / (stem + ".json"), summary.dump(2) + "\n");
  std::cout << "wrote " << (dir / (stem + ".json")).string() << "\n";
  if (!sol.converged) {
    std::cerr << "error: solver did not converge in " << sol.iterations << " iterations (update "
              << num(sol.final_update) << ")\n";
    return kExitNoConvergence;
  }
  if (!mc_ok) {
    std::cerr << "error: walk-on-spheres disagrees with the solver beyond 3 standard errors\n";
    return kExitVerify;
  }
  return 0;
}

int cmd_verify(const std::string& suite, bool quick, const Overrides& o) {
  const CliConfig cfg = o.resolve();
  VerifyOptions opt;
  opt.quick = quick;
  opt.grid = grid_from(cfg);
  opt.samples = cfg.samples;
  opt.walks = cfg.walks;
  opt.seed = cfg.seed;
  const auto reports = run_suite(suite, opt);
  const auto dir = resolve_out_dir(cfg);
  const Criterion* first = nullptr;
  std::string first_stem;
  for (const auto& rep : reports) {
    rep.write(dir);
    for (const auto& c : rep.criteria) {
      std::cout << (c.passed ? "PASS " : "FAIL ") << rep.file_stem() << ": " << c.name;
      if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
      std::cout << "\n";
    }
    if (first == nullptr && rep.first_failure() != nullptr) {
      first = rep.first_failure();
      first_stem = rep.file_stem();
    }
  }
  if (first != nullptr) {
    std::cerr << "error: " << first_stem << ": " << first->name << " failed\n";
    return kExitVerify;
  }
  std::cout << "all " << reports.size() << " reports passed\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Positive p-harmonic functions in planar sectors"};
  app.require_subcommand(1);
  Overrides o;
  app.add_option("--config", o.config_path, "key = value defaults file")->check(CLI::ExistingFile);
  app.add_option("--out-dir", o.out_dir, "output directory (PSECTOR_OUT_DIR overrides)");

  double nu = 1.0;
  std::string p_text = "2";
  double p_value = 2.0;
  std::string suite, out;
  bool derivatives = false, roots = false, table = false, inner_arc = false, mc_check = false,
       quick = false;

  auto* exp = app.add_subcommand("exponent", "radial exponent k(nu, p)");
  exp->add_option("--nu", nu, "sector parameter, >= 0.5");
  exp->add_option("--p", p_text, "exponent in (1, inf], 'inf' allowed");
  exp->add_flag("--derivatives", derivatives, "also print dk/dnu and dk/dp");
  exp->add_flag("--roots", roots, "print both roots of the squared condition");
  exp->add_flag("--table", table, "write the k(nu, p) table instead");

  auto* prof = app.add_subcommand("profile", "angular profile table");
  prof->add_option("--nu", nu)->required();
  prof->add_option("--p", p_text)->required();
  prof->add_option("--samples", o.samples, "table intervals");
  prof->add_option("--out", out, "CSV path");

  auto* meas = app.add_subcommand("measure", "p-harmonic measure of the arc");
  meas->add_option("--nu", nu)->required();
  meas->add_option("--p", p_value)->required();
  add_grid_flags(meas, o);
  meas->add_flag("--inner-arc", inner_arc, "measure of the middle half of the arc");
  meas->add_flag("--mc-check", mc_check, "compare with walk-on-spheres (p = 2)");
  meas->add_option("--walks", o.walks, "walks per probe point");
  meas->add_option("--seed", o.seed, "random seed");

  auto* ver = app.add_subcommand("verify", "run a verification suite");
  ver->add_option("suite", suite, "exponent, profile, pde, measure, stream, phragmen or all")->required();
  ver->add_flag("--quick", quick, "reduced grids");
  add_grid_flags(ver, o);
  ver->add_option("--samples", o.samples, "profile table intervals");
  ver->add_option("--walks", o.walks, "walks per probe point");
  ver->add_option("--seed", o.seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*exp) {
      if (!table && (exp->count("--nu") == 0 || exp->count("--p") == 0)) {
        throw DomainError("--nu and --p are required unless --table is given");
      }
      return cmd_exponent(nu, p_text, derivatives, roots, table, o);
    }
    if (*prof) return cmd_profile(nu, p_text, out, o);
    if (*meas) {
      if (!std::isfinite(p_value)) throw DomainError("measure needs finite p");
      return cmd_measure(nu, p_value, inner_arc, mc_check, o);
    }
    if (*ver) return cmd_verify(suite, quick, o);
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvariantError& e) {
    std::cerr << "invariant failed: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvariant;
  }
  return kExitUsage;
}
