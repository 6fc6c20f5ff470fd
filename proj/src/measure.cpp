#include "psector/measure.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "psector/io.hpp"
#include "psector/root_find.hpp"

namespace psector {

namespace {

constexpr double kPi = std::numbers::pi;

// P1 triangle in (s, phi) = (log r, phi) coordinates.  The map to the plane
// is conformal, so the weak form keeps its shape with |grad_x u|^2 =
// |grad_(s,phi) u|^2 / r^2.
struct Triangle {
  std::size_t v[3];
  double area;    // in (s, phi)
  double inv_r2;  // 1/r^2 at the centroid
  double r2;
  double gs[3];   // barycentric gradients
  double gp[3];

  std::array<double, 2> gradient(const std::vector<double>& u) const {
    return {gs[0] * u[v[0]] + gs[1] * u[v[1]] + gs[2] * u[v[2]],
            gp[0] * u[v[0]] + gp[1] * u[v[1]] + gp[2] * u[v[2]]};
  }
};

// Two right triangles per cell.  The diagonal flips across phi = 0 so the
// mesh is mirror symmetric.
std::vector<Triangle> build_triangles(const std::vector<double>& r, const std::vector<double>& phi) {
  const int nr = static_cast<int>(r.size()) - 1;
  const int np = static_cast<int>(phi.size()) - 1;
  auto id = [&](int i, int j) {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(np + 1) + static_cast<std::size_t>(j);
  };
  std::vector<double> s(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) s[i] = std::log(r[i]);
  std::vector<Triangle> tris;
  tris.reserve(static_cast<std::size_t>(2 * nr * np));
  auto add = [&](int i0, int j0, int i1, int j1, int i2, int j2) {
    Triangle t{};
    const int ii[3] = {i0, i1, i2};
    const int jj[3] = {j0, j1, j2};
    double xs[3], xp[3];
    for (int a = 0; a < 3; ++a) {
      t.v[a] = id(ii[a], jj[a]);
      xs[a] = s[static_cast<std::size_t>(ii[a])];
      xp[a] = phi[static_cast<std::size_t>(jj[a])];
    }
    const double det = (xs[1] - xs[0]) * (xp[2] - xp[0]) - (xs[2] - xs[0]) * (xp[1] - xp[0]);
    t.area = 0.5 * std::abs(det);
    for (int a = 0; a < 3; ++a) {
      const int b = (a + 1) % 3, c = (a + 2) % 3;
      t.gs[a] = (xp[b] - xp[c]) / det;
      t.gp[a] = (xs[c] - xs[b]) / det;
    }
    const double sc = (xs[0] + xs[1] + xs[2]) / 3.0;
    t.r2 = std::exp(2.0 * sc);
    t.inv_r2 = 1.0 / t.r2;
    tris.push_back(t);
  };
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < np; ++j) {
      if (2 * j < np) {
        add(i, j, i + 1, j, i + 1, j + 1);
        add(i, j, i + 1, j + 1, i, j + 1);
      } else {
        add(i, j, i + 1, j, i, j + 1);
        add(i + 1, j, i + 1, j + 1, i, j + 1);
      }
    }
  }
  return tris;
}

// sum over triangles of (|grad_x u|^2 + eps^2)^(p/2) / p * r^2 |T|.
double triangle_energy(const std::vector<Triangle>& tris, const std::vector<double>& u, double p,
                       double eps2) {
  double e = 0.0;
  for (const Triangle& T : tris) {
    const auto g = T.gradient(u);
    const double g2 = (g[0] * g[0] + g[1] * g[1]) * T.inv_r2;
    e += std::pow(g2 + eps2, 0.5 * p) / p * T.r2 * T.area;
  }
  return e;
}

}  // namespace

std::string to_string(RadialSpacing s) {
  return s == RadialSpacing::uniform ? "uniform" : "logarithmic";
}

std::string to_string(ArcTarget a) { return a == ArcTarget::full_arc ? "full_arc" : "inner_arc"; }

void MeasureProblem::validate() const {
  if (!(nu >= 0.5) || !std::isfinite(nu)) throw DomainError("nu must be >= 0.5");
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("p must be finite and > 1");
  if (!(R > 0.0) || !std::isfinite(R)) throw DomainError("R must be > 0");
  if (n_r < 8 || n_phi < 8) throw DomainError("n_r and n_phi must be >= 8");
  if (n_phi % 2 != 0) throw DomainError("n_phi must be even so that phi = 0 is a node");
  if (arc == ArcTarget::inner_arc && n_phi % 4 != 0) {
    throw DomainError("inner_arc needs n_phi divisible by 4");
  }
  if (!(eps_reg > 0.0)) throw DomainError("eps_reg must be > 0");
  if (!(tol > 0.0)) throw DomainError("tol must be > 0");
  if (max_iter < 1) throw DomainError("max_iter must be >= 1");
  if (!(r_min_ratio > 0.0 && r_min_ratio < 1.0)) throw DomainError("r_min_ratio must lie in (0, 1)");
}

MeasureSolution MeasureSolution::from_field(const MeasureProblem& problem,
                                            const std::function<double(double, double)>& field) {
  problem.validate();
  MeasureSolution sol;
  sol.problem_ = problem;
  const int nr = problem.n_r;
  const int np = problem.n_phi;
  const double r_min = problem.r_min_ratio * problem.R;
  sol.r_.resize(static_cast<std::size_t>(nr) + 1);
  for (int i = 0; i <= nr; ++i) {
    const double t = static_cast<double>(i) / nr;
    sol.r_[static_cast<std::size_t>(i)] =
        problem.spacing == RadialSpacing::logarithmic
            ? r_min * std::pow(problem.R / r_min, t)
            : r_min + (problem.R - r_min) * t;
  }
  sol.r_.front() = r_min;
  sol.r_.back() = problem.R;
  const double half = kPi / (2.0 * problem.nu);
  sol.phi_.resize(static_cast<std::size_t>(np) + 1);
  for (int j = 0; j <= np; ++j) sol.phi_[static_cast<std::size_t>(j)] = -half + 2.0 * half * j / np;
  sol.phi_[static_cast<std::size_t>(np / 2)] = 0.0;
  sol.phi_.back() = half;

  sol.omega_.assign(static_cast<std::size_t>(nr + 1) * static_cast<std::size_t>(np + 1), 0.0);
  for (int i = 0; i <= nr; ++i) {
    for (int j = 0; j <= np; ++j) {
      sol.omega_[sol.index(i, j)] =
          sol.is_boundary(i, j) ? sol.boundary_value(i, j)
                                : field(sol.r_[static_cast<std::size_t>(i)],
                                        sol.phi_[static_cast<std::size_t>(j)]);
    }
  }
  return sol;
}

double MeasureSolution::boundary_value(int i, int j) const {
  const int np = problem_.n_phi;
  if (i != problem_.n_r || i == 0) return 0.0;
  if (problem_.arc == ArcTarget::full_arc) {
    return (j == 0 || j == np) ? 0.5 : 1.0;
  }
  // Sub-arc |phi| <= pi/(4nu): nodes np/4 .. 3np/4, jump nodes get 1/2.
  const int lo = np / 4;
  const int hi = 3 * np / 4;
  if (j == lo || j == hi) return 0.5;
  return (j > lo && j < hi) ? 1.0 : 0.0;
}

double MeasureSolution::interpolate(PolarPoint point) const {
  const double half = kPi / (2.0 * problem_.nu);
  if (!(point.r >= r_.front() && point.r <= r_.back()) ||
      !(std::abs(point.phi) <= half * (1.0 + 1e-12))) {
    throw DomainError("point lies outside the grid");
  }
  const int nr = problem_.n_r;
  const int np = problem_.n_phi;
  auto it = std::upper_bound(r_.begin(), r_.end(), point.r);
  int i = static_cast<int>(it - r_.begin()) - 1;
  i = std::clamp(i, 0, nr - 1);
  const double s0 = std::log(r_[static_cast<std::size_t>(i)]);
  const double s1 = std::log(r_[static_cast<std::size_t>(i) + 1]);
  const double ts = std::clamp((std::log(point.r) - s0) / (s1 - s0), 0.0, 1.0);
  const double x = (point.phi + half) / (2.0 * half) * np;
  const int j = std::clamp(static_cast<int>(std::floor(x)), 0, np - 1);
  const double tp = std::clamp(x - j, 0.0, 1.0);
  return (1 - ts) * (1 - tp) * at(i, j) + (1 - ts) * tp * at(i, j + 1) +
         ts * (1 - tp) * at(i + 1, j) + ts * tp * at(i + 1, j + 1);
}

double MeasureSolution::energy() const {
  const auto tris = build_triangles(r_, phi_);
  return triangle_energy(tris, omega_, problem_.p, std::pow(problem_.eps_reg / problem_.R, 2));
}

std::string MeasureSolution::to_csv() const {
  CsvTable table({"r", "phi", "omega"});
  table.add_comment("nu=" + format_shortest(problem_.nu));
  table.add_comment("p=" + format_shortest(problem_.p));
  table.add_comment("R=" + format_shortest(problem_.R));
  table.add_comment("grid=" + std::to_string(problem_.n_r) + "x" + std::to_string(problem_.n_phi));
  table.add_comment("spacing=" + to_string(problem_.spacing));
  table.add_comment("arc=" + to_string(problem_.arc));
  for (int i = 0; i <= problem_.n_r; ++i) {
    for (int j = 0; j <= problem_.n_phi; ++j) {
      table.add_row({r_[static_cast<std::size_t>(i)], phi_[static_cast<std::size_t>(j)], at(i, j)});
    }
  }
  return table.str();
}

nlohmann::json MeasureSolution::summary() const {
  return {{"nu", problem_.nu},
          {"p", problem_.p},
          {"R", problem_.R},
          {"n_r", problem_.n_r},
          {"n_phi", problem_.n_phi},
          {"spacing", to_string(problem_.spacing)},
          {"arc", to_string(problem_.arc)},
          {"eps_reg", problem_.eps_reg},
          {"tolerance", problem_.tol},
          {"max_iter", problem_.max_iter},
          {"r_min", r_.front()},
          {"iterations", iterations},
          {"final_update", final_update},
          {"converged", converged},
          {"energy_history", energy_history}};
}

MeasureSolution solve_measure(const MeasureProblem& problem) {
  using SpMat = Eigen::SparseMatrix<double>;
  MeasureSolution sol = MeasureSolution::from_field(problem, [](double, double) { return 0.0; });
  const int nr = problem.n_r;
  const int np = problem.n_phi;
  const double eps2 = std::pow(problem.eps_reg / problem.R, 2);
  const double expo = 0.5 * (problem.p - 2.0);
  const auto tris = build_triangles(sol.r(), sol.phi());
  const std::size_t n_nodes = sol.omega().size();

  std::vector<int> uid(n_nodes, -1);
  int n_unknown = 0;
  for (int i = 1; i < nr; ++i) {
    for (int j = 1; j < np; ++j) uid[sol.index(i, j)] = n_unknown++;
  }

  std::vector<double> w(tris.size(), 1.0);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(tris.size() * 9);
  Eigen::VectorXd rhs(n_unknown);
  SpMat A(n_unknown, n_unknown);
  Eigen::SimplicialLDLT<SpMat> ldlt;
  bool analysed = false;

  // Weighted P1 stiffness with frozen weights w; returns the full nodal
  // vector solving the linear problem with the Dirichlet data of `sol`.
  auto linear_solve = [&]() {
    trips.clear();
    rhs.setZero();
    for (std::size_t t = 0; t < tris.size(); ++t) {
      const Triangle& T = tris[t];
      for (int a = 0; a < 3; ++a) {
        const int ra = uid[T.v[a]];
        if (ra < 0) continue;
        for (int b = 0; b < 3; ++b) {
          const double kab = w[t] * T.area * (T.gs[a] * T.gs[b] + T.gp[a] * T.gp[b]);
          const int rb = uid[T.v[b]];
          if (rb < 0) {
            rhs[ra] -= kab * sol.omega()[T.v[b]];
          } else {
            trips.emplace_back(ra, rb, kab);
          }
        }
      }
    }
    A.setFromTriplets(trips.begin(), trips.end());
    if (!analysed) {
      ldlt.analyzePattern(A);
      analysed = true;
    }
    ldlt.factorize(A);
    if (ldlt.info() != Eigen::Success) throw InvariantError("measure: linear system factorization failed");
    const Eigen::VectorXd x = ldlt.solve(rhs);
    std::vector<double> full = sol.omega();
    for (std::size_t n = 0; n < n_nodes; ++n) {
      if (uid[n] >= 0) full[n] = x[uid[n]];
    }
    return full;
  };

  // Harmonic start.  At p = 2 the weights are identically 1, so this single
  // solve is already the fixed point.
  sol.omega() = linear_solve();
  sol.iterations = 1;
  sol.energy_history.push_back(triangle_energy(tris, sol.omega(), problem.p, eps2));
  if (problem.p == 2.0) {
    sol.final_update = 0.0;
    sol.converged = true;
    return sol;
  }

  // The lagged-diffusivity direction d = A(w(u))^{-1} b - u is the energy
  // gradient preconditioned by A(w(u)); along it the energy is convex, and
  // the step is the root of its directional derivative, capped at 1 so each
  // iterate stays a convex combination of discrete-maximum-principle states.
  std::vector<double> dir(n_nodes, 0.0);
  std::vector<double> trial(n_nodes, 0.0);
  auto slope_at = [&](double alpha) {
    for (std::size_t n = 0; n < n_nodes; ++n) trial[n] = sol.omega()[n] + alpha * dir[n];
    double acc = 0.0;
    for (const Triangle& T : tris) {
      const auto gu = T.gradient(trial);
      const auto gd = T.gradient(dir);
      const double g2 = (gu[0] * gu[0] + gu[1] * gu[1]) * T.inv_r2;
      acc += T.area * std::pow(g2 + eps2, expo) * (gu[0] * gd[0] + gu[1] * gd[1]);
    }
    return acc;
  };

  double upd = 0.0;
  for (int it = 0; it < problem.max_iter; ++it) {
    for (std::size_t t = 0; t < tris.size(); ++t) {
      const auto g = tris[t].gradient(sol.omega());
      w[t] = std::pow((g[0] * g[0] + g[1] * g[1]) * tris[t].inv_r2 + eps2, expo);
    }
    const std::vector<double> next = linear_solve();
    upd = 0.0;
    for (std::size_t n = 0; n < n_nodes; ++n) {
      dir[n] = next[n] - sol.omega()[n];
      upd = std::max(upd, std::abs(dir[n]));
    }
    ++sol.iterations;
    double alpha = 1.0;
    if (upd >= problem.tol && slope_at(1.0) > 0.0 && slope_at(0.0) < 0.0) {
      alpha = solve_bracketed(slope_at, 0.0, 1.0, 1e-4).x;
    }
    for (std::size_t n = 0; n < n_nodes; ++n) sol.omega()[n] += alpha * dir[n];
    sol.energy_history.push_back(triangle_energy(tris, sol.omega(), problem.p, eps2));
    if (upd < problem.tol) {
      sol.converged = true;
      break;
    }
  }
  sol.final_update = upd;
  return sol;
}

nlohmann::json SlopeFit::to_json() const {
  return {{"exponent", exponent}, {"intercept", intercept}, {"rms", rms},
          {"r_min", r_min},       {"r_max", r_max},         {"ray_angle", ray_angle},
          {"samples", samples}};
}

SlopeFit fit_slope(const MeasureSolution& solution, double ray_angle, double r_lo, double r_hi) {
  const MeasureProblem& pb = solution.problem();
  const double half = kPi / (2.0 * pb.nu);
  if (!(r_lo > 0.0 && r_lo < r_hi && r_hi <= pb.R)) {
    throw DomainError("fit window must satisfy 0 < r_lo < r_hi <= R");
  }
  if (!(std::abs(ray_angle) <= half)) throw DomainError("ray angle lies outside the sector");
  const double x = (ray_angle + half) / (2.0 * half) * pb.n_phi;
  const int j = std::clamp(static_cast<int>(std::floor(x)), 0, pb.n_phi - 1);
  const double t = std::clamp(x - j, 0.0, 1.0);

  std::vector<double> lx, ly;
  double lo_seen = 0.0, hi_seen = 0.0;
  for (int i = 0; i <= pb.n_r; ++i) {
    const double r = solution.r()[static_cast<std::size_t>(i)];
    if (r < r_lo * (1 - 1e-12) || r > r_hi * (1 + 1e-12)) continue;
    const double w = t == 0.0 ? solution.at(i, j)
                              : (1 - t) * solution.at(i, j) + t * solution.at(i, j + 1);
    if (!(w > 0.0)) throw DomainError("omega must be positive inside the fit window");
    if (lx.empty()) lo_seen = r;
    hi_seen = r;
    lx.push_back(std::log(r / pb.R));
    ly.push_back(std::log(w));
  }
  if (lx.size() < 8) throw DomainError("fit window holds fewer than 8 grid radii");
  const double n = static_cast<double>(lx.size());
  double mx = 0, my = 0;
  for (std::size_t m = 0; m < lx.size(); ++m) {
    mx += lx[m];
    my += ly[m];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t m = 0; m < lx.size(); ++m) {
    sxx += (lx[m] - mx) * (lx[m] - mx);
    sxy += (lx[m] - mx) * (ly[m] - my);
  }
  const double slope = sxy / sxx;
  const double icpt = my - slope * mx;
  double ss = 0;
  for (std::size_t m = 0; m < lx.size(); ++m) {
    const double e = ly[m] - (icpt + slope * lx[m]);
    ss += e * e;
  }
  return {slope, icpt, std::sqrt(ss / n), lo_seen, hi_seen, ray_angle, static_cast<int>(lx.size())};
}

ComparabilityBounds comparability_constants(const MeasureSolution& solution, double k,
                                            ComparabilityRegion region, double r_lo_ratio,
                                            double r_hi_ratio) {
  if (!(k > 0.0)) throw DomainError("k must be > 0");
  const MeasureProblem& pb = solution.problem();
  const double half = kPi / (2.0 * pb.nu);
  const double lim = region == ComparabilityRegion::S_2nu ? 0.5 * half : half;
  ComparabilityBounds b{std::numeric_limits<double>::infinity(), 0.0, 0};
  for (int i = 2; i <= pb.n_r - 2; ++i) {
    const double r = solution.r()[static_cast<std::size_t>(i)];
    if (r < r_lo_ratio * pb.R || r > r_hi_ratio * pb.R * (1 + 1e-12)) continue;
    const double base = std::pow(r / pb.R, k);
    for (int j = 2; j <= pb.n_phi - 2; ++j) {
      if (std::abs(solution.phi()[static_cast<std::size_t>(j)]) > lim * (1 + 1e-12)) continue;
      const double ratio = solution.at(i, j) / base;
      b.ratio_min = std::min(b.ratio_min, ratio);
      b.ratio_max = std::max(b.ratio_max, ratio);
      ++b.samples;
    }
  }
  if (b.samples == 0) throw DomainError("comparability region holds no grid nodes");
  return b;
}

}  // namespace psector
