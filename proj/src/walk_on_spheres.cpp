#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "psector/measure.hpp"

namespace psector {

namespace {

constexpr std::int64_t kBlock = 10000;
constexpr int kMaxSteps = 100000;

struct Sector2d {
  double R;
  double ex_hi, ey_hi;  // unit direction of the side phi = +half
  double ex_lo, ey_lo;  // and phi = -half

  double ray_distance(double x, double y, double ex, double ey) const {
    const double along = x * ex + y * ey;
    if (along <= 0.0) return std::hypot(x, y);
    return std::abs(x * ey - y * ex);
  }

  // Distance to the arc and to the nearer side.
  std::pair<double, double> distances(double x, double y) const {
    const double arc = R - std::hypot(x, y);
    const double side = std::min(ray_distance(x, y, ex_hi, ey_hi), ray_distance(x, y, ex_lo, ey_lo));
    return {arc, side};
  }
};

// Hits on the arc out of `count` walks from (x0, y0).
std::int64_t run_block(const Sector2d& dom, double x0, double y0, std::int64_t count,
                       double shell, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::int64_t hits = 0;
  for (std::int64_t w = 0; w < count; ++w) {
    double x = x0, y = y0;
    for (int step = 0; step < kMaxSteps; ++step) {
      const auto [arc, side] = dom.distances(x, y);
      const double d = std::min(arc, side);
      if (d < shell) {
        if (arc <= side) ++hits;
        break;
      }
      const double a = angle(rng);
      x += d * std::cos(a);
      y += d * std::sin(a);
    }
  }
  return hits;
}

}  // namespace

std::vector<McEstimate> mc_harmonic_measure(double nu, double R,
                                            const std::vector<PolarPoint>& points,
                                            std::int64_t n_walks, std::uint64_t seed,
                                            double shell) {
  const SectorSpec sector(nu);
  if (!(R > 0.0)) throw DomainError("R must be > 0");
  if (n_walks < 1) throw DomainError("n_walks must be >= 1");
  const double half = sector.half_aperture();
  const Sector2d dom{R, std::cos(half), std::sin(half), std::cos(half), -std::sin(half)};
  for (const auto& pt : points) {
    if (!(pt.r > 0.0 && pt.r < R && std::abs(pt.phi) < half)) {
      throw DomainError("walk-on-spheres points must be interior");
    }
  }

  // Work items are (point, block); each block owns a generator seeded from
  // (seed, point, block), so the partition over threads does not matter.
  const std::int64_t n_blocks = (n_walks + kBlock - 1) / kBlock;
  const std::size_t n_items = points.size() * static_cast<std::size_t>(n_blocks);
  std::vector<std::int64_t> hits(n_items, 0);
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t item = first; item < n_items; item += stride) {
      const std::size_t pi = item / static_cast<std::size_t>(n_blocks);
      const std::int64_t b = static_cast<std::int64_t>(item % static_cast<std::size_t>(n_blocks));
      const std::int64_t count = std::min(kBlock, n_walks - b * kBlock);
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(pi), static_cast<std::uint32_t>(b)};
      std::mt19937_64 rng(seq);
      const auto& pt = points[pi];
      hits[item] = run_block(dom, pt.r * std::cos(pt.phi), pt.r * std::sin(pt.phi), count,
                             shell * R, rng);
    }
  };
  const std::size_t n_threads =
      std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), n_items));
  if (n_threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work, t, n_threads);
    for (auto& th : pool) th.join();
  }

  std::vector<McEstimate> out;
  out.reserve(points.size());
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    std::int64_t total = 0;
    for (std::int64_t b = 0; b < n_blocks; ++b) total += hits[pi * static_cast<std::size_t>(n_blocks) + static_cast<std::size_t>(b)];
    const double n = static_cast<double>(n_walks);
    const double est = static_cast<double>(total) / n;
    out.push_back({est, std::sqrt(est * (1.0 - est) / n)});
  }
  return out;
}

}  // namespace psector
