// Frequency-nadir cuts. The requirement  H·R ≥ c0 + q·Σγ_j H_sj²  describes a
// convex set whenever c0 > 0: √(HR) is concave on the positive orthant and
// √(c0 + qΣγH²) is a norm. Tangent planes at points of the surface are
// therefore supporting hyperplanes and never cut off a feasible point.

#include <algorithm>
#include <cmath>
#include <random>

#include "sccuc/uc.hpp"

namespace sccuc {

double NadirPlane::value(double h, double r, std::span<const double> hs) const {
  double v = a * h + b * r + d;
  for (std::size_t j = 0; j < c.size(); ++j) v += c[j] * hs[j];
  return v;
}

double NadirCurve::rhs(std::span<const double> hs) const {
  double s = c0;
  for (std::size_t j = 0; j < gamma.size(); ++j) s += q * gamma[j] * hs[j] * hs[j];
  return s;
}

bool NadirCurve::feasible(double h, double r, std::span<const double> hs) const {
  return h * r >= rhs(hs);
}

NadirCurve nadir_curve(const FrequencyParams& f) {
  if (!(f.nadir_limit > 0.0)) throw std::invalid_argument("nadir limit must be positive");
  if (!(f.delivery_time > 0.0)) throw std::invalid_argument("PFR delivery time must be positive");
  if (!(f.disturbance >= 0.0)) throw std::invalid_argument("disturbance must be non-negative");
  if (!(f.nominal_frequency > 0.0)) throw std::invalid_argument("nominal frequency must be positive");
  // Inertia enters the nadir expression as 2H/f0 (MWs/Hz on system base).
  const double k = 0.5 * f.nominal_frequency;
  NadirCurve n;
  n.c0 = k * (f.disturbance * f.disturbance * f.delivery_time / (4.0 * f.nadir_limit) -
              f.disturbance * f.delivery_time / 4.0 * f.damping);
  n.q = k * f.disturbance * f.delivery_time / 4.0;
  for (const auto& w : f.wind_farms) n.gamma.push_back(w.gamma);
  return n;
}

namespace {

struct TangentPoint {
  double h, r;
  std::vector<double> hs;
};

bool has_si_term(const NadirCurve& n, const NadirGrid& grid) {
  for (std::size_t j = 0; j < n.gamma.size(); ++j)
    if (n.gamma[j] > 0.0 && j < grid.hs_max.size() && grid.hs_max[j] > 0.0) return true;
  return false;
}

double lowest_h(const NadirCurve& n, const NadirGrid& grid) {
  return std::max(grid.h_min, n.c0 / grid.r_max);
}

void check_grid(const NadirCurve& n, const NadirGrid& grid) {
  if (grid.hs_max.size() != n.gamma.size())
    throw std::invalid_argument("nadir grid: one SI bound per wind farm is required");
  if (grid.h_points == 0 || grid.hs_levels == 0)
    throw std::invalid_argument("nadir grid: empty sampling grid");
  if (n.c0 <= 0.0) {
    if (has_si_term(n, grid))
      throw NadirRegionError("nadir requirement is non-convex: damping exceeds the disturbance term "
                             "while synthetic inertia adds negative damping");
    return;
  }
  if (!(grid.r_max > 0.0) || !(grid.h_max > 0.0) || grid.h_max * grid.r_max < n.c0)
    throw NadirRegionError("nadir requirement cannot be met: H_max·R_max = " +
                           std::to_string(grid.h_max * grid.r_max) + " < " + std::to_string(n.c0));
}

std::vector<TangentPoint> tangent_points(const NadirCurve& n, const NadirGrid& grid) {
  std::vector<TangentPoint> pts;
  const double h_lo = lowest_h(n, grid);
  const double h_hi = grid.h_max;
  const std::size_t levels = has_si_term(n, grid) ? grid.hs_levels : 1;
  for (std::size_t l = 0; l < levels; ++l) {
    const double frac = levels == 1 ? 0.0 : double(l) / double(levels - 1);
    std::vector<double> hs(grid.hs_max.size());
    for (std::size_t j = 0; j < hs.size(); ++j) hs[j] = frac * grid.hs_max[j];
    const double phi = n.rhs(hs);
    for (std::size_t i = 0; i < grid.h_points; ++i) {
      const double t = grid.h_points == 1 ? 0.5 : double(i) / double(grid.h_points - 1);
      const double h = h_lo * std::pow(h_hi / h_lo, t);
      pts.push_back({h, phi / h, hs});
    }
  }
  return pts;
}

}  // namespace

std::vector<NadirPlane> generate_nadir_planes(const FrequencyParams& f, const NadirGrid& grid) {
  const NadirCurve n = nadir_curve(f);
  check_grid(n, grid);
  if (n.c0 <= 0.0) {
    // Requirement holds for every H, R ≥ 0: a single vacuous cut.
    return {NadirPlane{0.0, 0.0, std::vector<double>(n.gamma.size(), 0.0), 0.0}};
  }
  std::vector<NadirPlane> planes;
  for (const auto& p : tangent_points(n, grid)) {
    NadirPlane pl;
    pl.a = -p.r;
    pl.b = -p.h;
    pl.c.resize(p.hs.size());
    for (std::size_t j = 0; j < p.hs.size(); ++j) pl.c[j] = 2.0 * n.q * n.gamma[j] * p.hs[j];
    pl.d = 2.0 * n.c0;
    planes.push_back(std::move(pl));
  }
  return planes;
}

NadirAudit audit_nadir_planes(const std::vector<NadirPlane>& planes, const FrequencyParams& f,
                              const NadirGrid& grid, std::size_t samples, std::uint64_t seed) {
  const NadirCurve n = nadir_curve(f);
  check_grid(n, grid);
  NadirAudit audit;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double h_lo = n.c0 > 0.0 ? lowest_h(n, grid) : std::max(grid.h_min, 1e-3);
  const double h_hi = std::max(grid.h_max, h_lo);

  auto violated_by = [&](double h, double r, const std::vector<double>& hs) {
    for (const auto& pl : planes) {
      double scale = std::abs(pl.a * h) + std::abs(pl.b * r) + std::abs(pl.d);
      for (std::size_t j = 0; j < hs.size(); ++j) scale += std::abs(pl.c[j] * hs[j]);
      if (pl.value(h, r, hs) > 1e-9 * std::max(1.0, scale)) return true;
    }
    return false;
  };

  std::vector<double> hs(grid.hs_max.size());
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t j = 0; j < hs.size(); ++j) hs[j] = unit(rng) * grid.hs_max[j];
    const double h = h_lo + unit(rng) * (h_hi - h_lo);
    const double r_min = std::max(0.0, n.rhs(hs) / h);
    // One in ten samples sits exactly on the surface.
    const double r = (s % 10 == 0) ? r_min : r_min * (1.0 + unit(rng)) + unit(rng) * grid.r_max * 0.1;
    ++audit.feasible_samples;
    if (violated_by(h, r, hs)) ++audit.feasible_rejected;
  }

  if (n.c0 > 0.0) {
    const auto pts = tangent_points(n, grid);
    for (std::size_t s = 0; s < samples; ++s) {
      const auto& p = pts[s % pts.size()];
      const double shrink = 1.0 - (1e-3 + unit(rng) * 9e-3);
      ++audit.infeasible_samples;
      if (!violated_by(p.h * shrink, p.r * shrink, p.hs)) ++audit.infeasible_accepted;
    }
  }
  return audit;
}

}  // namespace sccuc
