#include "gapres/modes.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "gapres/asymptotics.hpp"

namespace gapres {

EigenMode build_mode(int n, const DensitySolution& densities, const CapacitanceMatrix& cap) {
  if (n != 1 && n != 2) throw std::invalid_argument("build_mode: mode index must be 1 or 2");
  if (cap.eig.decoupled)
    throw std::invalid_argument("build_mode: decoupled bodies (Cbar21 = 0), mode undefined");
  if (densities.psi2.size() == 0)
    throw std::invalid_argument("build_mode: needs a two-body solution");
  EigenMode mode;
  mode.index = n;
  mode.ratio = (n == 1) ? cap.eig.r1 : cap.eig.r2;
  mode.lambda = (n == 1) ? cap.eig.lambda1 : cap.eig.lambda2;
  mode.phi = mode.ratio * densities.psi1 + densities.psi2;
  return mode;
}

FieldSample keller_field(const ResonatorPair& pair, const GapProfile& profile, const Vec3& x) {
  const Vec2 xp(x.x(), x.y());
  if (xp.norm() >= 2.0 * profile.r0)
    throw std::domain_error("keller_field: point outside the gap parameterization");
  const double lo = lower_surface(pair, xp);
  const double hi = upper_surface(pair, xp);
  if (x.z() < lo || x.z() > hi)
    throw std::domain_error("keller_field: point outside the gap slab");
  const double d = hi - lo;  // eps + (h1 - h2)(x')
  FieldSample out;
  out.value = (x.z() - lo) / d;
  const Vec2 g1 = pair.upper.pole_height_gradient(xp);
  const Vec2 g2 = -pair.lower.pole_height_gradient(xp);  // h2 = -pole height of the lower body
  const Vec2 gd = g1 - g2;
  // d/dxj [(x3 - h2)/d] = (-dh2*d - (x3 - h2)*dd) / d^2
  const Vec2 gxy = (-g2 * d - (x.z() - lo) * gd) / (d * d);
  out.gradient = Vec3(gxy.x(), gxy.y(), 1.0 / d);
  return out;
}

std::vector<Vec3> gap_grid(const ResonatorPair& pair, const GapProfile& profile, int axial_points,
                           int ring_points) {
  std::vector<Vec3> pts;
  for (int k = 1; k <= axial_points; ++k)
    pts.emplace_back(0.0, 0.0, pair.eps * k / (axial_points + 1));
  const double shoulder = std::pow(pair.eps, 1.0 / profile.m);
  const double radii[3] = {shoulder, 2.0 * shoulder, 0.5 * profile.r0};
  for (int i = 0; i < 3; ++i) {
    const double r = radii[i];
    if (i < 2 && r >= 0.45 * profile.r0) continue;  // shoulder rings collapse onto the outer one
    for (int j = 0; j < ring_points; ++j) {
      const double phi = 2.0 * kPi * j / ring_points;
      const Vec2 xp(r * std::cos(phi), r * std::sin(phi));
      const double mid = 0.5 * (lower_surface(pair, xp) + upper_surface(pair, xp));
      pts.emplace_back(xp.x(), xp.y(), mid);
    }
  }
  return pts;
}

GapScan scan_field(const SurfaceMesh& mesh, const VecX& density, const std::vector<Vec3>& points) {
  GapScan scan;
  for (const Vec3& x : points) {
    // Skip points the panel quadrature cannot resolve.
    bool too_close = false;
    for (int p = 0; p < mesh.panel_count() && !too_close; ++p) {
      const auto sp = static_cast<size_t>(p);
      if ((x - mesh.centroid[sp]).norm() < 0.6 * mesh.diameter[sp]) too_close = true;
    }
    if (too_close) {
      ++scan.skipped;
      continue;
    }
    scan.points.push_back(x);
    scan.value.push_back(eval_potential(mesh, density, x));
    scan.gradient.push_back(eval_gradient(mesh, density, x));
    const double g = scan.gradient.back().norm();
    if (g > scan.max_gradient) {
      scan.max_gradient = g;
      scan.argmax = x;
    }
  }
  return scan;
}

KellerDeviation keller_bound_check(const ResonatorPair& pair, const GapProfile& profile,
                                   const SurfaceMesh& mesh, const DensitySolution& densities) {
  KellerDeviation out;
  out.vbar_peak = 1.0 / pair.eps;
  const auto pts = gap_grid(pair, profile);
  const GapScan scan = scan_field(mesh, densities.psi1, pts);
  out.skipped = scan.skipped;
  for (size_t i = 0; i < scan.points.size(); ++i) {
    const FieldSample ref = keller_field(pair, profile, scan.points[i]);
    out.max_dev = std::max(out.max_dev, (scan.gradient[i] - ref.gradient).norm());
  }
  const Vec3 mid(0.0, 0.0, 0.5 * pair.eps);
  out.midline_grad_eps = eval_gradient(mesh, densities.psi1, mid).norm() * pair.eps;
  return out;
}

std::vector<Vec3> exterior_probes(const ResonatorPair& pair, int n_random, unsigned seed) {
  std::vector<Vec3> pts;
  for (int k = 1; k <= 5; ++k) pts.emplace_back(0.0, 0.0, pair.eps * k / 6.0);
  const double a = std::max(pair.upper.transverse_scale(), pair.lower.transverse_scale());
  for (int j = 0; j < 12; ++j) {
    const double phi = 2.0 * kPi * j / 12.0;
    const double ct = std::cos(kPi * (j + 0.5) / 12.0);
    const double st = std::sqrt(1.0 - ct * ct);
    pts.emplace_back(10.0 * a * st * std::cos(phi), 10.0 * a * st * std::sin(phi), 10.0 * a * ct);
  }
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const double margin = 0.25 * std::min(pair.upper.transverse_scale(), pair.lower.transverse_scale());
  int kept = 0;
  while (kept < n_random) {
    const Vec3 x(a * u(rng), a * u(rng), a * u(rng));
    if (pair_contains(pair, x)) continue;
    // keep clear of both surfaces so discretization error cannot flip signs
    ResonatorPair grown = pair;
    grown.upper.a += margin;
    grown.lower.a += margin;
    grown.upper.semiaxes.array() += margin;
    grown.lower.semiaxes.array() += margin;
    if (pair_contains(grown, x)) continue;
    pts.push_back(x);
    ++kept;
  }
  return pts;
}

BlowupReport blowup_scan(const BodySpec& upper, const BodySpec& lower,
                         const std::vector<double>& eps_sweep, int level, double grading) {
  if (eps_sweep.size() < 4) throw std::invalid_argument("blowup_scan: need >= 4 sweep points");
  auto [lo, hi] = std::minmax_element(eps_sweep.begin(), eps_sweep.end());
  if (std::log10(*hi / *lo) < 1.5)
    throw std::invalid_argument("blowup_scan: sweep must span >= 1.5 decades");

  BlowupReport report;
  for (double eps : eps_sweep) {
    const ResonatorPair pair = build_pair(upper, lower, eps);
    const GapProfile profile = gap_profile(pair);
    const SurfaceMesh mesh = mesh_pair(pair, level, grading);
    const SingleLayerSystem sys = assemble(mesh);
    const DensitySolution dens = solve_densities(sys, mesh);
    const CapacitanceMatrix cap = capacitance_matrix(mesh, dens);
    const EigenMode m1 = build_mode(1, dens, cap);
    const EigenMode m2 = build_mode(2, dens, cap);

    const auto pts = gap_grid(pair, profile);
    BlowupPoint point;
    point.eps = eps;
    const GapScan s1 = scan_field(mesh, m1.phi, pts);
    const GapScan s2 = scan_field(mesh, m2.phi, pts);
    const GapScan ssum = scan_field(mesh, VecX(dens.psi1 + dens.psi2), pts);
    point.max_grad_u1 = s1.max_gradient;
    point.max_grad_u2 = s2.max_gradient;
    point.sum_field_max = ssum.max_gradient;
    point.skipped = s1.skipped;
    const KellerDeviation kd = keller_bound_check(pair, profile, mesh, dens);
    point.keller_dev = kd.max_dev;
    point.midline_grad_eps = kd.midline_grad_eps;
    report.points.push_back(point);
  }

  std::vector<double> inv_eps, g1, g2;
  for (const auto& p : report.points) {
    inv_eps.push_back(1.0 / p.eps);
    g1.push_back(p.max_grad_u1);
    g2.push_back(p.max_grad_u2);
    report.ratio.push_back(p.max_grad_u1 / p.max_grad_u2);
  }
  report.slope_u2 = loglog_slope(inv_eps, g2);
  report.slope_u1 = loglog_slope(inv_eps, g1);
  report.ratio_decreasing = true;
  std::vector<size_t> order(report.points.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return report.points[a].eps > report.points[b].eps; });
  for (size_t i = 1; i < order.size(); ++i)
    if (report.ratio[order[i]] >= report.ratio[order[i - 1]]) report.ratio_decreasing = false;
  return report;
}

}  // namespace gapres
