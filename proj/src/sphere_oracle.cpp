#include "gapres/sphere_oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "gapres/capacitance.hpp"
#include "gapres/geometry.hpp"
#include "gapres/laplace_bem.hpp"

namespace gapres {

double ImageChargeSystem::charge_sum(int family) const {
  const auto& list = (family == 1) ? family1 : family2;
  double s = 0.0;
  for (const auto& c : list) s += c.q;
  return s;
}

namespace {

// Runs the reflection chain for the problem "sphere s at potential 1, sphere o
// grounded". family_s collects charges inside the seeded sphere.
ImageChargeSystem reflect_chain(double as, double zs, double ao, double zo, double eps,
                                double tol) {
  ImageChargeSystem sys;
  sys.eps = eps;
  sys.tol = tol;
  sys.a1 = as;
  sys.z1 = zs;
  sys.a2 = ao;
  sys.z2 = zo;

  double q = as, z = zs;  // seed: a_s at the center gives potential 1 on S_s
  sys.family1.push_back({q, z});
  const long max_iter = 200'000'000L;
  for (long it = 0; it < max_iter; ++it) {
    // Image of (q, z) in the grounded sphere o.
    const double so = std::abs(z - zo);
    if (so <= ao) throw std::runtime_error("image charge escaped its sphere: invalid geometry");
    const double dir_o = (z > zo) ? 1.0 : -1.0;
    const double qo = -q * ao / so;
    const double zo_img = zo + dir_o * ao * ao / so;
    if (!(std::abs(qo) < std::abs(q)))
      throw std::runtime_error("image charge magnitudes not decreasing: invalid geometry");
    sys.family2.push_back({qo, zo_img});
    ++sys.reflections;
    if (std::abs(qo) < tol * as) break;

    // Image of that charge back in sphere s (kept at potential 1 by the seed;
    // the grounded-sphere image cancels the disturbance on S_s).
    const double ss = std::abs(zs - zo_img);
    if (ss <= as) throw std::runtime_error("image charge escaped its sphere: invalid geometry");
    const double dir_s = (zo_img > zs) ? 1.0 : -1.0;
    const double qs = -qo * as / ss;
    const double zs_img = zs + dir_s * as * as / ss;
    if (!(std::abs(qs) < std::abs(qo)))
      throw std::runtime_error("image charge magnitudes not decreasing: invalid geometry");
    sys.family1.push_back({qs, zs_img});
    ++sys.reflections;
    q = qs;
    z = zs_img;
    if (std::abs(qs) < tol * as) break;
  }
  return sys;
}

}  // namespace

TwoSphereCapacitance two_sphere_capacitance(double a1, double a2, double eps, double tol) {
  if (!(a1 > 0.0 && a2 > 0.0)) throw std::invalid_argument("oracle: radii must be positive");
  if (!(eps > 0.0)) throw std::invalid_argument("oracle: eps must be positive");
  if (!(tol > 1e-14 && tol < 1e-6)) throw std::invalid_argument("oracle: tol outside (1e-14, 1e-6)");

  const double z1 = a1 + eps, z2 = -a2;
  TwoSphereCapacitance out;
  // v1-problem: S1 at potential 1, S2 grounded.
  out.sys1 = reflect_chain(a1, z1, a2, z2, eps, tol);
  // v2-problem: S2 at potential 1, S1 grounded.
  out.sys2 = reflect_chain(a2, z2, a1, z1, eps, tol);

  const double four_pi = 4.0 * kPi;
  out.C(0, 0) = four_pi * out.sys1.charge_sum(1);
  out.C(1, 0) = four_pi * out.sys1.charge_sum(2);
  out.C(1, 1) = four_pi * out.sys2.charge_sum(1);
  out.C(0, 1) = four_pi * out.sys2.charge_sum(2);
  return out;
}

OracleComparison oracle_vs_bem(const ResonatorPair& pair, int level, double grading, double tol) {
  if (pair.upper.family != ShapeFamily::Sphere || pair.lower.family != ShapeFamily::Sphere)
    throw std::invalid_argument("oracle_vs_bem: pair must be two spheres");
  const SurfaceMesh mesh = mesh_pair(pair, level, grading);
  const SingleLayerSystem sys = assemble(mesh);
  const DensitySolution dens = solve_densities(sys, mesh);
  const CapacitanceMatrix cap = capacitance_matrix(mesh, dens);
  const TwoSphereCapacitance ref =
      two_sphere_capacitance(pair.upper.a, pair.lower.a, pair.eps, tol);
  OracleComparison cmp;
  cmp.bem = cap.C;
  cmp.oracle = ref.C;
  cmp.max_rel_dev = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      cmp.max_rel_dev =
          std::max(cmp.max_rel_dev, std::abs(cmp.bem(i, j) - ref.C(i, j)) / std::abs(ref.C(i, j)));
  return cmp;
}

}  // namespace gapres
