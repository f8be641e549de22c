#pragma once

#include <vector>

#include "gapres/types.hpp"

namespace gapres {

struct SurfaceMesh;
struct ResonatorPair;

/// One axial point charge of an image family.
struct ImageCharge {
  double q;  // charge value (units of length: isolated sphere at potential 1 carries q = a)
  double z;  // axial position
};

/// Image-charge solution of the two-sphere conductor problem on the x3-axis.
/// Family i holds the charges strictly inside sphere i.
struct ImageChargeSystem {
  double a1 = 0.0, a2 = 0.0;  // radii
  double z1 = 0.0, z2 = 0.0;  // centers (upper at a1+eps, lower at -a2)
  double eps = 0.0;
  double tol = 0.0;
  std::vector<ImageCharge> family1, family2;
  int reflections = 0;
  double charge_sum(int family) const;
};

struct TwoSphereCapacitance {
  Mat2 C;                       // paper normalization: isolated sphere -> 4*pi*a
  ImageChargeSystem sys1, sys2;  // v1- and v2-problem charge systems
};

/// Capacitance matrix of two spheres (radii a1 upper / a2 lower, gap eps) by
/// alternating image reflections, truncated when |q| < tol * a_seed.
TwoSphereCapacitance two_sphere_capacitance(double a1, double a2, double eps, double tol = 1e-12);

struct OracleComparison {
  Mat2 bem;
  Mat2 oracle;
  double max_rel_dev = 0.0;
};

/// Solves the pair with the BEM at the given mesh level and compares all four
/// entries against the image-charge values. The pair must be two spheres.
OracleComparison oracle_vs_bem(const ResonatorPair& pair, int level, double grading = 1.6,
                               double tol = 1e-12);

}  // namespace gapres
