#pragma once

#include <vector>

#include "gapres/capacitance.hpp"
#include "gapres/geometry.hpp"
#include "gapres/laplace_bem.hpp"
#include "gapres/types.hpp"

namespace gapres {

/// Leading-order eigenmode density phi_n = r_n * psi1 + psi2 with
/// r_n = (lambda_n - Cbar22)/Cbar21. The O(omega_n) correction is dropped.
struct EigenMode {
  int index = 0;  // 1 or 2
  VecX phi;
  double ratio = 0.0;   // r_n: leading boundary value on body 1 (1 on body 2)
  double lambda = 0.0;  // eigenvalue of Cbar
};

EigenMode build_mode(int n, const DensitySolution& densities, const CapacitanceMatrix& cap);

/// Value and gradient of the explicit gap comparison function
/// vbar1 = (x3 - h2(x')) / d(x'), d = eps + (h1 - h2). Defined on the gap
/// region |x'| < 2 R0 between the two surfaces.
struct FieldSample {
  double value = 0.0;
  Vec3 gradient = Vec3::Zero();
};

FieldSample keller_field(const ResonatorPair& pair, const GapProfile& profile, const Vec3& x);

/// Sample points in the gap: an axial ladder between the closest points plus
/// three cross-section rings at |x'| = eps^{1/m}, 2 eps^{1/m} and R0/2
/// (16 points each) on the mid-gap surface.
std::vector<Vec3> gap_grid(const ResonatorPair& pair, const GapProfile& profile,
                           int axial_points = 7, int ring_points = 16);

/// Evaluates a density's potential gradient over a point set, skipping points
/// closer to a panel than 0.6 of its diameter.
struct GapScan {
  std::vector<Vec3> points;
  std::vector<double> value;
  std::vector<Vec3> gradient;
  double max_gradient = 0.0;
  Vec3 argmax = Vec3::Zero();
  int skipped = 0;
};

GapScan scan_field(const SurfaceMesh& mesh, const VecX& density, const std::vector<Vec3>& points);

struct KellerDeviation {
  double max_dev = 0.0;          // max |grad v1 - grad vbar1| over the grid
  double vbar_peak = 0.0;        // dvbar1/dx3 at the pole = 1/eps
  double midline_grad_eps = 0.0; // |grad v1(0,0,eps/2)| * eps
  int skipped = 0;
};

KellerDeviation keller_bound_check(const ResonatorPair& pair, const GapProfile& profile,
                                   const SurfaceMesh& mesh, const DensitySolution& densities);

/// Fixed probe set for the maximum-principle and decay checks: gap midline,
/// a ring at |x| = 10a, and deterministic random exterior points kept at
/// least a quarter-radius away from both surfaces.
std::vector<Vec3> exterior_probes(const ResonatorPair& pair, int n_random = 24,
                                  unsigned seed = 20240801u);

struct BlowupPoint {
  double eps = 0.0;
  double max_grad_u1 = 0.0, max_grad_u2 = 0.0;
  double keller_dev = 0.0, midline_grad_eps = 0.0;
  double sum_field_max = 0.0;  // max |grad(v1+v2)| over the gap grid
  int skipped = 0;
};

struct BlowupReport {
  std::vector<BlowupPoint> points;
  double slope_u2 = 0.0;  // log max|grad u2| vs log(1/eps)
  double slope_u1 = 0.0;
  std::vector<double> ratio;  // max|grad u1| / max|grad u2|
  bool ratio_decreasing = false;
};

/// Full gradient blow-up sweep: one BEM solve per eps. Requires >= 4 points
/// spanning >= 1.5 decades.
BlowupReport blowup_scan(const BodySpec& upper, const BodySpec& lower,
                         const std::vector<double>& eps_sweep, int level, double grading = 1.6);

}  // namespace gapres
