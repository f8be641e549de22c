#pragma once

#include <string>

#include "gapres/geometry.hpp"
#include "gapres/types.hpp"

namespace gapres {

/// Discretized single-layer operator with the kernel G(x,y) = -1/(4*pi*|x-y|),
/// piecewise-constant densities and centroid collocation. The stored matrix is
/// Galerkin-scaled (row i carries a factor area_i) so that it is symmetric up
/// to quadrature error and negative definite; the plain collocation entry
/// A[i][j] = int_{panel j} G(c_i, y) dsigma is weak(i,j)/area_i.
struct SingleLayerSystem {
  MatX weak;               // area-scaled, symmetrized
  double symmetry_defect;  // max |weak - weak^T| / max |weak| before averaging
  double near_factor;      // near-field threshold: dist < near_factor * max diameter
  int max_depth;           // subdivision depth cap for near-singular panels
};

SingleLayerSystem assemble(const SurfaceMesh& mesh);

/// Collocation-normalized entry (for diagnostics and tests).
double collocation_entry(const SingleLayerSystem& sys, const SurfaceMesh& mesh, int i, int j);

struct DensitySolution {
  VecX psi1;  // S_D[psi1] = 1 on body 1, 0 on body 2
  VecX psi2;  // empty for single-body meshes
  double residual1 = 0.0, residual2 = 0.0;  // ||A psi - f||_inf, collocation scale
  double condition_estimate = 0.0;
  bool spd = false;      // -weak admitted a Cholesky factorization
  bool trusted = false;  // condition estimate below 1e12
};

/// Direct dense solve for both equilibrium densities from one factorization.
DensitySolution solve_densities(const SingleLayerSystem& sys, const SurfaceMesh& mesh);

/// Single-layer potential at a strictly exterior point. Panels closer than
/// near_factor diameters are integrated by adaptive subdivision.
double eval_potential(const SurfaceMesh& mesh, const VecX& density, const Vec3& x);

/// Gradient of the potential, kernel gradient (x-y)/(4*pi*|x-y|^3).
Vec3 eval_gradient(const SurfaceMesh& mesh, const VecX& density, const Vec3& x);

/// -oint_{|x|=R} dv/dnu over the sphere of radius R centered at the origin
/// (product Gauss-Legendre x trapezoid rule). Equals C11 + C12 for psi1.
double boundary_flux(const SurfaceMesh& mesh, const VecX& density, double radius,
                     int n_polar = 24, int n_azimuth = 48);

/// Exact integral of 1/|p-y| over the triangle (a,b,c), any evaluation point:
/// edge-log terms plus the solid-angle contribution.
double triangle_potential(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Exact gradient (in p) of triangle_potential.
Vec3 triangle_field(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// In-plane special case of triangle_potential (the classical self-term form).
double inplane_inverse_distance_integral(const Vec3& p, const Vec3& a, const Vec3& b,
                                         const Vec3& c);

/// Binary debug dump: 16-byte header (magic "SLS0", u32 N, u32 reserved,
/// 4 zero bytes) followed by the row-major matrix as 64-bit floats.
void dump_system(const SingleLayerSystem& sys, const std::string& path);

}  // namespace gapres
