#pragma once

#include <array>
#include <string>
#include <vector>

#include "gapres/types.hpp"

namespace gapres {

enum class ShapeFamily { Sphere, Superellipsoid, Ellipsoid };

std::string to_string(ShapeFamily f);
ShapeFamily shape_family_from_string(const std::string& s);

/// One convex resonator shape, described in a local frame whose contact pole
/// sits at the origin with the body in {z >= 0} and tangent plane {z = 0}.
///   Sphere:           radius a (m forced to 2).
///   Superellipsoid:   body of revolution |x'|^m + |z_c|^m = a^m about the
///                     axis, so the pole height is exactly
///                     h(r) = a - (a^m - r^m)^{1/m}.
///   Ellipsoid:        semiaxes (ax, ay, az), contact along the z-axis.
struct BodySpec {
  ShapeFamily family = ShapeFamily::Sphere;
  double a = 1.0;  // half width
  int m = 2;       // convexity order
  Vec3 semiaxes = Vec3(1.0, 1.0, 1.0);

  static BodySpec sphere(double radius);
  static BodySpec superellipsoid(double half_width, int order);
  static BodySpec ellipsoid(double ax, double ay, double az);

  void validate() const;
  int contact_order() const;        // leading power of the pole height
  double axial_extent() const;      // pole-to-pole distance along the axis
  double transverse_scale() const;  // smallest transverse half width

  /// Height of the surface above the tangent plane at in-plane offset xp.
  double pole_height(const Vec2& xp) const;
  Vec2 pole_height_gradient(const Vec2& xp) const;

  /// Leading coefficient of h: h(x') = coeff * |x'|^m + O(|x'|^{m+1})
  /// (isotropic families). 1/(2a) for a sphere, 1/(m a^{m-1}) in general.
  double pole_curvature_coeff() const;
  /// Quadratic pair (h = L1 x1^2 + L2 x2^2 + ...), defined for m = 2 families.
  Vec2 pole_curvature_pair() const;
};

/// Two bodies in contact position: lower tangent to {x3 = 0} from below at the
/// origin, upper tangent from above, translated up by the gap eps.
struct ResonatorPair {
  BodySpec upper;  // D1
  BodySpec lower;  // D2
  double eps = 0.0;

  Vec3 center1() const { return {0.0, 0.0, eps + 0.5 * upper.axial_extent()}; }
  Vec3 center2() const { return {0.0, 0.0, -0.5 * lower.axial_extent()}; }
  Vec3 pole1() const { return {0.0, 0.0, eps}; }
  Vec3 pole2() const { return {0.0, 0.0, 0.0}; }
};

ResonatorPair build_pair(const BodySpec& upper, const BodySpec& lower, double eps);

/// Leading behavior of the surface-to-surface distance near the closest
/// points: (h1 - h2)(x') = Lambda |x'|^m + O(|x'|^{m+1}), or the anisotropic
/// quadratic form Lambda1 x1^2 + Lambda2 x2^2 for ellipsoids.
struct GapProfile {
  int m = 2;
  double lambda = 0.0;
  bool anisotropic = false;
  double lambda1 = 0.0, lambda2 = 0.0;
  double r0 = 0.0;  // validity radius of the parameterization

  double effective_lambda() const;  // sqrt(L1*L2) when anisotropic
};

GapProfile gap_profile(const ResonatorPair& pair);

// Analytic gap geometry (all for |x'| below the parameterization radius).
double upper_surface(const ResonatorPair& pair, const Vec2& xp);  // eps + h1(x')
double lower_surface(const ResonatorPair& pair, const Vec2& xp);  // h2(x')
double gap_height(const ResonatorPair& pair, const Vec2& xp);     // (h1 - h2)(x')
double gap_width(const ResonatorPair& pair, const Vec2& xp);      // eps + (h1 - h2)(x')

bool body_contains(const BodySpec& spec, const Vec3& center, const Vec3& x);
bool pair_contains(const ResonatorPair& pair, const Vec3& x);

/// Watertight triangulated boundary of one or two bodies. Panels carry
/// centroid, outward unit normal, area, diameter (longest edge) and a body
/// tag; meshes of pairs are graded toward the contact poles.
struct SurfaceMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> body;  // per panel, 1 or 2
  std::vector<Vec3> centroid;
  std::vector<Vec3> normal;
  std::vector<double> area;
  std::vector<double> diameter;
  double gap_panel_target = 0.0;  // requested panel size at the contact pole
  double min_gap_diameter = 0.0;  // smallest realized panel diameter

  int panel_count() const { return static_cast<int>(triangles.size()); }
};

/// Graded two-body mesh. level >= 0 controls the global resolution; panels
/// shrink geometrically (ratio = grading) toward the contact poles until they
/// reach max(eps/4, base*grading^-40).
SurfaceMesh mesh_pair(const ResonatorPair& pair, int level, double grading = 1.6);

/// Ungraded single-body mesh (isolated-resonator runs).
SurfaceMesh mesh_body(const BodySpec& spec, const Vec3& contact_pole, bool opens_up, int level);

/// Divergence-theorem volume (1/3) sum centroid.normal * area of one body.
double volume(const SurfaceMesh& mesh, int body_tag);

struct MeshTopology {
  int vertices = 0, edges = 0, faces = 0;
  bool closed = false;  // every edge shared by exactly two panels
  int euler() const { return vertices - edges + faces; }
};

MeshTopology body_topology(const SurfaceMesh& mesh, int body_tag);

/// OFF-format export for external inspection.
void write_off(const SurfaceMesh& mesh, const std::string& path);

}  // namespace gapres
