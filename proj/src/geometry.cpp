#include "gapres/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>

namespace gapres {

std::string to_string(ShapeFamily f) {
  switch (f) {
    case ShapeFamily::Sphere: return "sphere";
    case ShapeFamily::Superellipsoid: return "superellipsoid";
    case ShapeFamily::Ellipsoid: return "ellipsoid";
  }
  return "unknown";
}

ShapeFamily shape_family_from_string(const std::string& s) {
  if (s == "sphere") return ShapeFamily::Sphere;
  if (s == "superellipsoid") return ShapeFamily::Superellipsoid;
  if (s == "ellipsoid") return ShapeFamily::Ellipsoid;
  throw std::invalid_argument("unknown shape family: " + s);
}

BodySpec BodySpec::sphere(double radius) {
  BodySpec b;
  b.family = ShapeFamily::Sphere;
  b.a = radius;
  b.m = 2;
  b.semiaxes = Vec3(radius, radius, radius);
  b.validate();
  return b;
}

BodySpec BodySpec::superellipsoid(double half_width, int order) {
  BodySpec b;
  b.family = ShapeFamily::Superellipsoid;
  b.a = half_width;
  b.m = order;
  b.semiaxes = Vec3(half_width, half_width, half_width);
  b.validate();
  return b;
}

BodySpec BodySpec::ellipsoid(double ax, double ay, double az) {
  BodySpec b;
  b.family = ShapeFamily::Ellipsoid;
  b.a = std::min(ax, std::min(ay, az));
  b.m = 2;
  b.semiaxes = Vec3(ax, ay, az);
  b.validate();
  return b;
}

void BodySpec::validate() const {
  if (!(a > 0.0)) throw std::invalid_argument("body half width must be positive");
  if (m < 2) throw std::invalid_argument("convexity order m must be >= 2");
  if (family == ShapeFamily::Sphere && m != 2)
    throw std::invalid_argument("sphere forces m = 2");
  if (family == ShapeFamily::Ellipsoid) {
    if (!(semiaxes.minCoeff() > 0.0))
      throw std::invalid_argument("ellipsoid semiaxes must be positive");
    if (m != 2) throw std::invalid_argument("ellipsoid forces m = 2");
  }
}

int BodySpec::contact_order() const { return (family == ShapeFamily::Ellipsoid) ? 2 : m; }

double BodySpec::axial_extent() const {
  return (family == ShapeFamily::Ellipsoid) ? 2.0 * semiaxes.z() : 2.0 * a;
}

double BodySpec::transverse_scale() const {
  return (family == ShapeFamily::Ellipsoid) ? std::min(semiaxes.x(), semiaxes.y()) : a;
}

double BodySpec::pole_height(const Vec2& xp) const {
  if (family == ShapeFamily::Ellipsoid) {
    const double q = (xp.x() / semiaxes.x()) * (xp.x() / semiaxes.x()) +
                     (xp.y() / semiaxes.y()) * (xp.y() / semiaxes.y());
    if (q >= 1.0) return semiaxes.z();
    // az*(1 - sqrt(1-q)) evaluated without cancellation
    return -semiaxes.z() * std::expm1(0.5 * std::log1p(-q));
  }
  const double r = xp.norm();
  if (r >= a) return a;
  const double t = std::pow(r / a, m);
  // a - (a^m - r^m)^{1/m} = -a*expm1(log1p(-t)/m)
  return -a * std::expm1(std::log1p(-t) / m);
}

Vec2 BodySpec::pole_height_gradient(const Vec2& xp) const {
  if (family == ShapeFamily::Ellipsoid) {
    const double q = (xp.x() / semiaxes.x()) * (xp.x() / semiaxes.x()) +
                     (xp.y() / semiaxes.y()) * (xp.y() / semiaxes.y());
    if (q >= 1.0) throw std::domain_error("pole height gradient outside the parameterized cap");
    const double s = std::sqrt(1.0 - q);
    return Vec2(semiaxes.z() * xp.x() / (semiaxes.x() * semiaxes.x() * s),
                semiaxes.z() * xp.y() / (semiaxes.y() * semiaxes.y() * s));
  }
  const double r = xp.norm();
  if (r == 0.0) return Vec2::Zero();
  if (r >= a) throw std::domain_error("pole height gradient outside the parameterized cap");
  // dh/dr = r^{m-1} / (a^m - r^m)^{(m-1)/m}
  const double dhdr = std::pow(r, m - 1) / std::pow(std::pow(a, m) - std::pow(r, m),
                                                    double(m - 1) / m);
  return dhdr / r * xp;
}

double BodySpec::pole_curvature_coeff() const {
  if (family == ShapeFamily::Ellipsoid) {
    const Vec2 p = pole_curvature_pair();
    return std::sqrt(p.x() * p.y());
  }
  return 1.0 / (m * std::pow(a, m - 1));
}

Vec2 BodySpec::pole_curvature_pair() const {
  if (contact_order() != 2)
    throw std::domain_error("quadratic curvature pair undefined for m > 2");
  if (family == ShapeFamily::Ellipsoid)
    return Vec2(semiaxes.z() / (2.0 * semiaxes.x() * semiaxes.x()),
                semiaxes.z() / (2.0 * semiaxes.y() * semiaxes.y()));
  return Vec2(1.0 / (2.0 * a), 1.0 / (2.0 * a));
}

ResonatorPair build_pair(const BodySpec& upper, const BodySpec& lower, double eps) {
  upper.validate();
  lower.validate();
  if (!(eps > 0.0)) throw std::invalid_argument("gap eps must be positive");
  if (upper.contact_order() != lower.contact_order())
    throw std::invalid_argument(
        "tangency profiles expand with different leading powers: gap profile undefined");
  ResonatorPair pair;
  pair.upper = upper;
  pair.lower = lower;
  pair.eps = eps;
  return pair;
}

double GapProfile::effective_lambda() const {
  return anisotropic ? std::sqrt(lambda1 * lambda2) : lambda;
}

GapProfile gap_profile(const ResonatorPair& pair) {
  GapProfile p;
  p.m = pair.upper.contact_order();
  p.r0 = 0.5 * std::min(pair.upper.transverse_scale(), pair.lower.transverse_scale());
  if (p.m == 2) {
    const Vec2 pu = pair.upper.pole_curvature_pair();
    const Vec2 pl = pair.lower.pole_curvature_pair();
    p.lambda1 = pu.x() + pl.x();
    p.lambda2 = pu.y() + pl.y();
    p.anisotropic = std::abs(p.lambda1 - p.lambda2) > 1e-12 * std::max(p.lambda1, p.lambda2);
    p.lambda = p.anisotropic ? std::sqrt(p.lambda1 * p.lambda2) : p.lambda1;
  } else {
    p.lambda = pair.upper.pole_curvature_coeff() + pair.lower.pole_curvature_coeff();
    p.lambda1 = p.lambda2 = std::nan("");
  }
  return p;
}

double upper_surface(const ResonatorPair& pair, const Vec2& xp) {
  return pair.eps + pair.upper.pole_height(xp);
}

double lower_surface(const ResonatorPair& pair, const Vec2& xp) {
  return -pair.lower.pole_height(xp);
}

double gap_height(const ResonatorPair& pair, const Vec2& xp) {
  return pair.upper.pole_height(xp) + pair.lower.pole_height(xp);
}

double gap_width(const ResonatorPair& pair, const Vec2& xp) {
  return pair.eps + gap_height(pair, xp);
}

bool body_contains(const BodySpec& spec, const Vec3& center, const Vec3& x) {
  const Vec3 q = x - center;
  switch (spec.family) {
    case ShapeFamily::Sphere:
      return q.squaredNorm() < spec.a * spec.a;
    case ShapeFamily::Superellipsoid: {
      const double rp = std::hypot(q.x(), q.y());
      return std::pow(rp / spec.a, spec.m) + std::pow(std::abs(q.z()) / spec.a, spec.m) < 1.0;
    }
    case ShapeFamily::Ellipsoid: {
      const Vec3 s = q.cwiseQuotient(spec.semiaxes);
      return s.squaredNorm() < 1.0;
    }
  }
  return false;
}

bool pair_contains(const ResonatorPair& pair, const Vec3& x) {
  return body_contains(pair.upper, pair.center1(), x) ||
         body_contains(pair.lower, pair.center2(), x);
}

// ---------------------------------------------------------------------------
// Meshing
// ---------------------------------------------------------------------------

namespace {

// Azimuthal resolution per refinement level; latitude bands use n_phi/2 in the
// ungraded zone so panels are roughly isotropic away from the poles.
int azimuth_count(int level) {
  static const int table[] = {16, 24, 32, 44, 60};
  if (level < 0) throw std::invalid_argument("mesh level must be >= 0");
  if (level <= 4) return table[level];
  double n = 60.0;
  for (int l = 4; l < level; ++l) n *= 1.4;
  return 2 * static_cast<int>(std::ceil(n / 2.0));
}

// Generator curve of one body in its local frame (contact pole at the origin,
// body in z >= 0). theta in [0, pi] measured from the contact pole.
struct Generator {
  const BodySpec* spec;
  double ring_x(double theta) const {  // semi-axis scale along x at this ring
    const double s = std::max(0.0, std::sin(theta));
    if (spec->family == ShapeFamily::Ellipsoid) return spec->semiaxes.x() * s;
    return spec->a * std::pow(s, 2.0 / spec->m);
  }
  double ring_y(double theta) const {
    const double s = std::max(0.0, std::sin(theta));
    if (spec->family == ShapeFamily::Ellipsoid) return spec->semiaxes.y() * s;
    return spec->a * std::pow(s, 2.0 / spec->m);
  }
  double height(double theta) const {  // local z of the ring
    const double c = std::cos(theta);
    if (spec->family == ShapeFamily::Ellipsoid) return spec->semiaxes.z() * (1.0 - c);
    const double w = (c >= 0.0 ? 1.0 : -1.0) * std::pow(std::abs(c), 2.0 / spec->m);
    return spec->a * (1.0 - w);
  }
  // theta of the ring whose radius is r (representative transverse scale).
  double theta_of_radius(double r) const {
    const double scale = (spec->family == ShapeFamily::Ellipsoid)
                             ? 0.5 * (spec->semiaxes.x() + spec->semiaxes.y())
                             : spec->a;
    const double s = std::min(1.0, r / scale);
    if (spec->family == ShapeFamily::Ellipsoid) return std::asin(s);
    return std::asin(std::pow(s, spec->m / 2.0));
  }
};

// Cumulative arc length of the generator on a fine theta grid.
struct ArcTable {
  std::vector<double> theta, s;
  double total() const { return s.back(); }
  double arc_at(double th) const {
    auto it = std::lower_bound(theta.begin(), theta.end(), th);
    if (it == theta.begin()) return 0.0;
    if (it == theta.end()) return s.back();
    const size_t i = static_cast<size_t>(it - theta.begin());
    const double t = (th - theta[i - 1]) / (theta[i] - theta[i - 1]);
    return s[i - 1] + t * (s[i] - s[i - 1]);
  }
  double theta_at_arc(double target) const {
    auto it = std::lower_bound(s.begin(), s.end(), target);
    if (it == s.begin()) return 0.0;
    if (it == s.end()) return theta.back();
    const size_t i = static_cast<size_t>(it - s.begin());
    const double t = (target - s[i - 1]) / (s[i] - s[i - 1]);
    return theta[i - 1] + t * (theta[i] - theta[i - 1]);
  }
};

ArcTable arc_table(const Generator& gen, int n = 16384) {
  ArcTable tab;
  tab.theta.resize(n + 1);
  tab.s.resize(n + 1);
  double prev_r = 0.0, prev_z = 0.0, acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double th = kPi * i / n;
    const double r = 0.5 * (gen.ring_x(th) + gen.ring_y(th));
    const double z = gen.height(th);
    if (i > 0) acc += std::hypot(r - prev_r, z - prev_z);
    tab.theta[i] = th;
    tab.s[i] = acc;
    prev_r = r;
    prev_z = z;
  }
  return tab;
}

// Latitude band boundaries. With grading enabled the ladder starts at ring
// radius pole_target and grows geometrically until bands reach the uniform
// width, then continues uniform in arc length up to the far pole.
std::vector<double> band_thetas(const Generator& gen, const ArcTable& tab, int n_far,
                                double grading, double pole_target) {
  const double l_far = tab.total() / n_far;
  std::vector<double> thetas;
  thetas.push_back(0.0);
  double switch_arc = 0.0;
  if (pole_target < l_far) {
    double r = pole_target;
    while (true) {
      const double th = gen.theta_of_radius(r);
      if (th >= kPi / 3.0) break;
      const double arc = tab.arc_at(th);
      if (!thetas.empty() && arc - tab.arc_at(thetas.back()) > l_far) break;
      if (arc > switch_arc) {
        thetas.push_back(th);
        switch_arc = arc;
      }
      if (r * (grading - 1.0) > l_far) break;
      r *= grading;
    }
  }
  const int n_uniform = std::max(1, (int)std::lround((tab.total() - switch_arc) / l_far));
  for (int k = 1; k < n_uniform; ++k)
    thetas.push_back(tab.theta_at_arc(switch_arc + (tab.total() - switch_arc) * k / n_uniform));
  thetas.push_back(kPi);
  return thetas;
}

// Azimuthal vertex count per interior ring: full n_phi in the uniform zone,
// halved toward the poles so panels stay near-isotropic (pure lat-long fans
// degenerate into slivers of aspect ~ n_phi/2pi). Adjacent rings may only
// differ by a factor of two, which the stitching patterns below support.
std::vector<int> ring_counts(const Generator& gen, const ArcTable& tab,
                             const std::vector<double>& thetas, int n_phi) {
  const size_t n_rings = thetas.size() - 2;
  std::vector<int> counts(n_rings, n_phi);
  for (size_t k = 0; k < n_rings; ++k) {
    const double th = thetas[k + 1];
    const double r = 0.5 * (gen.ring_x(th) + gen.ring_y(th));
    const double s = tab.arc_at(th);
    const double band = std::max(s - tab.arc_at(thetas[k]),
                                 tab.arc_at(thetas[k + 2]) - s);
    const double ideal = 2.0 * kPi * r / band;
    int c = n_phi;
    while (c % 2 == 0 && c / 2 >= 8 && c > 2.2 * ideal) c /= 2;
    counts[k] = c;
  }
  // limit jumps to x2 (raising only)
  for (size_t k = n_rings; k-- > 1;)
    counts[k - 1] = std::max(counts[k - 1], counts[k] / 2);
  for (size_t k = 1; k < n_rings; ++k) counts[k] = std::max(counts[k], counts[k - 1] / 2);
  return counts;
}

struct BodyPlacement {
  Vec3 pole;       // world position of the contact pole
  double z_sign;   // +1: body opens upward from the pole, -1: downward
};

void append_body(SurfaceMesh& mesh, const BodySpec& spec, const BodyPlacement& place, int tag,
                 const std::vector<double>& thetas, const std::vector<int>& counts) {
  const Generator gen{&spec};
  const int n_rings = static_cast<int>(thetas.size()) - 2;  // interior rings only

  const int pole0 = static_cast<int>(mesh.vertices.size());
  mesh.vertices.push_back(place.pole);
  std::vector<int> offset(static_cast<size_t>(n_rings));
  for (int k = 0; k < n_rings; ++k) {
    const auto sk = static_cast<size_t>(k);
    offset[sk] = static_cast<int>(mesh.vertices.size());
    const double th = thetas[sk + 1];
    const double rx = gen.ring_x(th), ry = gen.ring_y(th), z = gen.height(th);
    for (int j = 0; j < counts[sk]; ++j) {
      const double phi = 2.0 * kPi * j / counts[sk];
      mesh.vertices.push_back(place.pole +
                              Vec3(rx * std::cos(phi), ry * std::sin(phi), place.z_sign * z));
    }
  }
  const int pole1 = static_cast<int>(mesh.vertices.size());
  mesh.vertices.push_back(place.pole + Vec3(0.0, 0.0, place.z_sign * spec.axial_extent()));

  auto rv = [&](int ring, int j) {
    const auto sr = static_cast<size_t>(ring);
    return offset[sr] + (j % counts[sr]);
  };
  auto add_tri = [&](int i0, int i1, int i2) {
    mesh.triangles.push_back({i0, i1, i2});
    mesh.body.push_back(tag);
  };

  for (int j = 0; j < counts[0]; ++j) add_tri(pole0, rv(0, j), rv(0, j + 1));
  for (int k = 0; k + 1 < n_rings; ++k) {
    const int ca = counts[static_cast<size_t>(k)], cb = counts[static_cast<size_t>(k + 1)];
    if (ca == cb) {
      for (int j = 0; j < ca; ++j) {
        add_tri(rv(k, j), rv(k + 1, j), rv(k + 1, j + 1));
        add_tri(rv(k, j), rv(k + 1, j + 1), rv(k, j + 1));
      }
    } else if (cb == 2 * ca) {  // azimuthal doubling away from a pole
      for (int j = 0; j < ca; ++j) {
        add_tri(rv(k, j), rv(k + 1, 2 * j), rv(k + 1, 2 * j + 1));
        add_tri(rv(k, j), rv(k + 1, 2 * j + 1), rv(k, j + 1));
        add_tri(rv(k, j + 1), rv(k + 1, 2 * j + 1), rv(k + 1, 2 * j + 2));
      }
    } else if (ca == 2 * cb) {  // halving toward the far pole
      for (int j = 0; j < cb; ++j) {
        add_tri(rv(k + 1, j), rv(k, 2 * j + 1), rv(k, 2 * j));
        add_tri(rv(k + 1, j), rv(k + 1, j + 1), rv(k, 2 * j + 1));
        add_tri(rv(k + 1, j + 1), rv(k, 2 * j + 2), rv(k, 2 * j + 1));
      }
    } else {
      throw std::logic_error("ring counts must match or differ by a factor of two");
    }
  }
  for (int j = 0; j < counts[static_cast<size_t>(n_rings - 1)]; ++j)
    add_tri(pole1, rv(n_rings - 1, j + 1), rv(n_rings - 1, j));
}

void finalize_mesh(SurfaceMesh& mesh, const std::vector<Vec3>& body_centers,
                   double length_scale) {
  const size_t n = mesh.triangles.size();
  mesh.centroid.resize(n);
  mesh.normal.resize(n);
  mesh.area.resize(n);
  mesh.diameter.resize(n);
  mesh.min_gap_diameter = std::numeric_limits<double>::max();
  for (size_t p = 0; p < n; ++p) {
    auto& tri = mesh.triangles[p];
    const Vec3 &A = mesh.vertices[static_cast<size_t>(tri[0])],
               &B = mesh.vertices[static_cast<size_t>(tri[1])],
               &C = mesh.vertices[static_cast<size_t>(tri[2])];
    Vec3 nrm = (B - A).cross(C - A);
    const double a2 = nrm.norm();
    if (0.5 * a2 < 1e-14 * length_scale * length_scale)
      throw std::runtime_error("meshing failure: degenerate panel " + std::to_string(p) +
                               " (area " + std::to_string(0.5 * a2) + ")");
    const Vec3 c = (A + B + C) / 3.0;
    const Vec3& center = body_centers[static_cast<size_t>(mesh.body[p] - 1)];
    if (nrm.dot(c - center) < 0.0) {
      std::swap(tri[1], tri[2]);
      nrm = -nrm;
    }
    mesh.centroid[p] = c;
    mesh.normal[p] = nrm / a2;
    mesh.area[p] = 0.5 * a2;
    mesh.diameter[p] =
        std::max({(B - A).norm(), (C - B).norm(), (A - C).norm()});
    mesh.min_gap_diameter = std::min(mesh.min_gap_diameter, mesh.diameter[p]);
  }
}

}  // namespace

SurfaceMesh mesh_pair(const ResonatorPair& pair, int level, double grading) {
  if (!(grading > 1.0 && grading <= 3.0))
    throw std::invalid_argument("grading ratio must lie in (1, 3]");
  const int n_phi = azimuth_count(level);
  const int n_far = n_phi / 2;

  SurfaceMesh mesh;
  double target = 0.0;
  for (int tag = 1; tag <= 2; ++tag) {
    const BodySpec& spec = (tag == 1) ? pair.upper : pair.lower;
    const Generator gen{&spec};
    const ArcTable tab = arc_table(gen);
    const double l_far = tab.total() / n_far;
    const double t = std::max(pair.eps / 4.0, l_far * std::pow(grading, -40.0));
    target = std::max(target, t);
    const auto thetas = band_thetas(gen, tab, n_far, grading, std::min(t, l_far) / 1.2);
    const auto counts = ring_counts(gen, tab, thetas, n_phi);
    const BodyPlacement place{(tag == 1) ? pair.pole1() : pair.pole2(),
                              (tag == 1) ? +1.0 : -1.0};
    append_body(mesh, spec, place, tag, thetas, counts);
  }
  mesh.gap_panel_target = target;
  finalize_mesh(mesh, {pair.center1(), pair.center2()},
                std::max(pair.upper.transverse_scale(), pair.lower.transverse_scale()));
  return mesh;
}

SurfaceMesh mesh_body(const BodySpec& spec, const Vec3& contact_pole, bool opens_up, int level) {
  const int n_phi = azimuth_count(level);
  const int n_far = n_phi / 2;
  const Generator gen{&spec};
  const ArcTable tab = arc_table(gen);
  SurfaceMesh mesh;
  const auto thetas = band_thetas(gen, tab, n_far, 1.6, tab.total());  // ungraded
  const auto counts = ring_counts(gen, tab, thetas, n_phi);
  const BodyPlacement place{contact_pole, opens_up ? +1.0 : -1.0};
  append_body(mesh, spec, place, 1, thetas, counts);
  mesh.gap_panel_target = tab.total() / n_far;
  const Vec3 center = contact_pole + Vec3(0, 0, (opens_up ? 0.5 : -0.5) * spec.axial_extent());
  finalize_mesh(mesh, {center, center}, spec.transverse_scale());
  return mesh;
}

double volume(const SurfaceMesh& mesh, int body_tag) {
  double v = 0.0;
  bool any = false;
  for (int p = 0; p < mesh.panel_count(); ++p) {
    if (mesh.body[static_cast<size_t>(p)] != body_tag) continue;
    any = true;
    const auto sp = static_cast<size_t>(p);
    v += mesh.centroid[sp].dot(mesh.normal[sp]) * mesh.area[sp];
  }
  if (!any) throw std::invalid_argument("volume: no panels carry tag " + std::to_string(body_tag));
  return v / 3.0;
}

MeshTopology body_topology(const SurfaceMesh& mesh, int body_tag) {
  std::map<std::pair<int, int>, int> edge_count;
  std::map<int, int> vertex_seen;
  int faces = 0;
  for (int p = 0; p < mesh.panel_count(); ++p) {
    if (mesh.body[static_cast<size_t>(p)] != body_tag) continue;
    ++faces;
    const auto& t = mesh.triangles[static_cast<size_t>(p)];
    for (int e = 0; e < 3; ++e) {
      const int u = t[static_cast<size_t>(e)], v = t[static_cast<size_t>((e + 1) % 3)];
      ++edge_count[{std::min(u, v), std::max(u, v)}];
      vertex_seen[u] = 1;
    }
  }
  MeshTopology topo;
  topo.vertices = static_cast<int>(vertex_seen.size());
  topo.edges = static_cast<int>(edge_count.size());
  topo.faces = faces;
  topo.closed = std::all_of(edge_count.begin(), edge_count.end(),
                            [](const auto& kv) { return kv.second == 2; });
  return topo;
}

void write_off(const SurfaceMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "OFF\n" << mesh.vertices.size() << ' ' << mesh.triangles.size() << " 0\n";
  char buf[96];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", v.x(), v.y(), v.z());
    out << buf;
  }
  for (const auto& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

}  // namespace gapres
