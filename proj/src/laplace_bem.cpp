#include "gapres/laplace_bem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace gapres {

namespace {

constexpr double kFourPi = 4.0 * kPi;
constexpr double kNearFactor = 2.0;   // near-field threshold in panel diameters
constexpr double kQuadTol = 5e-4;     // relative tolerance of the target average
constexpr int kTargetDepth = 6;       // target subdivision cap
constexpr int kSelfDepth = 3;         // fixed composite depth for the self term

double tri_diameter(const Vec3& a, const Vec3& b, const Vec3& c) {
  return std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
}

// Signed solid angle of triangle (a,b,c) at p (van Oosterom & Strackee).
double solid_angle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 r1 = a - p, r2 = b - p, r3 = c - p;
  const double m1 = r1.norm(), m2 = r2.norm(), m3 = r3.norm();
  const double num = r1.dot(r2.cross(r3));
  const double den =
      m1 * m2 * m3 + r1.dot(r2) * m3 + r2.dot(r3) * m1 + r3.dot(r1) * m2;
  return 2.0 * std::atan2(num, den);
}

// Stable ln((R1+s1)/(R0+s0)); both forms of the identity
// (R+s)(R-s) = dist_to_line^2 are used to avoid cancellation. Points on the
// edge line (where the true t-weighted contribution vanishes) return 0.
double edge_log(double s0, double s1, double r0, double r1) {
  if (s0 + s1 < 0.0) {
    const double d0 = r0 - s0, d1 = r1 - s1;
    if (d0 <= 0.0 || d1 <= 0.0) return 0.0;
    return std::log(d0 / d1);
  }
  const double d0 = r0 + s0, d1 = r1 + s1;
  if (d0 <= 0.0 || d1 <= 0.0) return 0.0;
  return std::log(d1 / d0);
}

}  // namespace

double triangle_potential(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 n = (b - a).cross(c - a).normalized();
  const double w = (p - a).dot(n);
  const Vec3 v[3] = {a, b, c};
  double total = 0.0;
  for (int e = 0; e < 3; ++e) {
    const Vec3 &v0 = v[e], &v1 = v[(e + 1) % 3];
    const Vec3 u = (v1 - v0).normalized();
    const Vec3 m = u.cross(n);  // outward in-plane edge normal
    const double t = (v0 - p).dot(m);
    const double s0 = (v0 - p).dot(u), s1 = (v1 - p).dot(u);
    const double r0 = (v0 - p).norm(), r1 = (v1 - p).norm();
    total += t * edge_log(s0, s1, r0, r1);
  }
  return total + w * solid_angle(p, a, b, c);
}

Vec3 triangle_field(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 n = (b - a).cross(c - a).normalized();
  const Vec3 v[3] = {a, b, c};
  Vec3 g = Vec3::Zero();
  for (int e = 0; e < 3; ++e) {
    const Vec3 &v0 = v[e], &v1 = v[(e + 1) % 3];
    const Vec3 u = (v1 - v0).normalized();
    const Vec3 m = u.cross(n);
    const double s0 = (v0 - p).dot(u), s1 = (v1 - p).dot(u);
    const double r0 = (v0 - p).norm(), r1 = (v1 - p).norm();
    g -= m * edge_log(s0, s1, r0, r1);
  }
  return g + n * solid_angle(p, a, b, c);
}

namespace {

struct Panel {
  Vec3 a, b, c;
};

// Degree-2 rule (edge midpoints) for the average of the source potential
// over one target cell.
double cell_average(const Panel& src, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
  return (triangle_potential(ab, src.a, src.b, src.c) +
          triangle_potential(bc, src.a, src.b, src.c) +
          triangle_potential(ca, src.a, src.b, src.c)) /
         3.0;
}

// Average of f = triangle_potential(., source) over the target panel; cells
// split until the one-level refinement stops moving the estimate.
double average_over_target(const Panel& src, const Vec3& a, const Vec3& b, const Vec3& c,
                           double coarse, int depth) {
  const Vec3 ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
  const double f0 = cell_average(src, a, ab, ca);
  const double f1 = cell_average(src, ab, b, bc);
  const double f2 = cell_average(src, ca, bc, c);
  const double f3 = cell_average(src, ab, bc, ca);
  const double refined = 0.25 * (f0 + f1 + f2 + f3);
  if (depth >= kTargetDepth || std::abs(refined - coarse) <= kQuadTol * std::abs(refined))
    return refined;
  return 0.25 * (average_over_target(src, a, ab, ca, f0, depth + 1) +
                 average_over_target(src, ab, b, bc, f1, depth + 1) +
                 average_over_target(src, ca, bc, c, f2, depth + 1) +
                 average_over_target(src, ab, bc, ca, f3, depth + 1));
}

// Fixed-depth composite for the self entry (integrand smooth but peaked).
double self_average(const Panel& t, const Vec3& a, const Vec3& b, const Vec3& c, int depth) {
  const Vec3 ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
  if (depth == 0) {
    return (triangle_potential(ab, t.a, t.b, t.c) + triangle_potential(bc, t.a, t.b, t.c) +
            triangle_potential(ca, t.a, t.b, t.c)) /
           3.0;
  }
  return 0.25 * (self_average(t, a, ab, ca, depth - 1) + self_average(t, ab, b, bc, depth - 1) +
                 self_average(t, ca, bc, c, depth - 1) + self_average(t, ab, bc, ca, depth - 1));
}

}  // namespace

double inplane_inverse_distance_integral(const Vec3& p, const Vec3& a, const Vec3& b,
                                         const Vec3& c) {
  return triangle_potential(p, a, b, c);
}

SingleLayerSystem assemble(const SurfaceMesh& mesh) {
  const int n = mesh.panel_count();
  if (n == 0) throw std::invalid_argument("assemble: empty mesh");
  SingleLayerSystem sys;
  sys.near_factor = kNearFactor;
  sys.max_depth = kTargetDepth;
  sys.weak.resize(n, n);

  for (int j = 0; j < n; ++j) {
    const auto sj = static_cast<size_t>(j);
    const auto& tj = mesh.triangles[sj];
    const Panel src{mesh.vertices[static_cast<size_t>(tj[0])],
                    mesh.vertices[static_cast<size_t>(tj[1])],
                    mesh.vertices[static_cast<size_t>(tj[2])]};
    const Vec3& cj = mesh.centroid[sj];
    const double diam_j = mesh.diameter[sj];
    const double area_j = mesh.area[sj];
    for (int i = 0; i < n; ++i) {
      const auto si = static_cast<size_t>(i);
      double entry;
      if (i == j) {
        entry = -self_average(src, src.a, src.b, src.c, kSelfDepth) / kFourPi;
      } else {
        const Vec3& ci = mesh.centroid[si];
        const double d = (ci - cj).norm();
        if (d < kNearFactor * std::max(mesh.diameter[si], diam_j)) {
          if (d < 1e-300 ||
              (mesh.body[si] != mesh.body[sj] && d < 1e-12 * std::max(diam_j, 1.0)))
            throw std::runtime_error("assemble: overlapping panels between bodies");
          const auto& ti = mesh.triangles[si];
          const Vec3& ta = mesh.vertices[static_cast<size_t>(ti[0])];
          const Vec3& tb = mesh.vertices[static_cast<size_t>(ti[1])];
          const Vec3& tc = mesh.vertices[static_cast<size_t>(ti[2])];
          entry = -average_over_target(src, ta, tb, tc, cell_average(src, ta, tb, tc), 0) /
                  kFourPi;
        } else {
          entry = -area_j / (kFourPi * d);
        }
      }
      sys.weak(i, j) = mesh.area[si] * entry;
    }
  }

  // Symmetry defect of the Galerkin-scaled matrix, then exact symmetrization.
  double defect = 0.0, scale = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i) {
      scale = std::max(scale, std::abs(sys.weak(i, j)));
      if (i < j) defect = std::max(defect, std::abs(sys.weak(i, j) - sys.weak(j, i)));
    }
  sys.symmetry_defect = defect / scale;
  for (int j = 0; j < n; ++j)
    for (int i = j + 1; i < n; ++i) {
      const double avg = 0.5 * (sys.weak(i, j) + sys.weak(j, i));
      sys.weak(i, j) = sys.weak(j, i) = avg;
    }
  return sys;
}

double collocation_entry(const SingleLayerSystem& sys, const SurfaceMesh& mesh, int i, int j) {
  return sys.weak(i, j) / mesh.area[static_cast<size_t>(i)];
}

DensitySolution solve_densities(const SingleLayerSystem& sys, const SurfaceMesh& mesh) {
  const int n = mesh.panel_count();
  if (sys.weak.rows() != n) throw std::invalid_argument("solve: system/mesh size mismatch");
  bool two_body = false;
  VecX b1 = VecX::Zero(n), b2 = VecX::Zero(n);
  for (int i = 0; i < n; ++i) {
    const auto si = static_cast<size_t>(i);
    if (mesh.body[si] == 1) b1(i) = mesh.area[si];
    else {
      b2(i) = mesh.area[si];
      two_body = true;
    }
  }

  DensitySolution out;
  // Jacobi equilibration: graded meshes give the area-scaled matrix a huge
  // artificial dynamic range (cond ~ (area_max/area_min)^2). The scaled
  // matrix reflects the operator conditioning and factors stably.
  VecX scale(n);
  for (int i = 0; i < n; ++i) scale(i) = 1.0 / std::sqrt(std::abs(sys.weak(i, i)));
  MatX eq = scale.asDiagonal() * (-sys.weak) * scale.asDiagonal();
  Eigen::LLT<MatX> llt(eq);
  if (llt.info() == Eigen::Success) {
    out.spd = true;
    out.condition_estimate = 1.0 / llt.rcond();
    out.psi1 = -(scale.array() * llt.solve(VecX(scale.asDiagonal() * b1)).array()).matrix();
    if (two_body)
      out.psi2 = -(scale.array() * llt.solve(VecX(scale.asDiagonal() * b2)).array()).matrix();
  } else {
    // Quadrature error pushed an eigenvalue across zero; fall back to LU.
    Eigen::PartialPivLU<MatX> lu(eq);
    out.spd = false;
    out.condition_estimate = 1.0 / lu.rcond();
    out.psi1 = -(scale.array() * lu.solve(VecX(scale.asDiagonal() * b1)).array()).matrix();
    if (two_body)
      out.psi2 = -(scale.array() * lu.solve(VecX(scale.asDiagonal() * b2)).array()).matrix();
  }
  out.trusted = std::isfinite(out.condition_estimate) && out.condition_estimate < 1e12;

  auto residual = [&](const VecX& psi, const VecX& b) {
    const VecX r = sys.weak * psi - b;
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
      worst = std::max(worst, std::abs(r(i)) / mesh.area[static_cast<size_t>(i)]);
    return worst;
  };
  out.residual1 = residual(out.psi1, b1);
  out.residual2 = two_body ? residual(out.psi2, b2) : 0.0;
  return out;
}

namespace {

enum class EvalKind { Potential, Gradient };

// Shared panel sweep for off-surface evaluation; near panels use the exact
// uniform-panel integrals. Flags points that appear to lie inside a body.
template <EvalKind kind>
void eval_sweep(const SurfaceMesh& mesh, const VecX& density, const Vec3& x, double* pot,
                Vec3* grad) {
  const int n = mesh.panel_count();
  if (density.size() != n) throw std::invalid_argument("eval: density/mesh size mismatch");
  double acc = 0.0;
  Vec3 gacc = Vec3::Zero();
  bool inside = false;
  for (int j = 0; j < n; ++j) {
    const auto sj = static_cast<size_t>(j);
    const Vec3 r = x - mesh.centroid[sj];
    const double d = r.norm();
    if (d < 0.5 * mesh.diameter[sj] && r.dot(mesh.normal[sj]) < -0.05 * mesh.diameter[sj])
      inside = true;
    const bool near = d < kNearFactor * mesh.diameter[sj];
    const auto& t = mesh.triangles[sj];
    if constexpr (kind == EvalKind::Potential) {
      double e;
      if (near) {
        e = -triangle_potential(x, mesh.vertices[static_cast<size_t>(t[0])],
                                mesh.vertices[static_cast<size_t>(t[1])],
                                mesh.vertices[static_cast<size_t>(t[2])]) /
            kFourPi;
      } else {
        e = -mesh.area[sj] / (kFourPi * d);
      }
      acc += density(j) * e;
    } else {
      Vec3 e;
      if (near) {
        // grad_x int G(x,y) = -grad_x int 1/(4 pi r)
        e = -triangle_field(x, mesh.vertices[static_cast<size_t>(t[0])],
                            mesh.vertices[static_cast<size_t>(t[1])],
                            mesh.vertices[static_cast<size_t>(t[2])]) /
            kFourPi;
      } else {
        e = mesh.area[sj] / (kFourPi * d * d * d) * r;
      }
      gacc += density(j) * e;
    }
  }
  if (inside) throw std::domain_error("eval: point lies inside (or on) a body");
  if (pot) *pot = acc;
  if (grad) *grad = gacc;
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<size_t>(n), 0.0);
  w.assign(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double p0 = 0.0, dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      p0 = 1.0;
      double p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
      }
      dp = n * (t * p0 - p1) / (t * t - 1.0);
      const double dt = -p0 / dp;
      t += dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[static_cast<size_t>(i)] = -t;
    x[static_cast<size_t>(n - 1 - i)] = t;
    w[static_cast<size_t>(i)] = w[static_cast<size_t>(n - 1 - i)] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

}  // namespace

double eval_potential(const SurfaceMesh& mesh, const VecX& density, const Vec3& x) {
  double v = 0.0;
  eval_sweep<EvalKind::Potential>(mesh, density, x, &v, nullptr);
  return v;
}

Vec3 eval_gradient(const SurfaceMesh& mesh, const VecX& density, const Vec3& x) {
  Vec3 g = Vec3::Zero();
  eval_sweep<EvalKind::Gradient>(mesh, density, x, nullptr, &g);
  return g;
}

double boundary_flux(const SurfaceMesh& mesh, const VecX& density, double radius, int n_polar,
                     int n_azimuth) {
  std::vector<double> gx, gw;
  gauss_legendre(n_polar, gx, gw);
  double flux = 0.0;
  for (int iq = 0; iq < n_polar; ++iq) {
    const double ct = gx[static_cast<size_t>(iq)];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int jq = 0; jq < n_azimuth; ++jq) {
      const double phi = 2.0 * kPi * jq / n_azimuth;
      const Vec3 dir(st * std::cos(phi), st * std::sin(phi), ct);
      const Vec3 x = radius * dir;
      flux += gw[static_cast<size_t>(iq)] * (2.0 * kPi / n_azimuth) * radius * radius *
              eval_gradient(mesh, density, x).dot(dir);
    }
  }
  return -flux;
}

void dump_system(const SingleLayerSystem& sys, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  const char magic[4] = {'S', 'L', 'S', '0'};
  const uint32_t n = static_cast<uint32_t>(sys.weak.rows());
  const uint32_t reserved = 0, pad = 0;
  out.write(magic, 4);
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(&reserved), 4);
  out.write(reinterpret_cast<const char*>(&pad), 4);
  std::vector<double> row(static_cast<size_t>(n));
  for (uint32_t i = 0; i < n; ++i) {
    for (uint32_t j = 0; j < n; ++j) row[j] = sys.weak(static_cast<int>(i), static_cast<int>(j));
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(8 * n));
  }
}

}  // namespace gapres
