#include "gapres/capacitance.hpp"

#include <cmath>
#include <stdexcept>

namespace gapres {

EigenReduction eigen_reduction(const Mat2& cbar) {
  EigenReduction out;
  const double c11 = cbar(0, 0), c12 = cbar(0, 1), c21 = cbar(1, 0), c22 = cbar(1, 1);
  const double disc = (c11 - c22) * (c11 - c22) + 4.0 * c12 * c21;
  if (disc < 0.0)
    throw std::invalid_argument("eigen_reduction: complex eigenvalues (invalid capacitance)");
  const double root = std::sqrt(disc);
  out.lambda1 = 0.5 * (c11 + c22 - root);
  out.lambda2 = 0.5 * (c11 + c22 + root);
  out.sigma1 = c11 + c12;
  out.sigma2 = c22 + c21;
  out.c_star = (c11 * out.sigma2 + c22 * out.sigma1) / (c11 + c22);
  const double scale = cbar.cwiseAbs().maxCoeff();
  out.decoupled = std::abs(c21) <= 1e-14 * scale;
  if (out.decoupled) {
    out.r1 = std::nan("");
    out.r2 = std::nan("");
  } else {
    out.r1 = (out.lambda1 - c22) / c21;
    out.r2 = (out.lambda2 - c22) / c21;
  }
  return out;
}

CapacitanceMatrix capacitance_from_entries(const Mat2& C, double vol1, double vol2) {
  if (!(vol1 > 0.0 && vol2 > 0.0))
    throw std::invalid_argument("capacitance: volumes must be positive");
  CapacitanceMatrix out;
  out.C = C;
  out.vol1 = vol1;
  out.vol2 = vol2;
  out.Cbar.row(0) = C.row(0) / vol1;
  out.Cbar.row(1) = C.row(1) / vol2;
  out.eig = eigen_reduction(out.Cbar);

  if (!(C(0, 0) > 0.0) || !(C(1, 1) > 0.0)) {
    out.valid = false;
    out.invalid_reason = "diagonal capacitance not positive";
  } else if (C(0, 1) > 1e-6 * C(0, 0) || C(1, 0) > 1e-6 * C(1, 1)) {
    out.valid = false;
    out.invalid_reason = "off-diagonal capacitance not negative";
  }
  return out;
}

CapacitanceMatrix capacitance_matrix(const SurfaceMesh& mesh, const DensitySolution& densities) {
  if (densities.psi2.size() == 0)
    throw std::invalid_argument("capacitance_matrix: needs a two-body solution");
  Mat2 C = Mat2::Zero();
  for (int p = 0; p < mesh.panel_count(); ++p) {
    const auto sp = static_cast<size_t>(p);
    const int row = mesh.body[sp] - 1;
    C(row, 0) -= densities.psi1(p) * mesh.area[sp];
    C(row, 1) -= densities.psi2(p) * mesh.area[sp];
  }
  return capacitance_from_entries(C, volume(mesh, 1), volume(mesh, 2));
}

double isolated_capacitance(const SurfaceMesh& mesh, const DensitySolution& densities) {
  double c = 0.0;
  for (int p = 0; p < mesh.panel_count(); ++p)
    c -= densities.psi1(p) * mesh.area[static_cast<size_t>(p)];
  return c;
}

double frequency_from_eigen(double lambda, const MaterialParams& materials) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("frequency_from_eigen: eigenvalue must be positive");
  const double delta = materials.delta();
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("frequency_from_eigen: delta must lie in (0,1)");
  return std::sqrt(delta * materials.vb() * materials.vb() * lambda);
}

}  // namespace gapres
