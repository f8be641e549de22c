#pragma once

#include <string>

#include "gapres/laplace_bem.hpp"
#include "gapres/materials.hpp"
#include "gapres/types.hpp"

namespace gapres {

/// Spectral reduction of the volume-rescaled capacitance matrix
/// Cbar_ij = C_ij / |D_i|. lambda1 <= lambda2 are the eigenvalues,
/// r_n = (lambda_n - Cbar22)/Cbar21 the first eigenvector components
/// (second component normalized to 1), sigma_i the row sums, and
/// C_* = (Cbar11 sigma2 + Cbar22 sigma1)/(Cbar11 + Cbar22).
struct EigenReduction {
  double lambda1 = 0.0, lambda2 = 0.0;
  double r1 = 0.0, r2 = 0.0;
  double sigma1 = 0.0, sigma2 = 0.0;
  double c_star = 0.0;
  bool decoupled = false;  // Cbar21 = 0: ratios undefined
};

EigenReduction eigen_reduction(const Mat2& cbar);

struct CapacitanceMatrix {
  Mat2 C;  // C_ij = -int_{dD_i} psi_j
  double vol1 = 0.0, vol2 = 0.0;
  Mat2 Cbar;
  EigenReduction eig;
  bool valid = true;
  std::string invalid_reason;
};

/// Capacitance coefficients from solved densities; volumes come from the mesh
/// so all derived quantities share one discretization.
CapacitanceMatrix capacitance_matrix(const SurfaceMesh& mesh, const DensitySolution& densities);

/// Assembles the derived quantities from externally computed entries
/// (image-charge oracle path).
CapacitanceMatrix capacitance_from_entries(const Mat2& C, double vol1, double vol2);

/// Single-body capacitance -int psi (isolated-resonator identity C = 4*pi*a).
double isolated_capacitance(const SurfaceMesh& mesh, const DensitySolution& densities);

/// Leading-order subwavelength frequency omega = sqrt(delta vb^2 lambda).
double frequency_from_eigen(double lambda, const MaterialParams& materials);

}  // namespace gapres
