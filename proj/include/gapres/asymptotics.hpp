#pragma once

#include <vector>

#include "gapres/materials.hpp"
#include "gapres/types.hpp"

namespace gapres {

/// rho_m(eps): blow-up rate of the self-capacitance.
/// |log eps| for m = 2, eps^-(1-2/m) for m > 2. Natural logarithm.
double blowup_rate(int m, double eps);

/// E_m(eps): error envelope of the capacitance expansion.
/// eps^{1/4}|log eps| for m = 2, eps^{1/(2m)} for m > 2.
double error_envelope(int m, double eps);

/// L_m: shape constant of the gap integral, 2*pi*int_0^inf r/(1+r^m) dr for
/// m > 2 (closed form 2*pi*(pi/m)/sin(2*pi/m)); L_2 = pi.
double shape_constant(int m);

/// Adaptive quadrature of the defining integral of L_m (m > 2). Independent
/// route used to cross-check the closed form.
double shape_constant_quadrature(int m, double tol = 1e-12);

/// eps(delta) coupling that makes omega_2 ~ delta^{beta/2}:
/// exp(-delta^{beta-1}) for m = 2, delta^{(1-beta)/(1-2/m)} for m > 2.
double gap_for_contrast(int m, double delta, double beta);

/// Everything needed to evaluate the closed-form expansions for one pair.
struct AsymptoticModel {
  int m = 2;
  double lambda = 1.0;  // gap profile coefficient
  bool anisotropic = false;
  double lambda1 = 0.0, lambda2 = 0.0;  // quadratic pair (m = 2 ellipsoids)
  double vol1 = 0.0, vol2 = 0.0;
  MaterialParams materials;
  double m1 = std::nan(""), m2 = std::nan("");  // fitted constants

  /// L_m / Lambda^{2/m}; pi/sqrt(Lambda1*Lambda2) in the anisotropic case.
  double leading_coeff() const;
  double rho(double eps) const;  // anisotropic case always uses |log eps|
};

/// C_ii expansion: leading_coeff * rho_m(eps) + M_i. Without a fitted M_i the
/// bare leading term is returned (caller should flag it).
double self_capacitance_asymptotic(const AsymptoticModel& model, double eps, int i);

struct ResonanceAsym {
  double omega1 = 0.0;
  double omega2 = 0.0;
  double band = 0.0;  // sqrt(delta/rho_m) + delta, unit constants
};

/// Leading-order resonant frequencies. c_star comes from a numeric record.
ResonanceAsym resonance_asymptotics(const AsymptoticModel& model, double eps, double c_star);

struct ConstantFit {
  double m1 = 0.0, m2 = 0.0;              // fitted constants M_i
  double env_coeff1 = 0.0, env_coeff2 = 0.0;  // envelope coefficients c_i
  VecX raw_residual1, raw_residual2;      // data - leading term
  VecX residual1, residual2;              // data - leading - M - c*E_m
  double slope_ratio1 = 0.0, slope_ratio2 = 0.0;  // measured/predicted leading coeff
  bool leading_mismatch = false;          // slope ratio off by more than 25%
};

/// Extracts the constants M_i by least squares on the basis {1, E_m(eps)}
/// after subtracting the known leading term. Refuses fits with fewer than
/// 5 points or spanning less than 2 decades (in eps or in rho_m).
ConstantFit fit_capacitance_constants(const std::vector<double>& eps,
                                      const std::vector<double>& c11,
                                      const std::vector<double>& c22,
                                      const AsymptoticModel& model);

struct WindowStability {
  double m_coarse = 0.0, m_fine = 0.0;  // M_1 on the large-eps / small-eps halves
  double delta = 0.0;                   // |difference|
  double envelope = 0.0;                // allowed drift
  bool stable = false;
};

/// Splits the sweep at the median eps and checks that the fitted M_1 moves by
/// less than the E_m envelope of the coarser window.
WindowStability fit_window_stability(const std::vector<double>& eps,
                                     const std::vector<double>& cii,
                                     const AsymptoticModel& model);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Least-squares fit y ~ a*x + b; returns (a, b).
std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace gapres
