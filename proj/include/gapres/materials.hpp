#pragma once

#include <cmath>
#include <stdexcept>

namespace gapres {

/// Acoustic material parameters of the background medium (rho, kappa) and of
/// the resonator interior (rho_b, kappa_b). The density contrast
/// delta = rho_b / rho is the small parameter of the high-contrast regime;
/// an air bubble in water has delta ~ 1e-3.
struct MaterialParams {
  double rho = 1.0e3;
  double rho_b = 1.0;
  double kappa = 1.0e3;
  double kappa_b = 1.0;

  double delta() const { return rho_b / rho; }
  double v() const { return std::sqrt(kappa / rho); }
  double vb() const { return std::sqrt(kappa_b / rho_b); }
  double tau() const { return v() / vb(); }

  /// Builds params that realize a given (delta, vb) with unit background speed.
  static MaterialParams from_contrast(double delta, double vb) {
    if (!(delta > 0.0) || !(vb > 0.0))
      throw std::invalid_argument("MaterialParams: delta and vb must be positive");
    MaterialParams p;
    p.rho = 1.0;
    p.kappa = 1.0;
    p.rho_b = delta;
    p.kappa_b = vb * vb * delta;
    return p;
  }

  void validate() const {
    if (!(rho > 0.0 && rho_b > 0.0 && kappa > 0.0 && kappa_b > 0.0))
      throw std::invalid_argument("MaterialParams: all parameters must be positive");
    if (!(delta() < 1.0))
      throw std::invalid_argument("MaterialParams: delta >= 1 is outside the high-contrast regime");
  }
};

}  // namespace gapres
