#include "gapres/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace gapres {

namespace {

void check_regime(int m, double eps) {
  if (m < 2) throw std::invalid_argument("convexity order m must be >= 2");
  if (!(eps > 0.0 && eps < 1.0))
    throw std::domain_error("eps must lie in (0,1): asymptotic regime undefined");
}

// Adaptive Simpson on [a,b].
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int depth = 0) {
  const double c = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fc = f(c);
  const double s = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
  const double lc = 0.5 * (a + c), rc = 0.5 * (c + b);
  const double flc = f(lc), frc = f(rc);
  const double sl = (c - a) / 6.0 * (fa + 4.0 * flc + fc);
  const double sr = (b - c) / 6.0 * (fc + 4.0 * frc + fb);
  if (depth > 48 || std::abs(sl + sr - s) < 15.0 * tol) return sl + sr + (sl + sr - s) / 15.0;
  return adaptive_simpson(f, a, c, 0.5 * tol, depth + 1) +
         adaptive_simpson(f, c, b, 0.5 * tol, depth + 1);
}

}  // namespace

double blowup_rate(int m, double eps) {
  check_regime(m, eps);
  if (m == 2) return std::abs(std::log(eps));
  return std::pow(eps, -(1.0 - 2.0 / m));
}

double error_envelope(int m, double eps) {
  check_regime(m, eps);
  if (m == 2) return std::pow(eps, 0.25) * std::abs(std::log(eps));
  return std::pow(eps, 1.0 / (2.0 * m));
}

double shape_constant(int m) {
  if (m < 2) throw std::invalid_argument("convexity order m must be >= 2");
  if (m == 2) return kPi;
  return 2.0 * kPi * (kPi / m) / std::sin(2.0 * kPi / m);
}

double shape_constant_quadrature(int m, double tol) {
  if (m <= 2) throw std::invalid_argument("quadrature route defined for m > 2 only");
  // int_0^inf r/(1+r^m) dr split at r = 1; the tail maps to [0,1] via u = 1/r.
  auto head = [m](double r) { return r / (1.0 + std::pow(r, m)); };
  auto tail = [m](double u) { return std::pow(u, m - 3) / (1.0 + std::pow(u, m)); };
  const double i1 = adaptive_simpson(head, 0.0, 1.0, tol);
  const double i2 = adaptive_simpson(tail, 0.0, 1.0, tol);
  return 2.0 * kPi * (i1 + i2);
}

double gap_for_contrast(int m, double delta, double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
  if (m < 2) throw std::invalid_argument("convexity order m must be >= 2");
  if (m == 2) return std::exp(-std::pow(delta, beta - 1.0));
  return std::pow(delta, (1.0 - beta) / (1.0 - 2.0 / m));
}

double AsymptoticModel::leading_coeff() const {
  if (anisotropic) return kPi / std::sqrt(lambda1 * lambda2);
  return shape_constant(m) / std::pow(lambda, 2.0 / m);
}

double AsymptoticModel::rho(double eps) const {
  return blowup_rate(anisotropic ? 2 : m, eps);
}

double self_capacitance_asymptotic(const AsymptoticModel& model, double eps, int i) {
  const double leading = model.leading_coeff() * model.rho(eps);
  const double mi = (i == 1) ? model.m1 : model.m2;
  return std::isnan(mi) ? leading : leading + mi;
}

ResonanceAsym resonance_asymptotics(const AsymptoticModel& model, double eps, double c_star) {
  const double delta = model.materials.delta();
  const double vb2 = model.materials.vb() * model.materials.vb();
  const double rho = model.rho(eps);
  ResonanceAsym out;
  out.omega1 = std::sqrt(delta * vb2 * c_star);
  out.omega2 =
      std::sqrt(delta * vb2 * (1.0 / model.vol1 + 1.0 / model.vol2) * model.leading_coeff() * rho);
  out.band = std::sqrt(delta / rho) + delta;
  return out;
}

std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit: need >= 2 points");
  const auto n = static_cast<Eigen::Index>(x.size());
  MatX basis(n, 2);
  VecX rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    basis(i, 0) = x[static_cast<size_t>(i)];
    basis(i, 1) = 1.0;
    rhs(i) = y[static_cast<size_t>(i)];
  }
  const VecX sol = basis.colPivHouseholderQr().solve(rhs);
  return {sol(0), sol(1)};
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw std::invalid_argument("loglog_slope: data must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return linear_fit(lx, ly).first;
}

namespace {

// Two-parameter fit of data - leading against {1, E_m}; returns (M, c, residuals, raw).
struct OneFit {
  double m, c;
  VecX res, raw;
  double slope_ratio;
};

OneFit fit_one(const std::vector<double>& eps, const std::vector<double>& cii,
               const AsymptoticModel& model) {
  const auto n = static_cast<Eigen::Index>(eps.size());
  MatX basis(n, 2);
  VecX rhs(n);
  std::vector<double> rho(eps.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<size_t>(i);
    rho[k] = model.rho(eps[k]);
    basis(i, 0) = 1.0;
    basis(i, 1) = error_envelope(model.anisotropic ? 2 : model.m, eps[k]);
    rhs(i) = cii[k] - model.leading_coeff() * rho[k];
  }
  OneFit out;
  out.raw = rhs;
  const VecX sol = basis.colPivHouseholderQr().solve(rhs);
  out.m = sol(0);
  out.c = sol(1);
  out.res = rhs - basis * sol;
  // Sanity on the leading coefficient: regress the data against rho_m itself.
  const auto [slope, intercept] = linear_fit(rho, cii);
  (void)intercept;
  out.slope_ratio = slope / model.leading_coeff();
  return out;
}

void check_fit_span(const std::vector<double>& eps, const AsymptoticModel& model) {
  if (eps.size() < 5) throw std::invalid_argument("fit refused: need >= 5 sweep points");
  auto [lo, hi] = std::minmax_element(eps.begin(), eps.end());
  const double eps_decades = std::log10(*hi / *lo);
  const double rho_decades = std::log10(model.rho(*lo) / model.rho(*hi));
  if (eps_decades < 2.0 && rho_decades < 2.0)
    throw std::invalid_argument("fit refused: sweep spans < 2 decades of eps and of rho_m");
}

}  // namespace

ConstantFit fit_capacitance_constants(const std::vector<double>& eps,
                                      const std::vector<double>& c11,
                                      const std::vector<double>& c22,
                                      const AsymptoticModel& model) {
  if (eps.size() != c11.size() || eps.size() != c22.size())
    throw std::invalid_argument("fit: mismatched sweep lengths");
  check_fit_span(eps, model);
  const OneFit f1 = fit_one(eps, c11, model);
  const OneFit f2 = fit_one(eps, c22, model);
  ConstantFit out;
  out.m1 = f1.m;
  out.m2 = f2.m;
  out.env_coeff1 = f1.c;
  out.env_coeff2 = f2.c;
  out.raw_residual1 = f1.raw;
  out.raw_residual2 = f2.raw;
  out.residual1 = f1.res;
  out.residual2 = f2.res;
  out.slope_ratio1 = f1.slope_ratio;
  out.slope_ratio2 = f2.slope_ratio;
  out.leading_mismatch =
      std::abs(f1.slope_ratio - 1.0) > 0.25 || std::abs(f2.slope_ratio - 1.0) > 0.25;
  return out;
}

WindowStability fit_window_stability(const std::vector<double>& eps,
                                     const std::vector<double>& cii,
                                     const AsymptoticModel& model) {
  if (eps.size() < 10) throw std::invalid_argument("window stability: need >= 10 points");
  std::vector<size_t> order(eps.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return eps[a] > eps[b]; });
  const size_t half = eps.size() / 2;
  std::vector<double> e_lo, c_lo, e_hi, c_hi;
  for (size_t i = 0; i < order.size(); ++i) {
    if (i < half) {
      e_lo.push_back(eps[order[i]]);
      c_lo.push_back(cii[order[i]]);
    } else {
      e_hi.push_back(eps[order[i]]);
      c_hi.push_back(cii[order[i]]);
    }
  }
  const OneFit coarse = fit_one(e_lo, c_lo, model);
  const OneFit fine = fit_one(e_hi, c_hi, model);
  WindowStability out;
  out.m_coarse = coarse.m;
  out.m_fine = fine.m;
  out.delta = std::abs(coarse.m - fine.m);
  const double em = error_envelope(model.anisotropic ? 2 : model.m,
                                   *std::max_element(e_lo.begin(), e_lo.end()));
  out.envelope = std::max(1.0, std::abs(coarse.c)) * em;
  out.stable = out.delta < out.envelope;
  return out;
}

}  // namespace gapres
