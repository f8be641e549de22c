#include "gapres/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "gapres/laplace_bem.hpp"
#include "gapres/sphere_oracle.hpp"

namespace gapres {

BodySpec ExperimentConfig::upper_body() const {
  switch (family) {
    case ShapeFamily::Sphere: return BodySpec::sphere(a1);
    case ShapeFamily::Superellipsoid: return BodySpec::superellipsoid(a1, m);
    case ShapeFamily::Ellipsoid: {
      const Vec3 ax = axes.value_or(Vec3(a1, a1, a1));
      return BodySpec::ellipsoid(ax.x(), ax.y(), ax.z());
    }
  }
  throw std::logic_error("unreachable");
}

BodySpec ExperimentConfig::lower_body() const {
  switch (family) {
    case ShapeFamily::Sphere: return BodySpec::sphere(a2);
    case ShapeFamily::Superellipsoid: return BodySpec::superellipsoid(a2, m);
    case ShapeFamily::Ellipsoid: {
      const Vec3 ax = axes2.value_or(axes.value_or(Vec3(a2, a2, a2)));
      return BodySpec::ellipsoid(ax.x(), ax.y(), ax.z());
    }
  }
  throw std::logic_error("unreachable");
}

void ExperimentConfig::validate() const {
  upper_body();  // constructors validate shape parameters
  lower_body();
  if (coupled) {
    if (delta_values.empty()) throw std::invalid_argument("coupled sweep needs a delta grid");
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0,1)");
  } else if (eps_values.empty()) {
    throw std::invalid_argument("no eps values given");
  }
  for (double e : eps_values)
    if (!(e > 0.0)) throw std::invalid_argument("eps values must be positive");
  for (double d : delta_values)
    if (!(d > 0.0 && d < 1.0)) throw std::invalid_argument("delta values must lie in (0,1)");
  if (level < 0) throw std::invalid_argument("mesh level must be >= 0");
  if (!(grading > 1.0 && grading <= 3.0)) throw std::invalid_argument("grading must lie in (1,3]");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  materials.validate();
}

std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg) {
  std::vector<SweepPoint> pts;
  if (cfg.coupled) {
    const int order = cfg.upper_body().contact_order();
    for (double d : cfg.delta_values)
      pts.push_back({gap_for_contrast(order, d, cfg.beta), d});
  } else {
    for (double e : cfg.eps_values) pts.push_back({e, cfg.materials.delta()});
  }
  return pts;
}

PointSolution solve_point(const ExperimentConfig& cfg, double eps) {
  PointSolution out;
  out.pair = build_pair(cfg.upper_body(), cfg.lower_body(), eps);
  out.profile = gap_profile(out.pair);
  out.mesh = mesh_pair(out.pair, cfg.level, cfg.grading);
  SingleLayerSystem sys = assemble(out.mesh);
  out.symmetry_defect = sys.symmetry_defect;
  if (!cfg.dump_matrix_path.empty()) dump_system(sys, cfg.dump_matrix_path);
  out.densities = solve_densities(sys, out.mesh);
  sys.weak.resize(0, 0);  // free the dense matrix before field scans
  out.cap = capacitance_matrix(out.mesh, out.densities);
  return out;
}

AsymptoticModel model_from(const GapProfile& profile, double vol1, double vol2,
                           const MaterialParams& materials) {
  AsymptoticModel model;
  model.m = profile.m;
  model.lambda = profile.lambda;
  model.anisotropic = profile.anisotropic;
  model.lambda1 = profile.lambda1;
  model.lambda2 = profile.lambda2;
  model.vol1 = vol1;
  model.vol2 = vol2;
  model.materials = materials;
  return model;
}

namespace {

void fill_geometry_columns(SweepRecord& r, const GapProfile& profile) {
  r.m = profile.m;
  r.Lambda = profile.lambda;
  if (profile.m == 2) {
    r.Lambda1 = profile.lambda1;
    r.Lambda2 = profile.lambda2;
  } else {
    r.add_flag("aniso_na");
  }
}

void fill_capacitance_columns(SweepRecord& r, const CapacitanceMatrix& cap,
                              const MaterialParams& mat) {
  r.C11 = cap.C(0, 0);
  r.C12 = cap.C(0, 1);
  r.C21 = cap.C(1, 0);
  r.C22 = cap.C(1, 1);
  r.vol1 = cap.vol1;
  r.vol2 = cap.vol2;
  r.lambda1 = cap.eig.lambda1;
  r.lambda2 = cap.eig.lambda2;
  r.Cstar = cap.eig.c_star;
  r.sigma1 = cap.eig.sigma1;
  r.sigma2 = cap.eig.sigma2;
  if (!cap.valid) r.add_flag("signs_invalid");
  if (cap.eig.decoupled) r.add_flag("decoupled");
  if (cap.eig.lambda1 > 0.0) r.omega1 = frequency_from_eigen(cap.eig.lambda1, mat);
  if (cap.eig.lambda2 > 0.0) r.omega2 = frequency_from_eigen(cap.eig.lambda2, mat);
}

void fill_asymptotic_columns(SweepRecord& r, const AsymptoticModel& model, double eps,
                             double c_star) {
  r.C11_leading = model.leading_coeff() * model.rho(eps);
  const ResonanceAsym asym = resonance_asymptotics(model, eps, c_star);
  r.omega1_asym = asym.omega1;
  r.omega2_asym = asym.omega2;
  r.omega_band = asym.band;
  if (std::isnan(model.m1)) r.add_flag("no_fit");
}

SweepRecord failed_record(double eps, double delta, double vb, const std::string& what) {
  SweepRecord r;
  r.eps = eps;
  r.delta = delta;
  r.vb = vb;
  r.add_flag("solve_failed");
  std::cerr << "row eps=" << eps << " failed: " << what << '\n';
  return r;
}

std::vector<SweepRecord> run_bem_sweep(const ExperimentConfig& cfg, bool with_modes) {
  cfg.validate();
  std::vector<SweepRecord> records;
  for (const SweepPoint& pt : sweep_points(cfg)) {
    const MaterialParams mat =
        cfg.coupled ? MaterialParams::from_contrast(pt.delta, cfg.materials.vb()) : cfg.materials;
    try {
      const PointSolution sol = solve_point(cfg, pt.eps);
      SweepRecord r;
      r.eps = pt.eps;
      r.delta = mat.delta();
      r.vb = mat.vb();
      r.mesh_panels = sol.mesh.panel_count();
      r.cond_est = sol.densities.condition_estimate;
      r.residual = std::max(sol.densities.residual1, sol.densities.residual2);
      if (!sol.densities.trusted) r.add_flag("cond_untrusted");
      if (r.residual > 1e3 * cfg.tol) r.add_flag("residual_high");
      fill_geometry_columns(r, sol.profile);
      fill_capacitance_columns(r, sol.cap, mat);
      fill_asymptotic_columns(r, model_from(sol.profile, sol.cap.vol1, sol.cap.vol2, mat), pt.eps,
                              sol.cap.eig.c_star);

      if (with_modes && !sol.cap.eig.decoupled) {
        const EigenMode m1 = build_mode(1, sol.densities, sol.cap);
        const EigenMode m2 = build_mode(2, sol.densities, sol.cap);
        const auto pts = gap_grid(sol.pair, sol.profile);
        r.maxgrad_u1 = scan_field(sol.mesh, m1.phi, pts).max_gradient;
        r.maxgrad_u2 = scan_field(sol.mesh, m2.phi, pts).max_gradient;
        const KellerDeviation kd =
            keller_bound_check(sol.pair, sol.profile, sol.mesh, sol.densities);
        r.keller_dev = kd.max_dev;
        r.midline_grad_eps = kd.midline_grad_eps;
      } else {
        r.add_flag("no_modescan");
      }

      if (cfg.with_oracle) {
        if (cfg.family == ShapeFamily::Sphere) {
          const TwoSphereCapacitance ref =
              two_sphere_capacitance(cfg.a1, cfg.a2, pt.eps, cfg.tol);
          r.oracle_C11 = ref.C(0, 0);
          r.oracle_C12 = ref.C(0, 1);
          r.oracle_C21 = ref.C(1, 0);
          r.oracle_C22 = ref.C(1, 1);
          double dev = 0.0;
          for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
              dev = std::max(dev, std::abs(sol.cap.C(i, j) - ref.C(i, j)) / std::abs(ref.C(i, j)));
          r.oracle_dev = dev;
        } else {
          r.add_flag("oracle_na");
        }
      } else {
        r.add_flag("no_oracle");
      }
      records.push_back(std::move(r));
    } catch (const std::exception& e) {
      records.push_back(failed_record(pt.eps, mat.delta(), mat.vb(), e.what()));
    }
  }
  return records;
}

}  // namespace

std::vector<SweepRecord> run_capacitance(const ExperimentConfig& cfg) {
  return run_bem_sweep(cfg, false);
}

std::vector<SweepRecord> run_resonance(const ExperimentConfig& cfg) {
  return run_bem_sweep(cfg, false);
}

BlowupOutput run_blowup(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.eps_values.size() < 4) throw std::invalid_argument("blowup: need >= 4 sweep points");
  const auto [lo, hi] = std::minmax_element(cfg.eps_values.begin(), cfg.eps_values.end());
  if (std::log10(*hi / *lo) < 1.5)
    throw std::invalid_argument("blowup: sweep must span >= 1.5 decades");
  BlowupOutput out;
  out.records = run_bem_sweep(cfg, true);

  std::vector<double> inv_eps, g1, g2;
  std::vector<std::pair<double, double>> eps_ratio;
  for (const auto& r : out.records) {
    if (r.has_flag("solve_failed") || std::isnan(r.maxgrad_u2)) continue;
    inv_eps.push_back(1.0 / r.eps);
    g1.push_back(r.maxgrad_u1);
    g2.push_back(r.maxgrad_u2);
    eps_ratio.emplace_back(r.eps, r.maxgrad_u1 / r.maxgrad_u2);
  }
  if (inv_eps.size() >= 2) {
    out.slope_u2 = loglog_slope(inv_eps, g2);
    out.slope_u1 = loglog_slope(inv_eps, g1);
    std::sort(eps_ratio.begin(), eps_ratio.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    out.ratio_decreasing = true;
    for (size_t i = 1; i < eps_ratio.size(); ++i)
      if (eps_ratio[i].second >= eps_ratio[i - 1].second) out.ratio_decreasing = false;
  }
  return out;
}

std::vector<SweepRecord> run_oracle(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.family != ShapeFamily::Sphere)
    throw std::invalid_argument("oracle subcommand requires sphere bodies");
  std::vector<SweepRecord> records;
  const double v1 = 4.0 / 3.0 * kPi * std::pow(cfg.a1, 3);
  const double v2 = 4.0 / 3.0 * kPi * std::pow(cfg.a2, 3);
  for (const SweepPoint& pt : sweep_points(cfg)) {
    const MaterialParams mat =
        cfg.coupled ? MaterialParams::from_contrast(pt.delta, cfg.materials.vb()) : cfg.materials;
    try {
      const TwoSphereCapacitance ref = two_sphere_capacitance(cfg.a1, cfg.a2, pt.eps, cfg.tol);
      const CapacitanceMatrix cap = capacitance_from_entries(ref.C, v1, v2);
      SweepRecord r;
      r.eps = pt.eps;
      r.delta = mat.delta();
      r.vb = mat.vb();
      const ResonatorPair pair =
          build_pair(BodySpec::sphere(cfg.a1), BodySpec::sphere(cfg.a2), pt.eps);
      const GapProfile profile = gap_profile(pair);
      fill_geometry_columns(r, profile);
      fill_capacitance_columns(r, cap, mat);
      fill_asymptotic_columns(r, model_from(profile, v1, v2, mat), pt.eps, cap.eig.c_star);
      r.oracle_C11 = ref.C(0, 0);
      r.oracle_C12 = ref.C(0, 1);
      r.oracle_C21 = ref.C(1, 0);
      r.oracle_C22 = ref.C(1, 1);
      r.add_flag("oracle_only");
      records.push_back(std::move(r));
    } catch (const std::exception& e) {
      records.push_back(failed_record(pt.eps, mat.delta(), mat.vb(), e.what()));
    }
  }
  return records;
}

FitOutput run_fit(std::vector<SweepRecord> records) {
  std::vector<double> eps, c11, c22;
  int m = 0;
  double lambda = std::nan("");
  for (const auto& r : records) {
    if (r.has_flag("solve_failed") || std::isnan(r.C11)) continue;
    eps.push_back(r.eps);
    c11.push_back(r.C11);
    c22.push_back(r.C22);
    if (!std::isnan(r.m)) m = static_cast<int>(r.m);
    if (!std::isnan(r.Lambda)) lambda = r.Lambda;
  }
  if (m == 0 || std::isnan(lambda))
    throw std::invalid_argument("fit: records carry no gap profile columns");
  AsymptoticModel model;
  model.m = m;
  model.lambda = lambda;
  FitOutput out;
  out.fit = fit_capacitance_constants(eps, c11, c22, model);
  if (eps.size() >= 10) {
    out.window = fit_window_stability(eps, c11, model);
    out.window_checked = true;
  }
  for (auto& r : records) {
    if (r.has_flag("solve_failed")) continue;
    r.M1_fit = out.fit.m1;
    r.M2_fit = out.fit.m2;
    auto& flags = r.flags;
    flags.erase(std::remove(flags.begin(), flags.end(), std::string("no_fit")), flags.end());
  }
  out.records = std::move(records);

  std::ostringstream rep;
  rep << "fitted constants: M1 = " << out.fit.m1 << "  M2 = " << out.fit.m2 << '\n'
      << "envelope coefficients: c1 = " << out.fit.env_coeff1 << "  c2 = " << out.fit.env_coeff2
      << '\n'
      << "leading-coefficient ratio (measured/predicted): " << out.fit.slope_ratio1 << ", "
      << out.fit.slope_ratio2 << (out.fit.leading_mismatch ? "  ** MISMATCH **" : "") << '\n';
  rep << "residuals vs envelope (eps, raw residual, residual after fit, E_m):\n";
  for (size_t i = 0; i < eps.size(); ++i)
    rep << "  " << eps[i] << "  " << out.fit.raw_residual1(static_cast<Eigen::Index>(i)) << "  "
        << out.fit.residual1(static_cast<Eigen::Index>(i)) << "  "
        << error_envelope(model.m, eps[i]) << '\n';
  if (out.window_checked)
    rep << "window stability: M1(coarse) = " << out.window.m_coarse
        << "  M1(fine) = " << out.window.m_fine << "  |delta| = " << out.window.delta
        << "  envelope = " << out.window.envelope << (out.window.stable ? "  (stable)" : "  ** DRIFT **")
        << '\n';
  out.report_text = rep.str();
  return out;
}

bool all_rows_failed(const std::vector<SweepRecord>& records) {
  if (records.empty()) return true;
  for (const auto& r : records)
    if (!r.has_flag("solve_failed")) return false;
  return true;
}

void write_records(const std::string& base, const std::vector<SweepRecord>& records) {
  if (base.empty()) {
    std::cout << csv_header() << '\n';
    for (const auto& r : records) std::cout << csv_row(r) << '\n';
    return;
  }
  write_csv(base + ".csv", records);
  write_json(base + ".json", records);
}

}  // namespace gapres
