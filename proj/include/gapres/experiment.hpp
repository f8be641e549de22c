#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gapres/asymptotics.hpp"
#include "gapres/capacitance.hpp"
#include "gapres/geometry.hpp"
#include "gapres/materials.hpp"
#include "gapres/modes.hpp"
#include "gapres/sweep.hpp"

namespace gapres {

struct ExperimentConfig {
  ShapeFamily family = ShapeFamily::Sphere;
  int m = 2;
  double a1 = 1.0, a2 = 1.0;
  std::optional<Vec3> axes;   // ellipsoid semiaxes (both bodies)
  std::optional<Vec3> axes2;  // lower-body override

  std::vector<double> eps_values;    // explicit or log-spaced sweep
  bool coupled = false;              // eps derived from delta via beta
  double beta = 0.5;
  std::vector<double> delta_values;  // coupled sweeps only

  MaterialParams materials = MaterialParams::from_contrast(1e-3, 1.0);

  int level = 3;
  double grading = 1.6;
  double tol = 1e-10;      // oracle truncation / residual acceptance
  bool with_oracle = false;
  std::string out_path;          // base path; ".csv" and ".json" are appended
  std::string dump_matrix_path;  // optional binary dump of the system matrix

  BodySpec upper_body() const;
  BodySpec lower_body() const;
  void validate() const;
};

/// Expands --eps / --eps-sweep / coupled (delta, beta) into per-point
/// (eps, delta) pairs, in sweep order.
struct SweepPoint {
  double eps;
  double delta;
};
std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg);

/// One fully solved configuration.
struct PointSolution {
  ResonatorPair pair;
  GapProfile profile;
  SurfaceMesh mesh;
  DensitySolution densities;
  CapacitanceMatrix cap;
  double symmetry_defect = 0.0;
};

PointSolution solve_point(const ExperimentConfig& cfg, double eps);

AsymptoticModel model_from(const GapProfile& profile, double vol1, double vol2,
                           const MaterialParams& materials);

/// capacitance subcommand: one record per sweep point; failures are recorded
/// per row and the sweep continues.
std::vector<SweepRecord> run_capacitance(const ExperimentConfig& cfg);

/// resonance subcommand: capacitance plus numeric and asymptotic frequencies
/// (supports coupled (delta, beta) sweeps).
std::vector<SweepRecord> run_resonance(const ExperimentConfig& cfg);

/// blowup subcommand: mode gradients over the gap grid per sweep point plus
/// fitted slopes.
struct BlowupOutput {
  std::vector<SweepRecord> records;
  double slope_u1 = 0.0, slope_u2 = 0.0;
  bool ratio_decreasing = false;
};
BlowupOutput run_blowup(const ExperimentConfig& cfg);

/// oracle subcommand: image-charge rows (sphere pairs only, no mesh columns).
std::vector<SweepRecord> run_oracle(const ExperimentConfig& cfg);

/// fit subcommand: extracts M_i from existing records and returns the records
/// with M columns filled.
struct FitOutput {
  ConstantFit fit;
  WindowStability window;
  bool window_checked = false;
  std::vector<SweepRecord> records;
  std::string report_text;
};
FitOutput run_fit(std::vector<SweepRecord> records);

/// True when every record of the sweep failed (CLI exit code 2).
bool all_rows_failed(const std::vector<SweepRecord>& records);

/// Writes records to <base>.csv and <base>.json (or to stdout when base empty).
void write_records(const std::string& base, const std::vector<SweepRecord>& records);

}  // namespace gapres
