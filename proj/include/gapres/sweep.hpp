#pragma once

#include <string>
#include <vector>

#include "gapres/types.hpp"

namespace gapres {

/// One row of a sweep: numeric and asymptotic quantities side by side.
/// Missing values are NaN (serialized as an empty CSV field / JSON null);
/// the flags column explains every gap.
struct SweepRecord {
  double eps = std::nan("");
  double delta = std::nan("");
  double vb = std::nan("");
  double m = std::nan("");
  double Lambda = std::nan("");
  double Lambda1 = std::nan("");
  double Lambda2 = std::nan("");
  double mesh_panels = std::nan("");
  double cond_est = std::nan("");
  double residual = std::nan("");
  double C11 = std::nan(""), C12 = std::nan(""), C21 = std::nan(""), C22 = std::nan("");
  double vol1 = std::nan(""), vol2 = std::nan("");
  double lambda1 = std::nan(""), lambda2 = std::nan("");
  double Cstar = std::nan("");
  double sigma1 = std::nan(""), sigma2 = std::nan("");
  double omega1 = std::nan(""), omega2 = std::nan("");
  double omega1_asym = std::nan(""), omega2_asym = std::nan("");
  double omega_band = std::nan("");
  double C11_leading = std::nan("");
  double M1_fit = std::nan(""), M2_fit = std::nan("");
  double maxgrad_u1 = std::nan(""), maxgrad_u2 = std::nan("");
  double keller_dev = std::nan(""), midline_grad_eps = std::nan("");
  double oracle_C11 = std::nan(""), oracle_C12 = std::nan(""), oracle_C21 = std::nan(""),
         oracle_C22 = std::nan("");
  double oracle_dev = std::nan("");
  std::vector<std::string> flags;

  void add_flag(const std::string& f);
  bool has_flag(const std::string& f) const;
};

struct FieldDef {
  const char* name;
  const char* desc;
  double SweepRecord::* member;
};

const std::vector<FieldDef>& sweep_fields();

std::string csv_header();
std::string csv_row(const SweepRecord& r);
void write_csv(const std::string& path, const std::vector<SweepRecord>& records);
void write_json(const std::string& path, const std::vector<SweepRecord>& records);

/// Reads .csv or .json (decided by extension) back into records.
std::vector<SweepRecord> read_records(const std::string& path);

/// Column documentation (the --schema dump).
std::string schema_text();

}  // namespace gapres
