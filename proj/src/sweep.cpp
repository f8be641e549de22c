#include "gapres/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace gapres {

void SweepRecord::add_flag(const std::string& f) {
  if (!has_flag(f)) flags.push_back(f);
}

bool SweepRecord::has_flag(const std::string& f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

const std::vector<FieldDef>& sweep_fields() {
  static const std::vector<FieldDef> fields = {
      {"eps", "gap between the two bodies", &SweepRecord::eps},
      {"delta", "density contrast rho_b/rho", &SweepRecord::delta},
      {"vb", "interior wave speed sqrt(kappa_b/rho_b)", &SweepRecord::vb},
      {"m", "convexity order of the gap profile", &SweepRecord::m},
      {"Lambda", "gap profile coefficient: h1-h2 = Lambda |x'|^m + ...", &SweepRecord::Lambda},
      {"Lambda1", "anisotropic quadratic coefficient along x1 (m=2 only)", &SweepRecord::Lambda1},
      {"Lambda2", "anisotropic quadratic coefficient along x2 (m=2 only)", &SweepRecord::Lambda2},
      {"mesh_panels", "total panel count of the BEM mesh (empty for oracle rows)",
       &SweepRecord::mesh_panels},
      {"cond_est", "condition estimate of the dense single-layer system", &SweepRecord::cond_est},
      {"residual", "max collocation residual of the two density solves", &SweepRecord::residual},
      {"C11", "capacitance coefficient -int_{dD1} psi_1", &SweepRecord::C11},
      {"C12", "capacitance coefficient -int_{dD1} psi_2", &SweepRecord::C12},
      {"C21", "capacitance coefficient -int_{dD2} psi_1", &SweepRecord::C21},
      {"C22", "capacitance coefficient -int_{dD2} psi_2", &SweepRecord::C22},
      {"vol1", "volume of body 1 (divergence theorem)", &SweepRecord::vol1},
      {"vol2", "volume of body 2 (divergence theorem)", &SweepRecord::vol2},
      {"lambda1", "smaller eigenvalue of the rescaled capacitance matrix", &SweepRecord::lambda1},
      {"lambda2", "larger eigenvalue of the rescaled capacitance matrix", &SweepRecord::lambda2},
      {"Cstar", "(Cbar11 sigma2 + Cbar22 sigma1)/(Cbar11 + Cbar22)", &SweepRecord::Cstar},
      {"sigma1", "Cbar11 + Cbar12", &SweepRecord::sigma1},
      {"sigma2", "Cbar22 + Cbar21", &SweepRecord::sigma2},
      {"omega1", "numeric frequency sqrt(delta vb^2 lambda1)", &SweepRecord::omega1},
      {"omega2", "numeric frequency sqrt(delta vb^2 lambda2)", &SweepRecord::omega2},
      {"omega1_asym", "asymptotic frequency sqrt(delta vb^2 Cstar)", &SweepRecord::omega1_asym},
      {"omega2_asym",
       "asymptotic frequency sqrt(delta vb^2 (1/vol1+1/vol2) L_m/Lambda^{2/m} rho_m)",
       &SweepRecord::omega2_asym},
      {"omega_band", "error band sqrt(delta/rho_m) + delta (diagnostic only)",
       &SweepRecord::omega_band},
      {"C11_leading", "leading term L_m/Lambda^{2/m} * rho_m(eps)", &SweepRecord::C11_leading},
      {"M1_fit", "fitted constant M_1 of the C11 expansion (post-fit)", &SweepRecord::M1_fit},
      {"M2_fit", "fitted constant M_2 of the C22 expansion (post-fit)", &SweepRecord::M2_fit},
      {"maxgrad_u1", "max |grad u_1| over the gap grid", &SweepRecord::maxgrad_u1},
      {"maxgrad_u2", "max |grad u_2| over the gap grid", &SweepRecord::maxgrad_u2},
      {"keller_dev", "max |grad v1 - grad vbar1| over the gap grid", &SweepRecord::keller_dev},
      {"midline_grad_eps", "|grad v1| * eps at the gap midpoint", &SweepRecord::midline_grad_eps},
      {"oracle_C11", "image-charge oracle C11 (sphere pairs)", &SweepRecord::oracle_C11},
      {"oracle_C12", "image-charge oracle C12", &SweepRecord::oracle_C12},
      {"oracle_C21", "image-charge oracle C21", &SweepRecord::oracle_C21},
      {"oracle_C22", "image-charge oracle C22", &SweepRecord::oracle_C22},
      {"oracle_dev", "max relative deviation BEM vs oracle", &SweepRecord::oracle_dev},
  };
  return fields;
}

namespace {

std::string format_value(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (size_t i = 0; i < flags.size(); ++i) {
    if (i) out += ';';
    out += flags[i];
  }
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string csv_header() {
  std::string out;
  for (const auto& f : sweep_fields()) {
    out += f.name;
    out += ',';
  }
  out += "flags";
  return out;
}

std::string csv_row(const SweepRecord& r) {
  std::string out;
  for (const auto& f : sweep_fields()) {
    out += format_value(r.*(f.member));
    out += ',';
  }
  out += join_flags(r.flags);
  return out;
}

void write_csv(const std::string& path, const std::vector<SweepRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << csv_header() << '\n';
  for (const auto& r : records) out << csv_row(r) << '\n';
}

void write_json(const std::string& path, const std::vector<SweepRecord>& records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json row;
    for (const auto& f : sweep_fields()) {
      const double v = r.*(f.member);
      if (std::isnan(v)) row[f.name] = nullptr;
      else row[f.name] = v;
    }
    row["flags"] = r.flags;
    arr.push_back(row);
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << arr.dump(2) << '\n';
}

std::vector<SweepRecord> read_records(const std::string& path) {
  std::vector<SweepRecord> records;
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json arr = nlohmann::json::parse(in);
    for (const auto& row : arr) {
      SweepRecord r;
      for (const auto& f : sweep_fields()) {
        if (row.contains(f.name) && !row[f.name].is_null()) r.*(f.member) = row[f.name].get<double>();
      }
      if (row.contains("flags"))
        for (const auto& fl : row["flags"]) r.flags.push_back(fl.get<std::string>());
      records.push_back(std::move(r));
    }
    return records;
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty records file " + path);
  if (line != csv_header()) throw std::runtime_error("unrecognized CSV header in " + path);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != sweep_fields().size() + 1)
      throw std::runtime_error("malformed CSV row in " + path);
    SweepRecord r;
    for (size_t i = 0; i < sweep_fields().size(); ++i) {
      if (!cells[i].empty()) r.*(sweep_fields()[i].member) = std::strtod(cells[i].c_str(), nullptr);
    }
    if (!cells.back().empty())
      for (auto& f : split(cells.back(), ';')) r.flags.push_back(f);
    records.push_back(std::move(r));
  }
  return records;
}

std::string schema_text() {
  std::ostringstream out;
  out << "Sweep record columns (CSV order; empty field = not computed, see flags):\n";
  for (const auto& f : sweep_fields()) out << "  " << f.name << ": " << f.desc << '\n';
  out << "  flags: semicolon-separated status tokens explaining missing or untrusted values\n";
  return out.str();
}

}  // namespace gapres
