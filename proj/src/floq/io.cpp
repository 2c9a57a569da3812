#include "floq/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "floq/errors.hpp"

namespace floq {

namespace fs = std::filesystem;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

std::string cell_text(const CsvCell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  const std::string& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string to_csv(const CsvTable& table) {
  std::ostringstream out;
  out << "# " << csv_schema << " " << table.kind << "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
    out << "\n";
  }
  return out.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot open '" + tmp.string() + "' for writing");
    out << text;
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot move '" + tmp.string() + "' into place: " + ec.message());
}

void write_csv(const fs::path& path, const CsvTable& table) { write_text(path, to_csv(table)); }

void write_json(const fs::path& path, const json& value) { write_text(path, value.dump(2) + "\n"); }

CsvText read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read '" + path.string() + "'");
  CsvText t;
  std::string line;
  if (!std::getline(in, line) || line.rfind(std::string("# ") + csv_schema + " ", 0) != 0) {
    throw Error(ErrorCode::Io, "'" + path.string() + "' lacks the " + csv_schema + " header");
  }
  t.kind = line.substr(3 + std::string(csv_schema).size());
  if (!std::getline(in, line)) throw Error(ErrorCode::Io, "'" + path.string() + "' has no column row");
  t.columns = split_csv_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    t.rows.push_back(split_csv_line(line));
    if (t.rows.back().size() != t.columns.size()) {
      throw Error(ErrorCode::Io, "'" + path.string() + "' has a row with the wrong column count");
    }
  }
  return t;
}

fs::path resolve_output_dir(const RunConfig& cfg) {
  if (const char* env = std::getenv("FLOQ_OUTPUT_DIR"); env != nullptr && *env != '\0') return fs::path(env);
  return fs::path(cfg.output_dir);
}

json to_json(const ChainSpec& chain) {
  return {{"L", chain.L},
          {"J", chain.J},
          {"g", chain.g},
          {"lambda", chain.lambda},
          {"kernel_mode", to_string(chain.kernel_mode)}};
}

json to_json(const DriveProtocol& drive) {
  json j;
  if (drive.is_step()) {
    const auto& s = drive.step_params();
    j = {{"kind", "step"}, {"a1", s.a1}, {"a2", s.a2}, {"tau", s.tau}, {"T", s.period}};
  } else {
    const auto& h = drive.harmonic_params();
    json coeffs = json::array();
    for (const auto& [l, z] : h.coefficients) coeffs.push_back({{"l", l}, {"re", z.real()}, {"im", z.imag()}});
    j = {{"kind", "harmonic"}, {"T", h.period}, {"harmonics", coeffs}};
  }
  j["omega"] = drive.omega();
  j["mean"] = drive.mean();
  return j;
}

json to_json(const RunConfig& cfg) {
  json j;
  j["preset"] = cfg.preset;
  for (const auto& key : config_keys()) {
    if (key != "preset") j["values"][key] = get_config_value(cfg, key);
  }
  j["ini"] = serialize_config(cfg);
  return j;
}

json to_json(const SweepPlan& plan) {
  return {{"axis", to_string(plan.axis)},
          {"start", plan.start},
          {"stop", plan.stop},
          {"step", plan.step},
          {"points", plan.values().size()},
          {"chain", to_json(plan.chain)},
          {"base_drive", to_json(plan.base)},
          {"outputs", {{"dynamics", plan.dynamics}, {"spectrum", plan.spectrum}, {"filter", plan.filter}}},
          {"horizon", plan.horizon},
          {"samples_per_period", plan.samples_per_period},
          {"plateau", {{"t0", plan.plateau_t0}, {"t1", plan.plateau_t1}, {"threshold", plan.plateau_threshold}}},
          {"tolerances",
           {{"gap_tol", plan.tolerances.gap_tol}, {"w_min", plan.tolerances.w_min}, {"j_loc", plan.tolerances.j_loc}}},
          {"workers", plan.workers}};
}

json metadata(const Trajectory& traj) {
  json j = {{"solver", traj.solver},
            {"frame", traj.frame},
            {"h", traj.h},
            {"approximate", traj.approximate},
            {"samples", traj.size()},
            {"chain", to_json(traj.chain)},
            {"drive", to_json(traj.drive)}};
  json d = json::object();
  for (const auto& [k, v] : traj.diagnostics) d[k] = v;
  j["diagnostics"] = d;
  j["warnings"] = traj.warnings;
  return j;
}

json metadata(const QuasienergySpectrum& s) {
  json hist = json::array();
  for (const auto& [K, shift] : s.convergence.history) hist.push_back({{"K", K}, {"shift", shift}});
  return {{"solver", s.solver},
          {"omega", s.omega},
          {"K", s.K},
          {"modes", s.entries.size()},
          {"bound_count", s.bound_count()},
          {"gap_undefined", s.gap_undefined},
          {"gap_tol", s.gap_tol},
          {"w_min", s.tolerances.w_min},
          {"j_loc", s.tolerances.j_loc},
          {"convergence",
           {{"converged", s.convergence.converged},
            {"K_final", s.convergence.K_final},
            {"last_shift", s.convergence.last_shift},
            {"history", hist}}},
          {"warnings", s.warnings}};
}

CsvTable trajectory_table(const Trajectory& traj, const std::vector<double>& fidelity) {
  CsvTable t;
  t.kind = "trajectory";
  t.columns = {"t", "re_c0", "im_c0", "P"};
  if (!fidelity.empty()) t.columns.push_back("F");
  for (std::size_t i = 0; i < traj.size(); ++i) {
    std::vector<CsvCell> row{traj.times[i], traj.c0[i].real(), traj.c0[i].imag(), traj.p[i]};
    if (!fidelity.empty()) row.emplace_back(fidelity[i]);
    t.add(std::move(row));
  }
  return t;
}

CsvTable spectrum_table(double param, const std::vector<SpectrumEntry>& entries, CsvTable table) {
  if (table.columns.empty()) {
    table.kind = "spectrum";
    table.columns = {"param",           "epsilon",       "class", "gap_distance", "impurity_weight",
                     "region_weight",   "localization_length"};
  }
  for (const auto& e : entries) {
    table.add({param, e.quasienergy, std::string(to_string(e.cls)), e.gap_distance, e.impurity_weight,
               e.region_weight, e.localization_length});
  }
  return table;
}

CsvTable spectrum_table(const std::vector<std::pair<double, const QuasienergySpectrum*>>& points) {
  CsvTable t;
  for (const auto& [param, s] : points) t = spectrum_table(param, s->entries, std::move(t));
  if (t.columns.empty()) t = spectrum_table(0.0, {}, {});
  return t;
}

CsvTable mode_table(const FloquetMode& mode) {
  CsvTable t;
  t.kind = "floquet-mode";
  t.columns = {"j", "k", "re_u", "im_u"};
  for (int j = 0; j < mode.harmonics.rows(); ++j) {
    for (int c = 0; c < mode.harmonics.cols(); ++c) {
      const cplx z = mode.harmonics(j, c);
      t.add({static_cast<long long>(j), static_cast<long long>(c - mode.K), z.real(), z.imag()});
    }
  }
  return t;
}

CsvTable fbs_table(const FbsReport& r, const std::vector<double>& f_infinity) {
  CsvTable t;
  t.kind = "fbs";
  t.columns = {"t", "P_inf", "re_u0", "im_u0", "rho_up", "rho_down", "re_mu", "im_mu"};
  if (!f_infinity.empty()) t.columns.push_back("F_inf");
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    const cplx u0 = i < r.u0_series.size() ? r.u0_series[i] : cplx(0.0);
    const cplx mu = i < r.mu.size() ? r.mu[i] : cplx(0.0);
    const double up = i < r.rho_fbs.size() ? r.rho_fbs[i](0, 0).real() : 0.0;
    const double down = i < r.rho_fbs.size() ? r.rho_fbs[i](1, 1).real() : 0.0;
    std::vector<CsvCell> row{r.times[i], r.p_infinity[i], u0.real(), u0.imag(), up, down, mu.real(), mu.imag()};
    if (!f_infinity.empty()) row.emplace_back(f_infinity[i]);
    t.add(std::move(row));
  }
  return t;
}

CsvTable profile_table(const std::vector<double>& populations, double time) {
  CsvTable t;
  t.kind = "fbs-profile";
  t.columns = {"j", "t", "population"};
  for (std::size_t j = 0; j < populations.size(); ++j) t.add({static_cast<long long>(j), time, populations[j]});
  return t;
}

CsvTable filter_spectra_table(const FilterReport& r) {
  CsvTable t;
  t.kind = "filter-spectra";
  t.columns = {"omega", "G"};
  for (double tc : r.control_times) t.columns.push_back("eps2_t" + format_double(tc));
  for (std::size_t i = 0; i < r.omega_grid.size(); ++i) {
    std::vector<CsvCell> row{r.omega_grid[i], r.noise_spectrum[i]};
    for (const auto& s : r.control_spectra) row.emplace_back(s[i]);
    t.add(std::move(row));
  }
  return t;
}

CsvTable sweep_summary_table(const SweepResult& res) {
  CsvTable t;
  t.kind = "sweep-summary";
  t.columns = {"index", "param",      "ok",           "fbs",     "bound_count",       "marginal",
               "gap_distance", "impurity_weight", "plateau", "p_inf_mean", "filter_prediction", "error"};
  for (const auto& p : res.points) {
    t.add({static_cast<long long>(p.index), p.value, static_cast<long long>(p.ok),
           static_cast<long long>(p.bound_count > 0), static_cast<long long>(p.bound_count),
           static_cast<long long>(p.marginal), p.gap_distance, p.impurity_weight, p.plateau, p.p_infinity_mean,
           p.filter_prediction, p.error});
  }
  return t;
}

CsvTable convergence_table(const std::vector<ConvergenceRow>& rows) {
  CsvTable t;
  t.kind = "convergence";
  t.columns = {"study", "parameter", "observable", "drift", "target", "pass"};
  for (const auto& r : rows) {
    t.add({r.study, r.parameter, r.observable, r.drift, r.target, static_cast<long long>(r.pass)});
  }
  return t;
}

}  // namespace floq
