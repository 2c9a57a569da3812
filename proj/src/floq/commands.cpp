#include "floq/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "floq/errors.hpp"
#include "floq/fidelity.hpp"
#include "floq/lattice.hpp"
#include "floq/volterra.hpp"

#ifndef FLOQ_VERSION_STRING
#define FLOQ_VERSION_STRING "0.0.0"
#endif

namespace floq {

namespace fs = std::filesystem;

namespace {

// Files are collected first and written together at the end.
struct Outputs {
  fs::path dir;
  json base;
  std::vector<std::pair<std::string, CsvTable>> tables;
  std::vector<std::pair<std::string, json>> sidecars;

  void csv(const std::string& name, CsvTable table, json extra = json::object()) {
    json meta = base;
    meta["file"] = name;
    meta["kind"] = table.kind;
    meta["columns"] = table.columns;
    for (auto it = extra.begin(); it != extra.end(); ++it) meta[it.key()] = it.value();
    const std::string stem = name.substr(0, name.rfind('.'));
    tables.emplace_back(name, std::move(table));
    sidecars.emplace_back(stem + ".json", std::move(meta));
  }

  void json_file(const std::string& name, json value) { sidecars.emplace_back(name, std::move(value)); }

  CommandResult flush(json summary) {
    CommandResult r;
    r.directory = dir;
    for (const auto& [name, table] : tables) {
      write_csv(dir / name, table);
      r.files.push_back((dir / name).string());
    }
    for (const auto& [name, value] : sidecars) {
      write_json(dir / name, value);
      r.files.push_back((dir / name).string());
    }
    r.summary = std::move(summary);
    return r;
  }
};

Outputs make_outputs(const std::string& command, const RunConfig& cfg) {
  Outputs o;
  o.dir = resolve_output_dir(cfg);
  o.base = {{"schema", csv_schema},
            {"command", command},
            {"version", FLOQ_VERSION_STRING},
            {"chain", to_json(cfg.chain)},
            {"drive", to_json(cfg.drive())},
            {"config", to_json(cfg)}};
  return o;
}

std::vector<double> parse_scan(const std::string& text) {
  std::vector<double> parts;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto c = text.find(':', pos);
    parts.push_back(parse_number(text.substr(pos, c == std::string::npos ? std::string::npos : c - pos)));
    if (c == std::string::npos) break;
    pos = c + 1;
  }
  require(parts.size() == 3, "--a2-scan expects start:stop:step");
  require(parts[2] > 0.0 && parts[1] >= parts[0], "--a2-scan needs step > 0 and stop >= start");
  return parts;
}

QuasienergySpectrum compute_spectrum(const RunConfig& cfg, const DriveProtocol& drive) {
  if (cfg.spectrum_solver == "sambe" || !drive.is_step()) return solve_sambe(cfg.chain, drive, cfg.sambe_options());
  return monodromy_spectrum(cfg.chain, drive, cfg.tolerances).spectrum;
}

CommandResult cmd_dynamics(const RunConfig& cfg) {
  Outputs out = make_outputs("dynamics", cfg);
  const DriveProtocol drive = cfg.drive();
  LatticeOptions lo;
  lo.samples_per_period = cfg.samples_per_period;
  Trajectory traj = propagate_lattice(cfg.chain, drive, cfg.horizon, lo).trajectory;
  const std::vector<double> fid = fidelity_series(traj, drive, cfg.chain, cfg.state());

  json cross = {{"performed", false}};
  CsvTable cross_table;
  const double ch = std::min(cfg.crosscheck_horizon, cfg.horizon);
  if (ch > 0.0) {
    VolterraOptions vo;
    vo.h = cfg.h;
    vo.refinements = cfg.refinements;
    const Trajectory vt = solve_volterra(cfg.chain, drive, ch, vo);
    const Trajectory lt = propagate_lattice_at(cfg.chain, drive, vt.times).trajectory;
    double worst = 0.0;
    cross_table.kind = "crosscheck";
    cross_table.columns = {"t", "P_volterra", "P_lattice", "abs_diff"};
    for (std::size_t i = 0; i < vt.size(); ++i) {
      const double d = std::abs(vt.p[i] - lt.p[i]);
      worst = std::max(worst, d);
      cross_table.add({vt.times[i], vt.p[i], lt.p[i], d});
    }
    cross = {{"performed", true}, {"horizon", ch}, {"max_abs_dP", worst}, {"volterra", metadata(vt)}};
    traj.diagnostics["crosscheck_max_abs_dP"] = worst;
  }
  const double plateau = cfg.plateau_t1 <= cfg.horizon + 1e-9
                             ? window_mean(traj.times, traj.p, cfg.plateau_t0, cfg.plateau_t1)
                             : std::numeric_limits<double>::quiet_NaN();
  json extra = {{"trajectory", metadata(traj)}, {"crosscheck", cross}, {"plateau", plateau}};
  out.csv("dynamics.csv", trajectory_table(traj, fid), extra);
  if (!cross_table.columns.empty()) out.csv("crosscheck.csv", std::move(cross_table), {{"crosscheck", cross}});
  return out.flush({{"command", "dynamics"},
                    {"P_final", traj.p.back()},
                    {"plateau", plateau},
                    {"crosscheck_max_abs_dP", cross.value("max_abs_dP", 0.0)}});
}

CommandResult cmd_spectrum(const RunConfig& cfg, const CommandOptions& opt) {
  Outputs out = make_outputs("spectrum", cfg);
  if (opt.a2_scan.empty()) {
    const QuasienergySpectrum s = compute_spectrum(cfg, cfg.drive());
    const double param = cfg.drive_kind == "step" ? cfg.a2 : 0.0;
    out.csv("spectrum.csv", spectrum_table(param, s.entries), {{"param", "a2"}, {"spectrum", metadata(s)}});
    return out.flush({{"command", "spectrum"}, {"modes", s.entries.size()}, {"bound_count", s.bound_count()}});
  }
  require(cfg.drive_kind == "step", "--a2-scan needs a step drive");
  const std::vector<double> scan = parse_scan(opt.a2_scan);
  RunConfig scan_cfg = cfg;
  scan_cfg.sweep_axis = SweepAxis::Amplitude;
  scan_cfg.sweep_start = scan[0];
  scan_cfg.sweep_stop = scan[1];
  scan_cfg.sweep_step = scan[2];
  SweepPlan plan = scan_cfg.sweep_plan();
  plan.dynamics = false;
  plan.spectrum = true;
  plan.filter = false;
  plan.plateau_t0 = 0.0;
  plan.plateau_t1 = plan.horizon;

  CsvTable table = spectrum_table(0.0, {}, {});
  json points = json::array();
  int with_bound = 0;
  if (cfg.spectrum_solver == "sambe") {
    for (double v : plan.values()) {
      const QuasienergySpectrum s = solve_sambe(cfg.chain, drive_at(plan, v), cfg.sambe_options());
      table = spectrum_table(v, s.entries, std::move(table));
      points.push_back({{"param", v}, {"spectrum", metadata(s)}});
      with_bound += s.bound_count() > 0;
    }
  } else {
    const SweepResult res = run_sweep(plan);
    for (const auto& p : res.points) {
      if (!p.ok) throw Error(ErrorCode::NotConverged, "spectrum at a2=" + format_double(p.value) + ": " + p.error);
      table = spectrum_table(p.value, p.entries, std::move(table));
      points.push_back({{"param", p.value}, {"bound_count", p.bound_count}});
      with_bound += p.bound_count > 0;
    }
  }
  out.csv("spectrum.csv", std::move(table),
          {{"param", "a2"}, {"scan", {{"start", scan[0]}, {"stop", scan[1]}, {"step", scan[2]}}}, {"points", points}});
  return out.flush({{"command", "spectrum"}, {"points", points.size()}, {"points_with_bound", with_bound}});
}

CommandResult cmd_fbs(const RunConfig& cfg) {
  Outputs out = make_outputs("fbs", cfg);
  const DriveProtocol drive = cfg.drive();
  const MonodromySolution sol = monodromy_spectrum(cfg.chain, drive, cfg.tolerances);
  const FbsReport rep = find_fbs(sol, cfg.period_samples);
  json info = {{"found", rep.found},
               {"mode_index", rep.mode_index},
               {"quasienergy", rep.quasienergy},
               {"impurity_weight", rep.impurity_weight},
               {"x", {{"re", rep.x.real()}, {"im", rep.x.imag()}}},
               {"spectrum", metadata(sol.spectrum)},
               {"monodromy", {{"max_unitarity_defect", sol.max_unitarity_defect}, {"max_residual", sol.max_residual}}}};
  json summary = {{"command", "fbs"}, {"found", rep.found}};
  if (rep.found) {
    const std::vector<double> finf = asymptotic_fidelity(sol, rep.mode_index, cfg.state(), rep.times);
    double avg = 0.0;
    for (double p : rep.p_infinity) avg += p;
    avg /= static_cast<double>(rep.p_infinity.size());
    info["p_infinity_mean"] = avg;
    out.csv("fbs.csv", fbs_table(rep, finf), {{"fbs", info}});
    const double t_profile = cfg.profile_fraction * drive.period();
    const std::vector<double> prof = mode_profile(sol, rep.mode_index, t_profile);
    double near = 0.0;
    for (std::size_t j = 0; j < prof.size() && j <= static_cast<std::size_t>(cfg.tolerances.j_loc); ++j) near += prof[j];
    out.csv("profile.csv", profile_table(prof, t_profile),
            {{"t", t_profile}, {"weight_within_j_loc", near}, {"j_loc", cfg.tolerances.j_loc}});
    const FloquetMode mode = sol.mode(rep.mode_index, cfg.mode_K);
    out.csv("mode.csv", mode_table(mode), {{"quasienergy", mode.quasienergy}, {"K", mode.K}});
    summary["quasienergy"] = rep.quasienergy;
    summary["p_infinity_mean"] = avg;
    summary["weight_within_j_loc"] = near;
  } else {
    out.csv("fbs.csv", fbs_table(rep), {{"fbs", info}});
  }
  return out.flush(summary);
}

CommandResult cmd_filter(const RunConfig& cfg) {
  Outputs out = make_outputs("filter", cfg);
  const DriveProtocol drive = cfg.drive();
  std::vector<double> times;
  const double dt = 0.5;
  for (double t = 0.0; t <= cfg.horizon + 1e-9; t += dt) times.push_back(std::min(t, cfg.horizon));
  FilterOptions fo;
  fo.rel_tol = cfg.filter_rel_tol;
  fo.grid_points = cfg.filter_grid_points;
  fo.spectrum_times = {0.1 * cfg.horizon, 0.5 * cfg.horizon, cfg.horizon};
  const FilterReport rep = filtered_population(cfg.chain, drive, times, fo);
  const Trajectory exact = propagate_lattice_at(cfg.chain, drive, times).trajectory;

  std::vector<double> p_fbs(times.size(), 0.0);
  int bound = 0;
  if (drive.is_step()) {
    const MonodromySolution sol = monodromy_spectrum(cfg.chain, drive, cfg.tolerances);
    bound = sol.spectrum.bound_count();
    const FbsReport fbs = find_fbs(sol, 8);
    if (fbs.found) p_fbs = p_infinity_at(sol, fbs.mode_index, times);
  }
  LatticeOptions lo;
  lo.samples_per_period = cfg.samples_per_period;
  const Trajectory renorm = propagate_lattice_at(
      [&] {
        ChainSpec c = cfg.chain;
        c.g = cfg.chain.g * std::abs(renorm_factor(drive, 0));
        return c;
      }(),
      DriveProtocol::constant(drive.mean(), drive.period()), times).trajectory;

  CsvTable dyn;
  dyn.kind = "filter-dynamics";
  dyn.columns = {"t", "c0_filtered_abs", "P_filtered", "P_exact", "P_fbs", "P_renormalized", "R"};
  for (std::size_t i = 0; i < times.size(); ++i) {
    dyn.add({times[i], rep.c0_abs[i], rep.c0_abs[i] * rep.c0_abs[i], exact.p[i], p_fbs[i], renorm.p[i], rep.R[i]});
  }
  const cplx f0 = renorm_factor(drive, 0);
  json info = {{"omega_a", rep.omega_a},
               {"frame", "control spectrum variable omega; noise G evaluated at omega + omega_a"},
               {"max_quadrature_error", rep.max_quadrature_error},
               {"bound_count", bound},
               {"F0", {{"re", f0.real()}, {"im", f0.imag()}, {"abs2", std::norm(f0)}}}};
  out.csv("filter_spectra.csv", filter_spectra_table(rep), {{"filter", info}, {"control_times", rep.control_times}});
  out.csv("filter_dynamics.csv", std::move(dyn), {{"filter", info}});

  json summary = {{"command", "filter"},
                  {"P_filtered_final", rep.c0_abs.back() * rep.c0_abs.back()},
                  {"P_exact_final", exact.p.back()},
                  {"bound_count", bound}};
  if (drive.is_step()) {
    const auto& s = drive.step_params();
    if (s.a1 == -s.a2) {
      CsvTable f0t;
      f0t.kind = "f0-scan";
      f0t.columns = {"a2", "F0_abs2"};
      const int n = 2000;
      for (int i = 0; i <= n; ++i) {
        const double a = cfg.f0_lo + (cfg.f0_hi - cfg.f0_lo) * i / n;
        f0t.add({a, std::norm(renorm_factor(DriveProtocol::step(-a, a, s.tau, s.period), 0))});
      }
      json roots = json::array();
      for (const auto& r : find_f0_zeros(s.period, s.tau, cfg.f0_lo, cfg.f0_hi)) {
        roots.push_back({{"a2", r.a2}, {"residual", r.residual}});
      }
      out.csv("f0.csv", std::move(f0t), {{"roots", roots}});
      summary["f0_roots"] = roots;
    }
  }
  return out.flush(summary);
}

CommandResult cmd_sweep(const RunConfig& cfg) {
  const SweepPlan plan = cfg.sweep_plan();
  plan.validate();
  Outputs out = make_outputs("sweep", cfg);
  const SweepResult res = run_sweep(plan);
  CsvTable all = spectrum_table(0.0, {}, {});
  for (const auto& p : res.points) {
    char stem[32];
    std::snprintf(stem, sizeof stem, "points/%04zu", p.index);
    if (p.ok && plan.dynamics) {
      CsvTable d;
      d.kind = "sweep-point-dynamics";
      d.columns = {"t", "P"};
      for (std::size_t i = 0; i < p.times.size(); ++i) d.add({p.times[i], p.p[i]});
      out.tables.emplace_back(std::string(stem) + "_dynamics.csv", std::move(d));
    }
    if (p.ok && plan.spectrum) {
      out.tables.emplace_back(std::string(stem) + "_spectrum.csv", spectrum_table(p.value, p.entries));
      all = spectrum_table(p.value, p.entries, std::move(all));
    }
  }
  const SweepSummary& s = res.summary;
  json summary = {{"points", s.points},
                  {"failed", s.failed},
                  {"excluded_marginal", s.excluded_marginal},
                  {"scored", s.scored},
                  {"agree", s.agree},
                  {"agreement", std::isnan(s.agreement) ? json(nullptr) : json(s.agreement)}};
  out.csv("summary.csv", sweep_summary_table(res), {{"summary", summary}});
  if (plan.spectrum) out.csv("spectrum.csv", std::move(all), {{"param", to_string(plan.axis)}});
  json manifest = out.base;
  manifest["plan"] = to_json(plan);
  manifest["convergence_defaults"] = {{"samples_per_period", plan.samples_per_period},
                                      {"monodromy_tolerance", "machine precision per period"},
                                      {"filter_rel_tol", cfg.filter_rel_tol}};
  manifest["summary"] = summary;
  out.json_file("manifest.json", manifest);
  summary["command"] = "sweep";
  return out.flush(summary);
}

CommandResult cmd_converge(const RunConfig& cfg) {
  Outputs out = make_outputs("converge", cfg);
  ConvergenceOptions co;
  co.volterra_horizon = std::min(cfg.crosscheck_horizon > 0.0 ? cfg.crosscheck_horizon : 20.0, cfg.horizon);
  co.plateau_t0 = cfg.plateau_t0;
  co.plateau_t1 = cfg.plateau_t1;
  co.samples_per_period = cfg.samples_per_period;
  co.sambe = cfg.sambe_options();
  const auto rows = convergence_report(cfg.chain, cfg.drive(), co);
  bool all = true;
  json list = json::array();
  for (const auto& r : rows) {
    all = all && r.pass;
    list.push_back({{"study", r.study}, {"drift", r.drift}, {"target", r.target}, {"pass", r.pass}});
  }
  out.csv("convergence.csv", convergence_table(rows), {{"certified", all}});
  return out.flush({{"command", "converge"}, {"certified", all}, {"rows", list}});
}

}  // namespace

std::vector<std::string> command_names() { return {"dynamics", "spectrum", "fbs", "filter", "sweep", "converge"}; }

CommandResult run_command(const std::string& name, const RunConfig& cfg, const CommandOptions& options) {
  const auto names = command_names();
  require(std::find(names.begin(), names.end(), name) != names.end(), "unknown command '" + name + "'");
  cfg.validate();
  if (name == "dynamics") return cmd_dynamics(cfg);
  if (name == "spectrum") return cmd_spectrum(cfg, options);
  if (name == "fbs") return cmd_fbs(cfg);
  if (name == "filter") return cmd_filter(cfg);
  if (name == "sweep") return cmd_sweep(cfg);
  return cmd_converge(cfg);
}

}  // namespace floq
