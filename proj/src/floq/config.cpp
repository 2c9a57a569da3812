#include "floq/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "floq/errors.hpp"

namespace floq {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string format_number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

int parse_int(const std::string& key, const std::string& text) {
  const double v = parse_number(text);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw Error(ErrorCode::Validation, key + " must be an integer");
  return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& text) {
  std::string t = trim(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw Error(ErrorCode::Validation, key + " must be true or false");
}

std::string format_complex(cplx z) { return format_number(z.real()) + ":" + format_number(z.imag()); }

cplx parse_complex(const std::string& text) {
  const auto c = text.find(':');
  if (c == std::string::npos) return {parse_number(text), 0.0};
  return {parse_number(text.substr(0, c)), parse_number(text.substr(c + 1))};
}

std::string format_harmonics(const std::map<int, cplx>& h) {
  std::string out;
  for (const auto& [l, z] : h) {
    if (!out.empty()) out += ";";
    out += std::to_string(l) + ":" + format_complex(z);
  }
  return out;
}

std::map<int, cplx> parse_harmonics(const std::string& text) {
  std::map<int, cplx> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto c = item.find(':');
    if (c == std::string::npos) throw Error(ErrorCode::Validation, "drive.harmonics entries are l:re[:im]");
    out[parse_int("drive.harmonics", item.substr(0, c))] = parse_complex(item.substr(c + 1));
  }
  return out;
}

struct Field {
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
};

#define FLOQ_NUM(k, member)                                                                      \
  Field {                                                                                        \
    k, [](const RunConfig& c) { return format_number(c.member); },                               \
        [](RunConfig& c, const std::string&, const std::string& v) { c.member = parse_number(v); } \
  }
#define FLOQ_INT(k, member)                                                                             \
  Field {                                                                                               \
    k, [](const RunConfig& c) { return std::to_string(c.member); },                                     \
        [](RunConfig& c, const std::string& key, const std::string& v) { c.member = parse_int(key, v); } \
  }
#define FLOQ_BOOL(k, member)                                                                             \
  Field {                                                                                                \
    k, [](const RunConfig& c) { return std::string(c.member ? "true" : "false"); },                      \
        [](RunConfig& c, const std::string& key, const std::string& v) { c.member = parse_bool(key, v); } \
  }
#define FLOQ_STR(k, member)                                                                  \
  Field {                                                                                    \
    k, [](const RunConfig& c) { return c.member; },                                          \
        [](RunConfig& c, const std::string&, const std::string& v) { c.member = trim(v); } \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      FLOQ_INT("chain.L", chain.L),
      FLOQ_NUM("chain.J", chain.J),
      FLOQ_NUM("chain.g", chain.g),
      FLOQ_NUM("chain.lambda", chain.lambda),
      Field{"chain.kernel_mode", [](const RunConfig& c) { return std::string(to_string(c.chain.kernel_mode)); },
            [](RunConfig& c, const std::string&, const std::string& v) {
              c.chain.kernel_mode = kernel_mode_from_string(trim(v));
            }},
      FLOQ_STR("drive.kind", drive_kind),
      FLOQ_NUM("drive.a1", a1),
      FLOQ_NUM("drive.a2", a2),
      FLOQ_NUM("drive.tau", tau),
      FLOQ_NUM("drive.T", period),
      Field{"drive.harmonics", [](const RunConfig& c) { return format_harmonics(c.harmonics); },
            [](RunConfig& c, const std::string&, const std::string& v) { c.harmonics = parse_harmonics(v); }},
      FLOQ_NUM("solver.horizon", horizon),
      FLOQ_NUM("solver.h", h),
      FLOQ_INT("solver.refinements", refinements),
      FLOQ_INT("solver.samples_per_period", samples_per_period),
      FLOQ_NUM("solver.crosscheck_horizon", crosscheck_horizon),
      FLOQ_STR("solver.spectrum_solver", spectrum_solver),
      FLOQ_INT("solver.K0", k_policy.K0),
      FLOQ_INT("solver.K_step", k_policy.step),
      FLOQ_NUM("solver.K_growth", k_policy.growth),
      FLOQ_INT("solver.K_max", k_policy.K_max),
      FLOQ_NUM("solver.K_tol", k_policy.tol),
      Field{"solver.sambe_frame", [](const RunConfig& c) { return std::string(to_string(c.sambe_frame)); },
            [](RunConfig& c, const std::string&, const std::string& v) {
              c.sambe_frame = sambe_frame_from_string(trim(v));
            }},
      FLOQ_NUM("solver.gap_tol", tolerances.gap_tol),
      FLOQ_NUM("solver.w_min", tolerances.w_min),
      FLOQ_INT("solver.j_loc", tolerances.j_loc),
      FLOQ_NUM("solver.plateau_t0", plateau_t0),
      FLOQ_NUM("solver.plateau_t1", plateau_t1),
      FLOQ_NUM("solver.plateau_threshold", plateau_threshold),
      FLOQ_NUM("solver.profile_fraction", profile_fraction),
      FLOQ_INT("solver.period_samples", period_samples),
      FLOQ_INT("solver.mode_K", mode_K),
      FLOQ_NUM("solver.filter_rel_tol", filter_rel_tol),
      FLOQ_INT("solver.filter_grid_points", filter_grid_points),
      FLOQ_NUM("solver.f0_lo", f0_lo),
      FLOQ_NUM("solver.f0_hi", f0_hi),
      Field{"state.alpha", [](const RunConfig& c) { return format_complex(c.alpha); },
            [](RunConfig& c, const std::string&, const std::string& v) { c.alpha = parse_complex(trim(v)); }},
      Field{"state.beta", [](const RunConfig& c) { return format_complex(c.beta); },
            [](RunConfig& c, const std::string&, const std::string& v) { c.beta = parse_complex(trim(v)); }},
      FLOQ_STR("output.dir", output_dir),
      Field{"sweep.axis", [](const RunConfig& c) { return std::string(to_string(c.sweep_axis)); },
            [](RunConfig& c, const std::string&, const std::string& v) {
              try {
                c.sweep_axis = sweep_axis_from_string(trim(v));
              } catch (const Error& e) {
                throw Error(ErrorCode::Validation, e.what());
              }
            }},
      FLOQ_NUM("sweep.start", sweep_start),
      FLOQ_NUM("sweep.stop", sweep_stop),
      FLOQ_NUM("sweep.step", sweep_step),
      FLOQ_INT("sweep.workers", workers),
      FLOQ_BOOL("sweep.dynamics", sweep_dynamics),
      FLOQ_BOOL("sweep.spectrum", sweep_spectrum),
      FLOQ_BOOL("sweep.filter", sweep_filter),
  };
  return table;
}

#undef FLOQ_NUM
#undef FLOQ_INT
#undef FLOQ_BOOL
#undef FLOQ_STR

const Field& field(const std::string& key) {
  for (const auto& f : fields()) {
    if (key == f.key) return f;
  }
  throw Error(ErrorCode::Validation, "unknown config key '" + key + "'");
}

}  // namespace

double parse_number(const std::string& text) {
  std::string t = trim(text);
  double scale = 1.0;
  if (t.size() >= 2 && t.compare(t.size() - 2, 2, "pi") == 0) {
    scale = pi;
    t = trim(t.substr(0, t.size() - 2));
    if (t.empty() || t == "+") t = "1";
    if (t == "-") t = "-1";
    if (!t.empty() && t.back() == '*') t = trim(t.substr(0, t.size() - 1));
  }
  if (!t.empty() && t.front() == '+') t.erase(0, 1);
  double v = 0.0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size()) {
    throw Error(ErrorCode::Validation, "not a number: '" + text + "'");
  }
  return v * scale;
}

DriveProtocol RunConfig::drive() const {
  if (drive_kind == "step") return DriveProtocol::step(a1, a2, tau, period);
  if (drive_kind == "harmonic") return DriveProtocol::harmonics(period, harmonics);
  throw Error(ErrorCode::Validation, "drive.kind must be step or harmonic");
}

SambeOptions RunConfig::sambe_options() const {
  SambeOptions o;
  o.policy = k_policy;
  o.frame = sambe_frame;
  o.tolerances = tolerances;
  return o;
}

SweepPlan RunConfig::sweep_plan() const {
  SweepPlan p;
  p.axis = sweep_axis;
  p.start = sweep_start;
  p.stop = sweep_stop;
  p.step = sweep_step;
  p.chain = chain;
  p.base = drive();
  p.dynamics = sweep_dynamics;
  p.spectrum = sweep_spectrum;
  p.filter = sweep_filter;
  p.horizon = horizon;
  p.samples_per_period = samples_per_period;
  p.plateau_t0 = plateau_t0;
  p.plateau_t1 = plateau_t1;
  p.plateau_threshold = plateau_threshold;
  p.tolerances = tolerances;
  p.workers = workers;
  return p;
}

void RunConfig::validate() const {
  chain.validate();
  drive().validate();
  state().validate();
  auto need = [](bool ok, const std::string& m) { require(ok, m); };
  need(std::isfinite(horizon) && horizon > 0.0, "solver.horizon must be > 0");
  need(std::isfinite(h) && h >= 0.0, "solver.h must be >= 0 (0 selects the default)");
  need(refinements >= 0 && refinements <= 6, "solver.refinements must be in [0, 6]");
  need(samples_per_period >= 1, "solver.samples_per_period must be >= 1");
  need(crosscheck_horizon >= 0.0, "solver.crosscheck_horizon must be >= 0");
  need(spectrum_solver == "monodromy" || spectrum_solver == "sambe", "solver.spectrum_solver must be monodromy or sambe");
  need(k_policy.K0 >= 1 && k_policy.step >= 1 && k_policy.growth >= 1.0 && k_policy.K_max >= k_policy.K0,
       "solver K policy needs K0 >= 1, K_step >= 1, K_growth >= 1, K_max >= K0");
  need(k_policy.tol > 0.0, "solver.K_tol must be > 0");
  need(tolerances.w_min > 0.0 && tolerances.w_min <= 1.0, "solver.w_min must be in (0, 1]");
  need(tolerances.j_loc >= 0, "solver.j_loc must be >= 0");
  need(plateau_t1 > plateau_t0 && plateau_t0 >= 0.0, "plateau window needs 0 <= plateau_t0 < plateau_t1");
  need(profile_fraction >= 0.0 && profile_fraction <= 1.0, "solver.profile_fraction must be in [0, 1]");
  need(period_samples >= 2, "solver.period_samples must be >= 2");
  need(mode_K >= 0, "solver.mode_K must be >= 0");
  need(filter_rel_tol > 0.0, "solver.filter_rel_tol must be > 0");
  need(filter_grid_points >= 2, "solver.filter_grid_points must be >= 2");
  need(std::isfinite(f0_lo) && std::isfinite(f0_hi) && f0_lo < f0_hi, "solver.f0_lo must be < solver.f0_hi");
  need(!output_dir.empty(), "output.dir must not be empty");
  need(workers >= 1, "sweep.workers must be >= 1");
}

std::vector<std::string> preset_names() { return {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6"}; }

RunConfig preset_config(const std::string& name) {
  RunConfig c;
  c.preset = name;
  c.chain = ChainSpec{};
  c.chain.L = 800;
  c.chain.J = 1.0;
  c.chain.g = 1.0;
  c.chain.lambda = 20.0;
  c.a1 = 0.0;
  c.tau = 0.1 * pi;
  c.period = 0.25 * pi;
  c.sweep_axis = SweepAxis::Amplitude;
  c.sweep_start = 0.0;
  c.sweep_stop = 40.0;
  c.sweep_step = 0.5;
  if (name == "fig1") {
    c.a2 = 0.0;
  } else if (name == "fig2") {
    c.a2 = 36.0;
    c.period = 0.05 * pi;
    c.tau = 0.02 * pi;
  } else if (name == "fig3") {
    c.a2 = 3.5;
    c.sweep_axis = SweepAxis::Period;
    c.sweep_start = 0.9;
    c.sweep_stop = 2.52;
    c.sweep_step = 0.09;
  } else if (name == "fig4") {
    c.a1 = -10.0;
    c.a2 = 10.0;
    c.period = 0.4 * pi;
    c.tau = 0.2 * pi;
    c.sweep_axis = SweepAxis::SymmetricAmplitude;
    c.horizon = 50.0;
    c.plateau_t0 = 30.0;
    c.plateau_t1 = 50.0;
  } else if (name == "fig5") {
    c.a2 = 3.2;
  } else if (name == "fig6") {
    c.a2 = 3.2;
    c.profile_fraction = 0.25;
  } else {
    throw Error(ErrorCode::Validation, "unknown preset '" + name + "' (expected fig1..fig6)");
  }
  return c;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "preset") {
    const std::string name = trim(value);
    cfg = name.empty() ? RunConfig{} : preset_config(name);
    return;
  }
  try {
    field(key).set(cfg, key, value);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Validation && std::string(e.what()).find(key) == std::string::npos) {
      throw Error(ErrorCode::Validation, key + ": " + e.what());
    }
    throw;
  }
}

std::string get_config_value(const RunConfig& cfg, const std::string& key) {
  if (key == "preset") return cfg.preset;
  return field(key).get(cfg);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys{"preset"};
  for (const auto& f : fields()) keys.emplace_back(f.key);
  return keys;
}

RunConfig parse_config(const std::string& text, const RunConfig& base) {
  struct Entry {
    std::string key, value;
    int line;
  };
  std::vector<Entry> entries;
  std::stringstream ss(text);
  std::string raw, section;
  int line_no = 0;
  while (std::getline(ss, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw Error(ErrorCode::Validation, "line " + std::to_string(line_no) + ": bad section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::Validation, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string k = trim(line.substr(0, eq));
    entries.push_back({section.empty() ? k : section + "." + k, trim(line.substr(eq + 1)), line_no});
  }
  RunConfig cfg = base;
  // The preset applies first wherever it appears.
  for (const auto& e : entries) {
    if (e.key == "preset") set_config_value(cfg, e.key, e.value);
  }
  for (const auto& e : entries) {
    if (e.key == "preset") continue;
    try {
      set_config_value(cfg, e.key, e.value);
    } catch (const Error& err) {
      throw Error(err.code(), "line " + std::to_string(e.line) + ": " + err.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path, const RunConfig& base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), base);
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  if (!cfg.preset.empty()) out << "preset = " << cfg.preset << "\n";
  std::string section;
  for (const auto& f : fields()) {
    const std::string key = f.key;
    const auto dot = key.find('.');
    const std::string s = key.substr(0, dot);
    if (s != section) {
      out << "\n[" << s << "]\n";
      section = s;
    }
    out << key.substr(dot + 1) << " = " << f.get(cfg) << "\n";
  }
  return out.str();
}

}  // namespace floq
