#include "floq/floq.h"

#include <algorithm>
#include <memory>
#include <optional>
#include <string>

#include "floq/commands.hpp"
#include "floq/config.hpp"
#include "floq/errors.hpp"
#include "floq/fidelity.hpp"
#include "floq/filtering.hpp"
#include "floq/lattice.hpp"
#include "floq/monodromy.hpp"
#include "floq/sambe.hpp"
#include "floq/steady_state.hpp"
#include "floq/volterra.hpp"

struct floq_trajectory {
  floq::Trajectory traj;
};

struct floq_spectrum {
  floq::QuasienergySpectrum spectrum;
  std::optional<floq::MonodromySolution> monodromy;
};

struct floq_config {
  floq::RunConfig cfg;
  std::string scratch;
  std::string summary;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_error_json;

void set_error(floq_status status, const std::string& message) {
  last_error = message;
  floq::json j = {{"code", static_cast<int>(status)},
                  {"error", floq_status_name(status)},
                  {"message", message},
                  {"exit_code", floq_exit_code(status)}};
  last_error_json = j.dump();
}

template <class F>
floq_status guarded(F&& f) {
  last_error.clear();
  last_error_json.clear();
  try {
    f();
    return FLOQ_OK;
  } catch (const floq::Error& e) {
    const auto s = static_cast<floq_status>(static_cast<int>(e.code()));
    set_error(s, e.what());
    return s;
  } catch (const std::bad_alloc&) {
    set_error(FLOQ_ERR_INTERNAL, "out of memory");
    return FLOQ_ERR_INTERNAL;
  } catch (const std::exception& e) {
    set_error(FLOQ_ERR_INTERNAL, e.what());
    return FLOQ_ERR_INTERNAL;
  }
}

void need(bool ok, const char* message) {
  if (!ok) throw floq::Error(floq::ErrorCode::Validation, message);
}

floq::ChainSpec chain_of(const floq_chain* c) {
  need(c != nullptr, "chain must not be NULL");
  floq::ChainSpec s;
  s.L = c->L;
  s.J = c->J;
  s.g = c->g;
  s.lambda = c->lambda;
  need(c->kernel_mode == FLOQ_KERNEL_OPEN_CHAIN || c->kernel_mode == FLOQ_KERNEL_PLANE_WAVE, "unknown kernel mode");
  s.kernel_mode = c->kernel_mode == FLOQ_KERNEL_PLANE_WAVE ? floq::KernelMode::PaperPlaneWave
                                                           : floq::KernelMode::OpenChainExact;
  s.validate();
  return s;
}

floq::DriveProtocol drive_of(const floq_step_drive* d) {
  need(d != nullptr, "drive must not be NULL");
  floq::DriveProtocol p = floq::DriveProtocol::step(d->a1, d->a2, d->tau, d->period);
  p.validate();
  return p;
}

floq::SuperpositionState state_of(const floq_state* s) {
  floq::SuperpositionState st;
  if (s != nullptr) {
    st.alpha = {s->alpha_re, s->alpha_im};
    st.beta = {s->beta_re, s->beta_im};
  }
  st.validate();
  return st;
}

floq::ClassifyTolerances tol_of(const floq_tolerances* t) {
  floq::ClassifyTolerances c;
  if (t != nullptr) {
    c.gap_tol = t->gap_tol;
    c.w_min = t->w_min;
    c.j_loc = t->j_loc;
  }
  return c;
}

const floq::MonodromySolution& monodromy_of(const floq_spectrum* s) {
  need(s != nullptr, "spectrum must not be NULL");
  need(s->monodromy.has_value(), "bound-state queries need a monodromy spectrum");
  return *s->monodromy;
}

}  // namespace

extern "C" {

floq_chain floq_chain_default(void) {
  const floq::ChainSpec s;
  return {s.L, s.J, s.g, s.lambda, FLOQ_KERNEL_OPEN_CHAIN};
}

floq_state floq_state_default(void) {
  const floq::SuperpositionState s;
  return {s.alpha.real(), s.alpha.imag(), s.beta.real(), s.beta.imag()};
}

floq_tolerances floq_tolerances_default(void) {
  const floq::ClassifyTolerances t;
  return {t.gap_tol, t.w_min, t.j_loc};
}

const char* floq_version(void) { return FLOQ_VERSION_STRING; }

const char* floq_last_error(void) { return last_error.c_str(); }

const char* floq_last_error_json(void) { return last_error_json.c_str(); }

const char* floq_status_name(floq_status status) {
  if (status == FLOQ_OK) return "Ok";
  return floq::error_name(static_cast<floq::ErrorCode>(static_cast<int>(status)));
}

int floq_exit_code(floq_status status) {
  if (status == FLOQ_OK) return 0;
  return floq::exit_code_for(static_cast<floq::ErrorCode>(static_cast<int>(status)));
}

floq_status floq_volterra(const floq_chain* chain, const floq_step_drive* drive, double horizon, double h,
                          int refinements, floq_trajectory** out) {
  return guarded([&] {
    need(out != nullptr, "out must not be NULL");
    floq::VolterraOptions o;
    o.h = h;
    o.refinements = refinements;
    need(refinements >= 0, "refinements must be >= 0");
    auto t = std::make_unique<floq_trajectory>();
    t->traj = floq::solve_volterra(chain_of(chain), drive_of(drive), horizon, o);
    *out = t.release();
  });
}

floq_status floq_lattice(const floq_chain* chain, const floq_step_drive* drive, double horizon,
                         int samples_per_period, floq_trajectory** out) {
  return guarded([&] {
    need(out != nullptr, "out must not be NULL");
    floq::LatticeOptions o;
    o.samples_per_period = samples_per_period;
    auto t = std::make_unique<floq_trajectory>();
    t->traj = floq::propagate_lattice(chain_of(chain), drive_of(drive), horizon, o).trajectory;
    *out = t.release();
  });
}

floq_status floq_renormalized(const floq_chain* chain, const floq_step_drive* drive, double horizon,
                              int samples_per_period, floq_trajectory** out) {
  return guarded([&] {
    need(out != nullptr, "out must not be NULL");
    floq::LatticeOptions o;
    o.samples_per_period = samples_per_period;
    auto t = std::make_unique<floq_trajectory>();
    t->traj = floq::renormalized_dynamics(chain_of(chain), drive_of(drive), horizon, o);
    *out = t.release();
  });
}

void floq_trajectory_free(floq_trajectory* traj) { delete traj; }

size_t floq_trajectory_size(const floq_trajectory* traj) { return traj ? traj->traj.size() : 0; }

floq_frame floq_trajectory_frame(const floq_trajectory* traj) {
  return traj && traj->traj.frame == floq::frame_lab ? FLOQ_FRAME_LAB : FLOQ_FRAME_C0_PRIME;
}

size_t floq_trajectory_data(const floq_trajectory* traj, double* times, double* re_c0, double* im_c0, double* p,
                            size_t capacity) {
  if (traj == nullptr) return 0;
  const auto& t = traj->traj;
  const size_t n = std::min(capacity, t.size());
  for (size_t i = 0; i < n; ++i) {
    if (times) times[i] = t.times[i];
    if (re_c0) re_c0[i] = t.c0[i].real();
    if (im_c0) im_c0[i] = t.c0[i].imag();
    if (p) p[i] = t.p[i];
  }
  return n;
}

floq_status floq_fidelity(const floq_trajectory* traj, const floq_state* state, double* out, size_t capacity) {
  return guarded([&] {
    need(traj != nullptr && out != nullptr, "trajectory and out must not be NULL");
    need(capacity >= traj->traj.size(), "output buffer is smaller than the trajectory");
    const auto f = floq::fidelity_series(traj->traj, traj->traj.drive, traj->traj.chain, state_of(state));
    std::copy(f.begin(), f.end(), out);
  });
}

floq_status floq_fidelity_direct(const floq_chain* chain, const floq_step_drive* drive, const floq_state* state,
                                 const double* times, size_t n, double* out) {
  return guarded([&] {
    need(times != nullptr && out != nullptr, "times and out must not be NULL");
    const auto r = floq::superposition_direct(chain_of(chain), drive_of(drive), state_of(state),
                                              std::vector<double>(times, times + n));
    std::copy(r.fidelity.begin(), r.fidelity.end(), out);
  });
}

floq_status floq_monodromy(const floq_chain* chain, const floq_step_drive* drive, const floq_tolerances* tol,
                           floq_spectrum** out) {
  return guarded([&] {
    need(out != nullptr, "out must not be NULL");
    auto s = std::make_unique<floq_spectrum>();
    s->monodromy.emplace(floq::monodromy_spectrum(chain_of(chain), drive_of(drive), tol_of(tol)));
    s->spectrum = s->monodromy->spectrum;
    *out = s.release();
  });
}

floq_status floq_sambe(const floq_chain* chain, const floq_step_drive* drive, const floq_tolerances* tol, int K0,
                       int K_max, double k_tol, floq_spectrum** out) {
  return guarded([&] {
    need(out != nullptr, "out must not be NULL");
    floq::SambeOptions o;
    o.tolerances = tol_of(tol);
    if (K0 > 0) o.policy.K0 = K0;
    if (K_max > 0) o.policy.K_max = K_max;
    if (k_tol > 0.0) o.policy.tol = k_tol;
    need(o.policy.K_max >= o.policy.K0, "K_max must be >= K0");
    auto s = std::make_unique<floq_spectrum>();
    s->spectrum = floq::solve_sambe(chain_of(chain), drive_of(drive), o);
    *out = s.release();
  });
}

void floq_spectrum_free(floq_spectrum* spectrum) { delete spectrum; }

size_t floq_spectrum_size(const floq_spectrum* spectrum) { return spectrum ? spectrum->spectrum.entries.size() : 0; }

floq_status floq_spectrum_entry_at(const floq_spectrum* spectrum, size_t index, floq_spectrum_entry* out) {
  return guarded([&] {
    need(spectrum != nullptr && out != nullptr, "spectrum and out must not be NULL");
    need(index < spectrum->spectrum.entries.size(), "index out of range");
    const auto& e = spectrum->spectrum.entries[index];
    out->quasienergy = e.quasienergy;
    out->cls = e.cls == floq::ModeClass::Bound      ? FLOQ_BOUND
               : e.cls == floq::ModeClass::Marginal ? FLOQ_MARGINAL
                                                    : FLOQ_BAND;
    out->gap_distance = e.gap_distance;
    out->impurity_weight = e.impurity_weight;
    out->region_weight = e.region_weight;
    out->localization_length = e.localization_length;
  });
}

int floq_spectrum_bound_count(const floq_spectrum* spectrum) {
  return spectrum ? spectrum->spectrum.bound_count() : 0;
}

int floq_spectrum_gap_undefined(const floq_spectrum* spectrum) {
  return spectrum && spectrum->spectrum.gap_undefined ? 1 : 0;
}

double floq_spectrum_distance(const floq_spectrum* a, const floq_spectrum* b) {
  if (a == nullptr || b == nullptr) return -1.0;
  return floq::spectrum_distance(floq::quasienergies(a->spectrum), floq::quasienergies(b->spectrum),
                                 a->spectrum.omega);
}

floq_status floq_fbs_p_infinity(const floq_spectrum* spectrum, int samples, int* found, double* mean, double* min,
                                double* max) {
  return guarded([&] {
    need(samples >= 2, "samples must be >= 2");
    const auto rep = floq::find_fbs(monodromy_of(spectrum), samples);
    double s = 0.0, lo = 1.0, hi = 0.0;
    for (double p : rep.p_infinity) {
      s += p;
      lo = std::min(lo, p);
      hi = std::max(hi, p);
    }
    if (rep.p_infinity.empty()) lo = hi = 0.0;
    if (found) *found = rep.found ? 1 : 0;
    if (mean) *mean = rep.p_infinity.empty() ? 0.0 : s / static_cast<double>(rep.p_infinity.size());
    if (min) *min = lo;
    if (max) *max = hi;
  });
}

floq_status floq_fbs_profile(const floq_spectrum* spectrum, double t, double* out, size_t capacity) {
  return guarded([&] {
    const auto& sol = monodromy_of(spectrum);
    const int b = sol.spectrum.strongest_bound();
    if (b < 0) throw floq::Error(floq::ErrorCode::NotBound, "no bound mode in this spectrum");
    need(out != nullptr && capacity >= static_cast<size_t>(sol.size()), "output buffer needs L+1 entries");
    const auto prof = floq::mode_profile(sol, b, t);
    std::copy(prof.begin(), prof.end(), out);
  });
}

floq_status floq_fbs_fidelity(const floq_spectrum* spectrum, const floq_state* state, const double* times, size_t n,
                              double* out) {
  return guarded([&] {
    const auto& sol = monodromy_of(spectrum);
    const int b = sol.spectrum.strongest_bound();
    if (b < 0) throw floq::Error(floq::ErrorCode::NotBound, "no bound mode in this spectrum");
    need(times != nullptr && out != nullptr, "times and out must not be NULL");
    const auto f = floq::asymptotic_fidelity(sol, b, state_of(state), std::vector<double>(times, times + n));
    std::copy(f.begin(), f.end(), out);
  });
}

floq_status floq_renorm_factor(const floq_step_drive* drive, int n, double* re, double* im) {
  return guarded([&] {
    const floq::cplx f = floq::renorm_factor(drive_of(drive), n);
    if (re) *re = f.real();
    if (im) *im = f.imag();
  });
}

floq_status floq_find_f0_zeros(double period, double tau, double lo, double hi, double* roots, double* residuals,
                               size_t capacity, size_t* count) {
  return guarded([&] {
    need(period > 0.0 && tau > 0.0 && tau < period, "need 0 < tau < period");
    const auto r = floq::find_f0_zeros(period, tau, lo, hi);
    if (count) *count = r.size();
    for (size_t i = 0; i < std::min(capacity, r.size()); ++i) {
      if (roots) roots[i] = r[i].a2;
      if (residuals) residuals[i] = r[i].residual;
    }
  });
}

floq_status floq_filtered_population(const floq_chain* chain, const floq_step_drive* drive, const double* times,
                                     size_t n, double* out) {
  return guarded([&] {
    need(times != nullptr && out != nullptr && n > 0, "times and out must be non-empty");
    const auto r = floq::filtered_population(chain_of(chain), drive_of(drive), std::vector<double>(times, times + n));
    for (size_t i = 0; i < n; ++i) out[i] = r.c0_abs[i] * r.c0_abs[i];
  });
}

floq_status floq_config_new(floq_config** out) {
  return guarded([&] {
    need(out != nullptr, "out must not be NULL");
    *out = new floq_config{};
  });
}

floq_status floq_config_preset(const char* name, floq_config** out) {
  return guarded([&] {
    need(out != nullptr && name != nullptr, "name and out must not be NULL");
    auto c = std::make_unique<floq_config>();
    c->cfg = floq::preset_config(name);
    *out = c.release();
  });
}

floq_status floq_config_parse(const char* text, floq_config** out) {
  return guarded([&] {
    need(out != nullptr && text != nullptr, "text and out must not be NULL");
    auto c = std::make_unique<floq_config>();
    c->cfg = floq::parse_config(text);
    *out = c.release();
  });
}

floq_status floq_config_load(const char* path, floq_config** out) {
  return guarded([&] {
    need(out != nullptr && path != nullptr, "path and out must not be NULL");
    auto c = std::make_unique<floq_config>();
    c->cfg = floq::load_config(path);
    *out = c.release();
  });
}

void floq_config_free(floq_config* cfg) { delete cfg; }

floq_status floq_config_set(floq_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    need(cfg != nullptr && key != nullptr && value != nullptr, "config, key and value must not be NULL");
    floq::set_config_value(cfg->cfg, key, value);
  });
}

const char* floq_config_get(floq_config* cfg, const char* key) {
  if (cfg == nullptr || key == nullptr) return nullptr;
  const floq_status s = guarded([&] { cfg->scratch = floq::get_config_value(cfg->cfg, key); });
  return s == FLOQ_OK ? cfg->scratch.c_str() : nullptr;
}

const char* floq_config_serialize(floq_config* cfg) {
  if (cfg == nullptr) return nullptr;
  cfg->scratch = floq::serialize_config(cfg->cfg);
  return cfg->scratch.c_str();
}

floq_status floq_config_validate(const floq_config* cfg) {
  return guarded([&] {
    need(cfg != nullptr, "config must not be NULL");
    cfg->cfg.validate();
  });
}

floq_status floq_run_command(floq_config* cfg, const char* command, const char* options_json,
                             const char** summary_json) {
  return guarded([&] {
    need(cfg != nullptr && command != nullptr, "config and command must not be NULL");
    floq::CommandOptions opt;
    if (options_json != nullptr && *options_json != '\0') {
      floq::json j;
      try {
        j = floq::json::parse(options_json);
      } catch (const std::exception& e) {
        throw floq::Error(floq::ErrorCode::Validation, std::string("options are not valid JSON: ") + e.what());
      }
      need(j.is_object(), "options must be a JSON object");
      if (j.contains("a2_scan")) opt.a2_scan = j["a2_scan"].get<std::string>();
    }
    const floq::CommandResult r = floq::run_command(command, cfg->cfg, opt);
    floq::json s = r.summary;
    s["directory"] = r.directory.string();
    s["files"] = r.files;
    cfg->summary = s.dump();
    if (summary_json) *summary_json = cfg->summary.c_str();
  });
}

}  // extern "C"
