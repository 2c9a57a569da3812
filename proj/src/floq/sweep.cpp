#include "floq/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "floq/errors.hpp"
#include "floq/filtering.hpp"
#include "floq/lattice.hpp"
#include "floq/monodromy.hpp"
#include "floq/steady_state.hpp"
#include "floq/volterra.hpp"

namespace floq {

const char* to_string(SweepAxis a) noexcept {
  switch (a) {
    case SweepAxis::Amplitude: return "a2";
    case SweepAxis::SwitchTime: return "tau";
    case SweepAxis::Period: return "T";
    case SweepAxis::SymmetricAmplitude: return "symmetric_a2";
  }
  return "a2";
}

SweepAxis sweep_axis_from_string(const std::string& text) {
  if (text == "a2" || text == "amplitude") return SweepAxis::Amplitude;
  if (text == "tau" || text == "switch_time") return SweepAxis::SwitchTime;
  if (text == "T" || text == "period") return SweepAxis::Period;
  if (text == "symmetric_a2" || text == "symmetric") return SweepAxis::SymmetricAmplitude;
  throw Error(ErrorCode::PlanInvalid, "unknown sweep axis '" + text + "'");
}

std::vector<double> SweepPlan::values() const {
  std::vector<double> v;
  const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
  for (long i = 0; i <= n; ++i) v.push_back(start + static_cast<double>(i) * step);
  return v;
}

void SweepPlan::validate() const {
  auto need = [](bool ok, const std::string& m) {
    if (!ok) throw Error(ErrorCode::PlanInvalid, m);
  };
  need(std::isfinite(start) && std::isfinite(stop) && std::isfinite(step), "sweep range must be finite");
  need(step > 0.0, "sweep.step must be > 0");
  need(stop >= start, "sweep range is empty (stop < start)");
  need(values().size() <= 100000, "sweep has too many points");
  need(base.is_step(), "sweeps need a step drive");
  need(workers >= 1, "sweep.workers must be >= 1");
  need(horizon > 0.0 && samples_per_period >= 1, "sweep horizon and sampling must be positive");
  need(plateau_t1 > plateau_t0 && plateau_t1 <= horizon + 1e-9, "plateau window must lie inside the horizon");
  try {
    chain.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::PlanInvalid, e.what());
  }
  // Every grid point must describe a valid drive.
  for (double v : values()) {
    try {
      drive_at(*this, v);
    } catch (const Error& e) {
      throw Error(ErrorCode::PlanInvalid, std::string("grid point ") + std::to_string(v) + ": " + e.what());
    }
  }
}

DriveProtocol drive_at(const SweepPlan& plan, double value) {
  StepDrive s = plan.base.step_params();
  switch (plan.axis) {
    case SweepAxis::Amplitude: s.a2 = value; break;
    case SweepAxis::SwitchTime: s.tau = value; break;
    case SweepAxis::Period: s.period = value; break;
    case SweepAxis::SymmetricAmplitude:
      s.a1 = -value;
      s.a2 = value;
      break;
  }
  return DriveProtocol::step(s.a1, s.a2, s.tau, s.period);
}

namespace {

SweepPoint evaluate(const SweepPlan& plan, std::size_t index, double value) {
  SweepPoint pt;
  pt.index = index;
  pt.value = value;
  try {
    const DriveProtocol drive = drive_at(plan, value);
    if (plan.spectrum) {
      const MonodromySolution sol = monodromy_spectrum(plan.chain, drive, plan.tolerances);
      pt.entries = sol.spectrum.entries;
      pt.bound_count = sol.spectrum.bound_count();
      double best_w = -1.0;
      for (const auto& e : sol.spectrum.entries) {
        if (e.cls == ModeClass::Marginal) pt.marginal = true;
        if (e.cls != ModeClass::Band && e.impurity_weight > best_w) {
          best_w = e.impurity_weight;
          pt.gap_distance = e.gap_distance;
          pt.impurity_weight = e.impurity_weight;
        }
      }
      const FbsReport fbs = find_fbs(sol, 64);
      double s = 0.0;
      for (double p : fbs.p_infinity) s += p;
      pt.p_infinity_mean = fbs.p_infinity.empty() ? 0.0 : s / static_cast<double>(fbs.p_infinity.size());
    }
    if (plan.dynamics) {
      LatticeOptions lo;
      lo.samples_per_period = plan.samples_per_period;
      const LatticeResult lr = propagate_lattice(plan.chain, drive, plan.horizon, lo);
      pt.times = lr.trajectory.times;
      pt.p = lr.trajectory.p;
      pt.plateau = window_mean(pt.times, pt.p, plan.plateau_t0, plan.plateau_t1);
    }
    if (plan.filter) {
      const FilterReport fr = filtered_population(plan.chain, drive, {plan.horizon});
      pt.filter_prediction = fr.c0_abs.back() * fr.c0_abs.back();
    }
    pt.ok = true;
  } catch (const std::exception& e) {
    pt.ok = false;
    pt.error = e.what();
  }
  return pt;
}

}  // namespace

SweepSummary summarize(const SweepPlan& plan, const std::vector<SweepPoint>& points) {
  SweepSummary s;
  s.points = points.size();
  for (const auto& p : points) {
    if (!p.ok) {
      ++s.failed;
      continue;
    }
    if (!plan.dynamics || !plan.spectrum) continue;
    if (p.marginal && p.bound_count == 0) {
      ++s.excluded_marginal;
      continue;
    }
    ++s.scored;
    if ((p.bound_count > 0) == (p.plateau > plan.plateau_threshold)) ++s.agree;
  }
  if (s.scored > 0) s.agreement = static_cast<double>(s.agree) / static_cast<double>(s.scored);
  return s;
}

SweepResult run_sweep(const SweepPlan& plan, const std::function<void(std::size_t)>& on_point_done) {
  plan.validate();
  const std::vector<double> grid = plan.values();
  SweepResult res;
  res.plan = plan;
  res.points.resize(grid.size());
  std::atomic<std::size_t> next{0};
  std::mutex done_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= grid.size()) return;
      res.points[i] = evaluate(plan, i, grid[i]);
      if (on_point_done) {
        std::lock_guard<std::mutex> lock(done_mutex);
        on_point_done(i);
      }
    }
  };
  const int n = std::min<int>(plan.workers, static_cast<int>(grid.size()));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  res.summary = summarize(plan, res.points);
  return res;
}

std::vector<ConvergenceRow> convergence_report(const ChainSpec& chain, const DriveProtocol& drive,
                                               const ConvergenceOptions& options) {
  std::vector<ConvergenceRow> rows;

  // h: extrapolated Volterra at h and at h/2.
  {
    VolterraOptions a;
    a.h = default_volterra_step(chain, drive);
    VolterraOptions b = a;
    b.h = 0.5 * a.h;
    const Trajectory ta = solve_volterra(chain, drive, options.volterra_horizon, a);
    const Trajectory tb = solve_volterra(chain, drive, options.volterra_horizon, b);
    double drift = 0.0;
    for (std::size_t i = 0; i < ta.size() && 2 * i < tb.size(); ++i) {
      drift = std::max(drift, std::abs(ta.p[i] - tb.p[2 * i]));
    }
    rows.push_back({"h", a.h, ta.p.back(), drift, 1e-6, drift < 1e-6});
  }

  // K: in-gap quasienergy (or the whole zone when there is no in-gap mode) at K and K+4.
  if (drive.is_step()) {
    SambeOptions so = options.sambe;
    const QuasienergySpectrum s1 = solve_sambe(chain, drive, so);
    SambeOptions so2 = so;
    so2.policy.K0 = s1.K + 4;
    so2.policy.K_max = s1.K + 4;
    so2.eigenvectors = false;
    const QuasienergySpectrum s2 = solve_sambe(chain, drive, so2);
    const int b = s1.strongest_bound();
    double drift = 0.0, value = 0.0;
    if (b >= 0) {
      value = s1.entries[static_cast<std::size_t>(b)].quasienergy;
      double best = std::numeric_limits<double>::infinity();
      for (const auto& e : s2.entries) best = std::min(best, circular_distance(e.quasienergy, value, s1.omega));
      drift = best;
    } else {
      drift = spectrum_distance(quasienergies(s1), quasienergies(s2), s1.omega);
    }
    rows.push_back({"K", static_cast<double>(s1.K), value, drift, 1e-8, drift < 1e-8});
  }

  // L: plateau at L/2 versus L.
  {
    LatticeOptions lo;
    lo.samples_per_period = options.samples_per_period;
    ChainSpec half = chain;
    half.L = std::max(2, chain.L / 2);
    const Trajectory full = propagate_lattice(chain, drive, options.plateau_t1, lo).trajectory;
    const Trajectory small = propagate_lattice(half, drive, options.plateau_t1, lo).trajectory;
    const double pf = window_mean(full.times, full.p, options.plateau_t0, options.plateau_t1);
    const double ps = window_mean(small.times, small.p, options.plateau_t0, options.plateau_t1);
    rows.push_back({"L", static_cast<double>(chain.L), pf, std::abs(pf - ps), 1e-3, std::abs(pf - ps) < 1e-3});
  }
  return rows;
}

}  // namespace floq
