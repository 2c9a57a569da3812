// Acceptance checks at the published parameters. One line per criterion:
//   PASS|FAIL criterion <n> <name>: <measurements>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "floq/fidelity.hpp"
#include "floq/filtering.hpp"
#include "floq/lattice.hpp"
#include "floq/monodromy.hpp"
#include "floq/sambe.hpp"
#include "floq/steady_state.hpp"
#include "floq/sweep.hpp"
#include "floq/volterra.hpp"

using namespace floq;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ChainSpec paper_chain(int L = 800) {
  ChainSpec c;
  c.L = L;
  c.J = 1.0;
  c.g = 1.0;
  c.lambda = 20.0;
  c.kernel_mode = KernelMode::OpenChainExact;
  return c;
}

DriveProtocol fig1_drive(double a2) { return DriveProtocol::step(0.0, a2, 0.1 * pi, 0.25 * pi); }
DriveProtocol fig2_drive(double a2) { return DriveProtocol::step(0.0, a2, 0.02 * pi, 0.05 * pi); }
DriveProtocol cdt_drive(double a2) { return DriveProtocol::step(-a2, a2, 0.2 * pi, 0.4 * pi); }

std::vector<double> window(const std::vector<double>& t, const std::vector<double>& v, double t0, double t1,
                           std::vector<double>* times = nullptr) {
  std::vector<double> out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] >= t0 - 1e-12 && t[i] <= t1 + 1e-12) {
      out.push_back(v[i]);
      if (times) times->push_back(t[i]);
    }
  }
  return out;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

Outcome criterion1() {
  Outcome o{true, ""};
  for (double a2 : {0.0, 1.5, 36.0}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto d = fig1_drive(a2);
    const Trajectory v = solve_volterra(paper_chain(), d, 20.0);
    const Trajectory l = propagate_lattice_at(paper_chain(), d, v.times).trajectory;
    double worst = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) worst = std::max(worst, std::abs(v.p[i] - l.p[i]));
    const double secs = seconds_since(t0);
    o.pass = o.pass && worst < 1e-6 && secs < 60.0;
    o.detail += "a2=" + fmt("%g", a2) + " max|dP|=" + fmt("%.2e", worst) + " (" + fmt("%.1f", secs) + " s); ";
  }
  return o;
}

Outcome criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  const ChainSpec c = paper_chain(200);
  const auto d = fig1_drive(3.5);
  const auto s = solve_sambe(c, d);
  const auto m = monodromy_spectrum(c, d);
  const double dist = spectrum_distance(quasienergies(s), quasienergies(m.spectrum), d.omega());
  const double secs = seconds_since(t0);
  return {s.convergence.converged && dist < 1e-8 && secs < 300.0,
          "K=" + std::to_string(s.K) + " max pairwise distance=" + fmt("%.2e", dist) + " J (" + fmt("%.1f", secs) +
              " s)"};
}

Outcome criterion3() {
  const ChainSpec c = paper_chain();
  const auto hi = fig2_drive(36.0);
  const auto sol = monodromy_spectrum(c, hi);
  const int bound = sol.spectrum.bound_count();
  const auto fbs = find_fbs(sol, 128);
  const Trajectory exact = propagate_lattice(c, hi, 100.0).trajectory;
  std::vector<double> tw;
  const auto pw = window(exact.times, exact.p, 80.0, 100.0, &tw);
  const double avg_exact = mean(pw);
  const double avg_pinf = fbs.found ? mean(p_infinity_at(sol, fbs.mode_index, tw)) : 0.0;

  const auto lo = fig2_drive(1.5);
  const int bound_lo = monodromy_spectrum(c, lo).spectrum.bound_count();
  const double p100 = propagate_lattice(c, lo, 100.0).trajectory.p.back();
  const bool pass = bound == 1 && std::abs(avg_exact - avg_pinf) < 1e-2 && bound_lo == 0 && p100 < 0.02;
  return {pass, "a2=36: bound=" + std::to_string(bound) + " <P>=" + fmt("%.5f", avg_exact) +
                    " <P_inf>=" + fmt("%.5f", avg_pinf) + "; a2=1.5: bound=" + std::to_string(bound_lo) +
                    " P(100)=" + fmt("%.2e", p100)};
}

Outcome criterion4() {
  const ChainSpec c = paper_chain();
  SweepPlan plan;
  plan.axis = SweepAxis::Period;
  plan.chain = c;
  plan.base = fig1_drive(3.5);
  plan.start = 0.9;
  plan.stop = 2.52;
  plan.step = 0.09;
  int violations = 0, excluded = 0, bound_above = 0, checked = 0;
  for (double T : plan.values()) {
    const auto d = drive_at(plan, T);
    const auto s = monodromy_spectrum(c, d).spectrum;
    const double w = d.omega();
    bool marginal = false;
    for (const auto& e : s.entries) marginal = marginal || e.cls == ModeClass::Marginal;
    if (marginal || std::abs(w - 4.0 * c.J) < 2.0 * s.gap_tol) {
      ++excluded;
      continue;
    }
    ++checked;
    if (s.bound_count() > 0 && w <= 4.0 * c.J) ++violations;
    if (s.bound_count() > 0 && w > 4.0 * c.J) ++bound_above;
  }
  return {violations == 0 && bound_above > 0,
          std::to_string(checked) + " periods checked, " + std::to_string(excluded) + " excluded, " +
              std::to_string(violations) + " bound modes with 2pi/T <= 4J, " + std::to_string(bound_above) +
              " periods with bound modes above threshold"};
}

Outcome criterion5() {
  const ChainSpec c = paper_chain();
  const SuperpositionState st;
  const auto lo = fig2_drive(1.5);
  const Trajectory tl = propagate_lattice(c, lo, 100.0).trajectory;
  const auto fl = fidelity_series(tl, lo, c, st);
  double peak = 0.0;
  for (double f : window(tl.times, fl, 80.0, 100.0)) peak = std::max(peak, f);
  const auto direct = superposition_direct(c, lo, st, tl.times);
  double b2 = 0.0;
  for (std::size_t i = 0; i < fl.size(); ++i) b2 = std::max(b2, std::abs(fl[i] - direct.fidelity[i]));

  const auto hi = fig2_drive(36.0);
  const Trajectory th = propagate_lattice(c, hi, 100.0).trajectory;
  const auto fh = fidelity_series(th, hi, c, st);
  std::vector<double> tw;
  const auto fw = window(th.times, fh, 80.0, 100.0, &tw);
  const auto sol = monodromy_spectrum(c, hi);
  const int b = sol.spectrum.strongest_bound();
  double finf_dev = 1.0;
  if (b >= 0) {
    const auto finf = asymptotic_fidelity(sol, b, st, tw);
    finf_dev = 0.0;
    for (std::size_t i = 0; i < tw.size(); ++i) finf_dev = std::max(finf_dev, std::abs(finf[i] - fw[i]));
  }
  const bool pass = std::abs(peak - 0.5) <= 0.02 && b2 < 1e-10 && finf_dev < 1e-2;
  return {pass, "no-FBS peak plateau=" + fmt("%.4f", peak) + "; identity vs direct=" + fmt("%.2e", b2) +
                    "; with FBS max|F_inf - F|=" + fmt("%.2e", finf_dev)};
}

Outcome criterion6() {
  const double T = 0.4 * pi;
  const auto roots = find_f0_zeros(T, 0.5 * T, 5.0, 35.0);
  bool roots_ok = roots.size() == 3;
  std::string r;
  const double expected[] = {10.0, 20.0, 30.0};
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (i < 3) roots_ok = roots_ok && std::abs(roots[i].a2 - expected[i]) < 1e-6;
    r += fmt("%.9f ", roots[i].a2);
  }
  const ChainSpec c = paper_chain();
  const double p_on = propagate_lattice(c, cdt_drive(10.0), 50.0).trajectory.p.back();
  const double p_off = propagate_lattice(c, cdt_drive(10.5), 50.0).trajectory.p.back();
  return {roots_ok && p_on > 0.9 && p_off < 0.5,
          "roots " + r + "; P(50) at 10J=" + fmt("%.4f", p_on) + " (> 0.9), at 10.5J=" + fmt("%.4f", p_off) +
              " (< 0.5)"};
}

Outcome criterion7() {
  const ChainSpec c = paper_chain();
  const auto d = fig1_drive(3.2);
  const auto rep = filtered_population(c, d, {100.0});
  const double filtered = rep.c0_abs.back() * rep.c0_abs.back();
  const Trajectory exact = propagate_lattice(c, d, 100.0).trajectory;
  const double plateau = window_mean(exact.times, exact.p, 80.0, 100.0);
  const int bound = monodromy_spectrum(c, d).spectrum.bound_count();
  return {filtered < 0.05 && plateau > 10.0 * 0.05 && plateau > 10.0 * filtered && bound == 1,
          "filtered |c0(100)|^2=" + fmt("%.2e", filtered) + " exact plateau=" + fmt("%.4f", plateau) +
              " bound=" + std::to_string(bound)};
}

Outcome criterion8() {
  const ChainSpec c = paper_chain();
  const auto d = fig1_drive(3.2);
  const auto sol = monodromy_spectrum(c, d);
  const int b = sol.spectrum.strongest_bound();
  if (b < 0) return {false, "no bound mode"};
  const auto prof = mode_profile(sol, b, 0.25 * d.period());
  double near = 0.0;
  for (std::size_t j = 0; j <= 20 && j < prof.size(); ++j) near += prof[j];
  return {near > 0.9, "population on j <= 20 at t=T/4: " + fmt("%.6f", near)};
}

Outcome criterion9() {
  const auto t0 = std::chrono::steady_clock::now();
  SweepPlan plan;
  plan.axis = SweepAxis::Amplitude;
  plan.chain = paper_chain();
  plan.base = fig1_drive(0.0);
  plan.start = 0.0;
  plan.stop = 40.0;
  plan.step = 0.5;
  plan.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const auto res = run_sweep(plan);
  const auto& s = res.summary;
  const double secs = seconds_since(t0);
  return {s.failed == 0 && s.scored > 0 && s.agreement >= 0.95 && secs < 7200.0,
          std::to_string(s.agree) + "/" + std::to_string(s.scored) + " agree (" + fmt("%.1f", 100.0 * s.agreement) +
              "%), " + std::to_string(s.excluded_marginal) + " marginal excluded, " + std::to_string(s.failed) +
              " failed (" + fmt("%.0f", secs) + " s)"};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {"oracle equivalence (dynamics)", criterion1},
      {"oracle equivalence (spectrum)", criterion2},
      {"strong/weak fast drive", criterion3},
      {"high-frequency criterion", criterion4},
      {"fidelity", criterion5},
      {"F0 zeros and sensitivity", criterion6},
      {"filtering breakdown", criterion7},
      {"bound-state localization", criterion8},
      {"sweep correlation", criterion9},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      selected.push_back(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]...\n", argv[0]);
      return 2;
    }
  }
  if (selected.empty()) {
    for (int i = 1; i <= static_cast<int>(all.size()); ++i) selected.push_back(i);
  }
  int failed = 0;
  for (int n : selected) {
    if (n < 1 || n > static_cast<int>(all.size())) {
      std::fprintf(stderr, "no criterion %d\n", n);
      return 2;
    }
    Outcome o;
    try {
      o = all[static_cast<std::size_t>(n - 1)].run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("%s criterion %d %s: %s\n", o.pass ? "PASS" : "FAIL", n, all[static_cast<std::size_t>(n - 1)].name,
                o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
