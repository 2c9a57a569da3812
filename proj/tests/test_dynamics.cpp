#include <cmath>
#include <random>

#include "doctest.h"

#include "floq/errors.hpp"
#include "floq/fidelity.hpp"
#include "floq/lattice.hpp"
#include "floq/volterra.hpp"

using namespace floq;

namespace {

ChainSpec fig_chain(int L = 800) {
  ChainSpec c;
  c.L = L;
  return c;
}

DriveProtocol fig1_drive(double a2) { return DriveProtocol::step(0.0, a2, 0.1 * pi, 0.25 * pi); }
DriveProtocol fig2_drive(double a2) { return DriveProtocol::step(0.0, a2, 0.02 * pi, 0.05 * pi); }

double max_dp(const Trajectory& a, const Trajectory& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a.p[i] - b.p[i]));
  return worst;
}

}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("closed system keeps the excitation") {
    ChainSpec c = fig_chain(50);
    c.g = 0.0;
    const auto v = solve_volterra(c, fig1_drive(3.0), 5.0);
    for (double p : v.p) CHECK(p == doctest::Approx(1.0).epsilon(1e-12));
    const auto l = propagate_lattice(c, fig1_drive(3.0), 5.0).trajectory;
    for (double p : l.p) CHECK(p == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("undriven decay is monotone until the first dip and stays small after it") {
    const auto l = propagate_lattice(fig_chain(), fig1_drive(0.0), 20.0).trajectory;
    std::size_t i = 1;
    for (; i < l.size() && l.p[i - 1] > 0.01; ++i) CHECK(l.p[i] <= l.p[i - 1] + 1e-12);
    CHECK(i < l.size());
    for (; i < l.size(); ++i) CHECK(l.p[i] < 0.05);
    CHECK(l.p.front() == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("Volterra agrees with the lattice on the same open chain") {
    const ChainSpec c = fig_chain(60);
    for (double a2 : {0.0, 1.5, 8.0}) {
      const auto v = solve_volterra(c, fig1_drive(a2), 10.0);
      const auto l = propagate_lattice_at(c, fig1_drive(a2), v.times).trajectory;
      CHECK(max_dp(v, l) < 1e-6);
      for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(std::abs(v.c0[i]) - std::abs(l.c0[i])) < 1e-6);
    }
  }

  TEST_CASE("plane-wave kernel agrees with the ring lattice") {
    ChainSpec c = fig_chain(60);
    c.kernel_mode = KernelMode::PaperPlaneWave;
    const auto v = solve_volterra(c, fig1_drive(2.0), 10.0);
    const auto l = propagate_lattice_at(c, fig1_drive(2.0), v.times).trajectory;
    CHECK(max_dp(v, l) < 1e-6);
  }

  TEST_CASE("Volterra is second order") {
    const ChainSpec c = fig_chain(60);
    const auto d = fig1_drive(1.5);
    const double h = commensurate_step(d, 0.02);
    auto err = [&](double step) {
      VolterraOptions o;
      o.h = step;
      o.refinements = 0;
      const auto v = solve_volterra(c, d, 8.0, o);
      return max_dp(v, propagate_lattice_at(c, d, v.times).trajectory);
    };
    const double e1 = err(h);
    const double e2 = err(0.5 * h);
    CHECK(e1 / e2 >= 3.5);
  }

  TEST_CASE("step must land on the switch times") {
    VolterraOptions o;
    o.h = 0.0123;
    CHECK_THROWS_WITH_AS(solve_volterra(fig_chain(30), fig1_drive(1.0), 1.0, o), doctest::Contains("tau"), Error);
    try {
      solve_volterra(fig_chain(30), fig1_drive(1.0), 1.0, o);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::StepNotCommensurate);
    }
  }

  TEST_CASE("horizon beyond the recurrence time is flagged") {
    const auto v = solve_volterra(fig_chain(10), fig1_drive(1.0), 8.0);
    bool warned = false;
    for (const auto& w : v.warnings) warned = warned || w.find("HorizonBeyondRecurrence") != std::string::npos;
    CHECK(warned);
  }

  TEST_CASE("continuum kernel matches the L = 800 ring up to t = 100") {
    VolterraOptions o;
    o.provenance = KernelProvenance::ContinuumBessel;
    ChainSpec ring = fig_chain();
    ring.kernel_mode = KernelMode::PaperPlaneWave;
    const auto d = fig1_drive(3.5);
    const auto v = solve_volterra(ring, d, 100.0, o);
    const auto l = propagate_lattice_at(ring, d, v.times).trajectory;
    CHECK(max_dp(v, l) < 1e-3);
  }

  TEST_CASE("lattice conserves the norm") {
    LatticeOptions o;
    o.store_sites = true;
    const auto r = propagate_lattice(fig_chain(200), fig1_drive(3.2), 50.0, o);
    for (double n : r.norm) CHECK(std::abs(n - 1.0) < 1e-10);
    for (const auto& c : r.sites) CHECK(std::abs(c.squaredNorm() - 1.0) < 1e-10);
    for (double p : r.trajectory.p) CHECK(p <= 1.0 + 1e-9);
  }

  TEST_CASE("strong fast drive stabilizes, weak drive decays") {
    const auto hi = propagate_lattice(fig_chain(), fig2_drive(36.0), 100.0).trajectory;
    const auto lo = propagate_lattice(fig_chain(), fig2_drive(1.5), 100.0).trajectory;
    CHECK(window_mean(hi.times, hi.p, 80.0, 100.0) > 0.5);
    CHECK(lo.p.back() < 0.02);
  }

  TEST_CASE("non-step drives use adaptive RK4 and agree with Volterra") {
    const ChainSpec c = fig_chain(60);
    const double T = 0.5;
    const auto d = DriveProtocol::harmonics(T, {{0, cplx(1.0, 0.0)}, {1, cplx(1.5, 0.0)}, {-1, cplx(1.5, 0.0)}});
    const auto v = solve_volterra(c, d, 6.0);
    const auto l = propagate_lattice_at(c, d, v.times).trajectory;
    CHECK(l.solver == "lattice-rk4");
    CHECK_FALSE(l.warnings.empty());
    CHECK(max_dp(v, l) < 1e-5);
  }

  TEST_CASE("fidelity special cases") {
    const ChainSpec c = fig_chain(100);
    const auto d = fig1_drive(3.2);
    const auto traj = propagate_lattice(c, d, 10.0).trajectory;
    const auto down = fidelity_series(traj, d, c, {cplx(0.0), cplx(1.0)});
    for (double f : down) CHECK(f == doctest::Approx(1.0).epsilon(1e-12));
    const auto up = fidelity_series(traj, d, c, {cplx(1.0), cplx(0.0)});
    for (std::size_t i = 0; i < up.size(); ++i) CHECK(up[i] == doctest::Approx(traj.p[i]).epsilon(1e-12));

    const auto direct_down = superposition_direct(c, d, {cplx(0.0), cplx(1.0)}, traj.times);
    for (double f : direct_down.fidelity) CHECK(f == doctest::Approx(1.0).epsilon(1e-12));
    const auto direct_up = superposition_direct(c, d, {cplx(1.0), cplx(0.0)}, traj.times);
    for (std::size_t i = 0; i < up.size(); ++i) CHECK(std::abs(direct_up.fidelity[i] - traj.p[i]) < 1e-10);

    Trajectory untagged = traj;
    untagged.frame.clear();
    CHECK_THROWS_AS(fidelity_series(untagged, d, c, {}), Error);
  }

  TEST_CASE("fidelity identity matches direct two-sector evolution") {
    const ChainSpec c = fig_chain(120);
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n(0.0, 1.0);
    for (double a2 : {1.5, 3.2}) {
      const auto d = fig1_drive(a2);
      const auto traj = propagate_lattice(c, d, 15.0).trajectory;
      cplx a(n(rng), n(rng)), b(n(rng), n(rng));
      const double s = std::sqrt(std::norm(a) + std::norm(b));
      const SuperpositionState st{a / s, b / s};
      const auto f = fidelity_series(traj, d, c, st);
      const auto direct = superposition_direct(c, d, st, traj.times);
      double worst = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) worst = std::max(worst, std::abs(f[i] - direct.fidelity[i]));
      CHECK(worst < 1e-10);
      for (const auto& rho : direct.rho) {
        CHECK(std::abs(rho.trace() - 1.0) < 1e-10);
        CHECK((rho - rho.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
      }
    }
  }

  TEST_CASE("complete decoherence leaves peak fidelity at |beta|^2") {
    const auto d = fig2_drive(1.5);
    const auto traj = propagate_lattice(fig_chain(), d, 100.0).trajectory;
    const auto f = fidelity_series(traj, d, fig_chain(), {});
    double peak = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (traj.times[i] >= 80.0) peak = std::max(peak, f[i]);
    }
    CHECK(peak == doctest::Approx(0.5).epsilon(0.04));
  }

  TEST_CASE("superposition state validation") {
    CHECK_THROWS_AS((SuperpositionState{cplx(1.0), cplx(1.0)}.validate()), Error);
  }
}
