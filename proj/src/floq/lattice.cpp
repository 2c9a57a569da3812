#include "floq/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "floq/errors.hpp"

namespace floq {

PiecewiseHamiltonian PiecewiseHamiltonian::build(const ChainSpec& chain, const StepDrive& drive, bool lab_frame) {
  PiecewiseHamiltonian ph;
  auto segment = [&](double a) {
    SpectralDecomposition d = decompose(build_effective_hamiltonian(chain, a));
    if (lab_frame) d.energies.array() -= 0.5 * (chain.lambda + a);
    return d;
  };
  ph.first = segment(drive.a1);
  ph.constant = drive.a1 == drive.a2;
  if (ph.constant) {
    ph.second = ph.first;
    ph.overlap = Eigen::MatrixXd::Identity(chain.sites(), chain.sites());
  } else {
    ph.second = segment(drive.a2);
    ph.overlap = ph.first.vectors.transpose() * ph.second.vectors;
  }
  return ph;
}

std::vector<double> period_samples(const DriveProtocol& drive, double horizon, int samples_per_period) {
  require(samples_per_period >= 1, "solver.samples_per_period must be >= 1");
  require(std::isfinite(horizon) && horizon > 0.0, "horizon must be > 0");
  const double dt = drive.period() / samples_per_period;
  const auto n = static_cast<std::size_t>(std::floor(horizon / dt + 1e-9));
  std::vector<double> t(n + 1);
  for (std::size_t i = 0; i <= n; ++i) t[i] = static_cast<double>(i) * dt;
  return t;
}

namespace {

void record(LatticeResult& out, double t, const Eigen::VectorXcd& c, bool store) {
  out.trajectory.push(t, c(0));
  out.norm.push_back(c.squaredNorm());
  if (store) out.sites.push_back(c);
}

LatticeResult propagate_step(const ChainSpec& chain, const DriveProtocol& drive, const std::vector<double>& times,
                             bool store_sites) {
  const auto& sd = drive.step_params();
  const PiecewiseHamiltonian ph = PiecewiseHamiltonian::build(chain, sd);
  const int n = chain.sites();
  const double T = sd.period;

  LatticeResult out;
  out.trajectory.solver = "lattice";
  // Coefficients in the eigenbasis of the current segment, valid at seg_start.
  Eigen::VectorXcd a = ph.first.vectors.row(0).transpose().cast<cplx>();
  int seg = 0;  // 0: first part, 1: second part
  double seg_start = 0.0;
  double seg_end = ph.constant ? std::numeric_limits<double>::infinity() : sd.tau;
  std::size_t period_index = 0;

  Eigen::VectorXcd phased(n);
  for (double t : times) {
    require(t >= seg_start - 1e-12, "sample times must be ascending");
    while (t > seg_end + 1e-12 * std::max(1.0, seg_end)) {
      const SpectralDecomposition& d = seg == 0 ? ph.first : ph.second;
      const double dt = seg_end - seg_start;
      for (int k = 0; k < n; ++k) a(k) *= std::polar(1.0, -d.energies(k) * dt);
      if (seg == 0) {
        a = ph.overlap.transpose() * a;
        seg = 1;
        seg_start = seg_end;
        seg_end = static_cast<double>(period_index + 1) * T;
      } else {
        a = ph.overlap * a;
        seg = 0;
        ++period_index;
        seg_start = seg_end;
        seg_end = static_cast<double>(period_index) * T + sd.tau;
      }
    }
    const SpectralDecomposition& d = seg == 0 ? ph.first : ph.second;
    const double dt = t - seg_start;
    for (int k = 0; k < n; ++k) phased(k) = a(k) * std::polar(1.0, -d.energies(k) * dt);
    if (store_sites) {
      const Eigen::VectorXcd c = d.vectors * phased;
      record(out, t, c, true);
    } else {
      const cplx c0 = (d.vectors.row(0).cast<cplx>() * phased).value();
      out.trajectory.push(t, c0);
      out.norm.push_back(phased.squaredNorm());
    }
  }
  return out;
}

LatticeResult propagate_rk4(const ChainSpec& chain, const DriveProtocol& drive, const std::vector<double>& times,
                            bool store_sites, double tol) {
  const int n = chain.sites();
  LatticeResult out;
  out.trajectory.solver = "lattice-rk4";
  out.trajectory.warnings.push_back("NonStepDrive: adaptive RK4 with step doubling used");

  EffectiveHamiltonian h = build_effective_hamiltonian(chain, 0.0);
  const double base = h.diag(0);
  auto rhs = [&](double t, const Eigen::VectorXcd& c) {
    h.diag(0) = base + drive.value(t);
    return Eigen::VectorXcd(cplx(0.0, -1.0) * h.apply(c));
  };
  auto rk4 = [&](double t, const Eigen::VectorXcd& c, double dt) {
    const Eigen::VectorXcd k1 = rhs(t, c);
    const Eigen::VectorXcd k2 = rhs(t + 0.5 * dt, c + 0.5 * dt * k1);
    const Eigen::VectorXcd k3 = rhs(t + 0.5 * dt, c + 0.5 * dt * k2);
    const Eigen::VectorXcd k4 = rhs(t + dt, c + dt * k3);
    return Eigen::VectorXcd(c + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  };

  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n);
  c(0) = 1.0;
  double t = 0.0;
  const double scale = std::max({drive.max_abs(), 2.0 * chain.J, chain.g, 1.0});
  double dt = 0.05 / scale;
  for (double target : times) {
    require(target >= t - 1e-12, "sample times must be ascending");
    while (t < target - 1e-14) {
      const double step = std::min(dt, target - t);
      const Eigen::VectorXcd full = rk4(t, c, step);
      const Eigen::VectorXcd half = rk4(t + 0.5 * step, rk4(t, c, 0.5 * step), 0.5 * step);
      const double err = (half - full).norm() / 15.0;
      if (err <= tol || step < 1e-10) {
        c = half + (half - full) / 15.0;
        t += step;
      }
      const double ratio = err > 0.0 ? std::pow(tol / err, 0.2) : 2.0;
      dt = step * std::clamp(0.9 * ratio, 0.2, 2.0);
    }
    record(out, target, c, store_sites);
  }
  return out;
}

}  // namespace

LatticeResult propagate_lattice_at(const ChainSpec& chain, const DriveProtocol& drive,
                                   const std::vector<double>& times, bool store_sites, double rk_tolerance) {
  chain.validate();
  drive.validate();
  LatticeResult out = drive.is_step() ? propagate_step(chain, drive, times, store_sites)
                                      : propagate_rk4(chain, drive, times, store_sites, rk_tolerance);
  out.trajectory.chain = chain;
  out.trajectory.drive = drive;
  double drift = 0.0;
  for (double nrm : out.norm) drift = std::max(drift, std::abs(nrm - 1.0));
  out.trajectory.diagnostics["max_norm_drift"] = drift;
  return out;
}

LatticeResult propagate_lattice(const ChainSpec& chain, const DriveProtocol& drive, double horizon,
                                const LatticeOptions& options) {
  LatticeResult out = propagate_lattice_at(chain, drive, period_samples(drive, horizon, options.samples_per_period),
                                           options.store_sites, options.rk_tolerance);
  out.trajectory.h = drive.period() / options.samples_per_period;
  out.trajectory.diagnostics["samples_per_period"] = options.samples_per_period;
  return out;
}

}  // namespace floq
