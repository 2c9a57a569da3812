#include "floq/fidelity.hpp"

#include <algorithm>
#include <cmath>

#include "floq/errors.hpp"
#include "floq/lattice.hpp"

namespace floq {

void SuperpositionState::validate() const {
  const double n = std::norm(alpha) + std::norm(beta);
  require(std::abs(n - 1.0) <= 1e-12, "state must satisfy |alpha|^2 + |beta|^2 = 1 (got " + std::to_string(n) + ")");
}

double window_mean(const std::vector<double>& times, const std::vector<double>& values, double t0, double t1) {
  double s = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] >= t0 - 1e-12 && times[i] <= t1 + 1e-12) {
      s += values[i];
      ++n;
    }
  }
  require(n > 0, "averaging window [" + std::to_string(t0) + ", " + std::to_string(t1) + "] holds no samples");
  return s / static_cast<double>(n);
}

double interpolate(const std::vector<double>& times, const std::vector<double>& values, double t) {
  require(!times.empty(), "empty series");
  if (t <= times.front()) return values.front();
  if (t >= times.back()) return values.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - times.begin());
  const double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
  return (1.0 - w) * values[i - 1] + w * values[i];
}

std::vector<double> fidelity_series(const Trajectory& traj, const DriveProtocol& drive, const ChainSpec& chain,
                                    const SuperpositionState& state) {
  state.validate();
  if (traj.frame != frame_c0_prime && traj.frame != frame_lab) {
    throw Error(ErrorCode::MissingPhaseConvention, "trajectory has no recognised phase frame tag");
  }
  const double a2 = std::norm(state.alpha);
  const double b2 = std::norm(state.beta);
  std::vector<double> f(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    cplx c = traj.c0[i];
    if (traj.frame == frame_lab) {
      const double t = traj.times[i];
      c *= std::polar(1.0, -0.5 * (chain.lambda * t + drive.phase(t)));
    }
    f[i] = std::norm(a2 * c + b2) + a2 * b2 * (1.0 - std::norm(c));
  }
  return f;
}

SuperpositionResult superposition_direct(const ChainSpec& chain, const DriveProtocol& drive,
                                         const SuperpositionState& state, const std::vector<double>& times) {
  state.validate();
  chain.validate();
  const auto& sd = drive.step_params();
  const PiecewiseHamiltonian ph = PiecewiseHamiltonian::build(chain, sd, true);
  const int n = chain.sites();
  const double T = sd.period;

  SuperpositionResult out;
  out.times = times;
  // Sector amplitudes (scaled by alpha) in the eigenbasis of the current segment.
  Eigen::VectorXcd a = state.alpha * ph.first.vectors.row(0).transpose().cast<cplx>();
  cplx vac = state.beta;
  int seg = 0;
  double seg_start = 0.0;
  double seg_end = sd.tau;
  std::size_t period_index = 0;
  auto vac_energy = [&](int s) { return -0.5 * (chain.lambda + (s == 0 ? sd.a1 : sd.a2)); };

  Eigen::VectorXcd phased(n);
  for (double t : times) {
    require(t >= seg_start - 1e-12, "sample times must be ascending");
    while (t > seg_end + 1e-12 * std::max(1.0, seg_end)) {
      const SpectralDecomposition& d = seg == 0 ? ph.first : ph.second;
      const double dt = seg_end - seg_start;
      for (int k = 0; k < n; ++k) a(k) *= std::polar(1.0, -d.energies(k) * dt);
      vac *= std::polar(1.0, -vac_energy(seg) * dt);
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
    const cplx v = vac * std::polar(1.0, -vac_energy(seg) * dt);
    const cplx c0 = (d.vectors.row(0).cast<cplx>() * phased).value();
    const double sector = phased.squaredNorm();

    Eigen::Matrix2cd rho;
    rho(0, 0) = std::norm(c0);
    rho(1, 1) = std::norm(v) + sector - std::norm(c0);
    rho(0, 1) = c0 * std::conj(v);
    rho(1, 0) = std::conj(rho(0, 1));
    const Eigen::Vector2cd phi(state.alpha, state.beta);
    out.fidelity.push_back((phi.adjoint() * rho * phi).value().real());
    out.rho.push_back(rho);
  }
  return out;
}

}  // namespace floq
