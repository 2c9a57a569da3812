#include "floq/steady_state.hpp"

#include <cmath>

#include "floq/errors.hpp"

namespace floq {

namespace {

void require_bound(const MonodromySolution& sol, int mode_index) {
  require(mode_index >= 0 && mode_index < sol.size(), "mode index out of range");
  if (sol.spectrum.entries[static_cast<std::size_t>(mode_index)].cls != ModeClass::Bound) {
    throw Error(ErrorCode::NotBound, "mode " + std::to_string(mode_index) + " is not classified Bound");
  }
}

}  // namespace

FbsReport fbs_steady_state(const MonodromySolution& sol, int mode_index, int samples) {
  require_bound(sol, mode_index);
  require(samples >= 1, "samples must be >= 1");
  const auto& entry = sol.spectrum.entries[static_cast<std::size_t>(mode_index)];
  const double T = sol.drive.period();
  // Quasienergy in the lab convention, where the vacuum carries -(lambda + A)/2.
  const double eps_lab = entry.quasienergy - 0.5 * (sol.chain.lambda + sol.drive.mean());

  FbsReport r;
  r.found = true;
  r.mode_index = mode_index;
  r.quasienergy = entry.quasienergy;
  r.impurity_weight = entry.impurity_weight;
  r.x = std::conj(sol.spectrum.u0[static_cast<std::size_t>(mode_index)](0));
  for (int s = 0; s < samples; ++s) {
    const double t = T * s / samples;
    const cplx u = sol.impurity_at(mode_index, t);
    const double pu = std::norm(u);
    r.times.push_back(t);
    r.u0_series.push_back(u);
    r.p_infinity.push_back(std::norm(r.x) * pu);
    Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
    rho(0, 0) = pu;
    rho(1, 1) = 1.0 - pu;
    r.rho_fbs.push_back(rho);
    const double phase = 0.5 * (sol.chain.lambda * t + sol.drive.phase(t)) + eps_lab * t;
    r.mu.push_back(std::polar(1.0, phase));
  }
  return r;
}

FbsReport find_fbs(const MonodromySolution& sol, int samples) {
  const int idx = sol.spectrum.strongest_bound();
  if (idx >= 0) return fbs_steady_state(sol, idx, samples);
  FbsReport r;
  const double T = sol.drive.period();
  for (int s = 0; s < samples; ++s) {
    r.times.push_back(T * s / samples);
    r.p_infinity.push_back(0.0);
  }
  return r;
}

std::vector<double> p_infinity_at(const MonodromySolution& sol, int mode_index, const std::vector<double>& times) {
  require_bound(sol, mode_index);
  const double x2 = std::norm(sol.spectrum.u0[static_cast<std::size_t>(mode_index)](0));
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(x2 * std::norm(sol.impurity_at(mode_index, t)));
  return out;
}

std::vector<double> asymptotic_fidelity(const MonodromySolution& sol, int mode_index, const SuperpositionState& state,
                                        const std::vector<double>& times) {
  require_bound(sol, mode_index);
  state.validate();
  const double a2 = std::norm(state.alpha);
  const double b2 = std::norm(state.beta);
  const cplx x = std::conj(sol.spectrum.u0[static_cast<std::size_t>(mode_index)](0));
  const double eps = sol.spectrum.entries[static_cast<std::size_t>(mode_index)].quasienergy;
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) {
    const cplx u = sol.impurity_at(mode_index, t);
    const double pinf = std::norm(x) * std::norm(u);
    const cplx coherence = x * std::polar(1.0, -eps * t) * u;
    out.push_back(a2 * a2 * pinf + b2 * (1.0 - a2 * pinf) + 2.0 * a2 * b2 * coherence.real());
  }
  return out;
}

std::vector<double> mode_profile(const MonodromySolution& sol, int mode_index, double t) {
  const Eigen::VectorXcd u = sol.state_at(mode_index, t);
  const double n = u.squaredNorm();
  std::vector<double> p(static_cast<std::size_t>(u.size()));
  for (Eigen::Index j = 0; j < u.size(); ++j) p[static_cast<std::size_t>(j)] = std::norm(u(j)) / n;
  return p;
}

}  // namespace floq
