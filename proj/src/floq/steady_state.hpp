#pragma once

#include <vector>

#include "floq/monodromy.hpp"
#include "floq/trajectory.hpp"

namespace floq {

struct FbsReport {
  bool found = false;
  int mode_index = -1;
  double quasienergy = 0.0;
  double impurity_weight = 0.0;
  cplx x = 0.0;                       // <u(0)|Psi(0)> = conj(u_0(0))
  std::vector<double> times;          // one period, [0, T)
  std::vector<double> p_infinity;     // |x|^2 |u_0(t)|^2
  std::vector<cplx> u0_series;        // u_0(t)
  std::vector<Eigen::Matrix2cd> rho_fbs;  // diag(|u_0|^2, 1 - |u_0|^2)
  std::vector<cplx> mu;               // exp(i int_0^t [lambda + A + 2 eps_lab] / 2)
};

/// P_inf(t) over one period for a Bound mode. Throws NotBound otherwise.
FbsReport fbs_steady_state(const MonodromySolution& sol, int mode_index, int samples = 128);

/// Report for the strongest Bound mode, or found = false with P_inf = 0 when there is none.
FbsReport find_fbs(const MonodromySolution& sol, int samples = 128);

/// Asymptotic fidelity at absolute times t:
/// |a|^4 |x|^2 |u0(t)|^2 + |b|^2 (1 - |a|^2 |x|^2 |u0(t)|^2) + 2 |a|^2 |b|^2 Re(x e^{-i eps t} u0(t)).
std::vector<double> asymptotic_fidelity(const MonodromySolution& sol, int mode_index, const SuperpositionState& state,
                                        const std::vector<double>& times);

/// P_inf at absolute times (periodic continuation).
std::vector<double> p_infinity_at(const MonodromySolution& sol, int mode_index, const std::vector<double>& times);

/// Normalized site populations |u_j(t)|^2 at intra-period time t.
std::vector<double> mode_profile(const MonodromySolution& sol, int mode_index, double t);

}  // namespace floq
