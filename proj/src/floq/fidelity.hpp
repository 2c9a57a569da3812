#pragma once

#include <vector>

#include "floq/trajectory.hpp"

namespace floq {

/// F_t = | |a|^2 c0(t) e^{-i Phi/2} + |b|^2 |^2 + |ab|^2 (1 - |c0(t)|^2) for a lab-frame c0.
/// In the c0_prime frame the phase factor is already absorbed. Throws
/// MissingPhaseConvention when the trajectory has no frame tag.
std::vector<double> fidelity_series(const Trajectory& traj, const DriveProtocol& drive, const ChainSpec& chain,
                                    const SuperpositionState& state);

struct SuperpositionResult {
  std::vector<double> times;
  std::vector<double> fidelity;
  std::vector<Eigen::Matrix2cd> rho;  // reduced state in the (up, down) basis
};

/// Evolves the vacuum amplitude and the single-excitation sector in the lab frame,
/// traces out the chain and returns <phi| rho_S(t) |phi>.
SuperpositionResult superposition_direct(const ChainSpec& chain, const DriveProtocol& drive,
                                         const SuperpositionState& state, const std::vector<double>& times);

}  // namespace floq
