#pragma once

#include "floq/trajectory.hpp"

namespace floq {

struct VolterraOptions {
  double h = 0.0;       // 0 selects a commensurate default
  int refinements = 1;  // step halvings combined by Richardson extrapolation
  KernelProvenance provenance = KernelProvenance::DiscreteSum;
};

/// Default step: 0.05 / max(|a1|, |a2|, 2J), adjusted to land on the switch times.
double default_volterra_step(const ChainSpec& chain, const DriveProtocol& drive);

/// Largest step <= target that divides both tau and T - tau.
double commensurate_step(const DriveProtocol& drive, double target);

/// Throws StepNotCommensurate unless tau/h and (T - tau)/h are integers.
void check_commensurate(const DriveProtocol& drive, double h);

/// Integrates dc/dt + i[lambda + A(t)] c + int_0^t f(t-s) c(s) ds = 0, c(0) = 1, on the
/// uniform grid t_i = i h. Second-order scheme: trapezoid memory sum, exact local
/// phase for the drive, linear implicit update (no predictor iterations needed).
Trajectory solve_volterra(const ChainSpec& chain, const DriveProtocol& drive, double horizon,
                          const VolterraOptions& options = {});

/// A single pass at fixed h without extrapolation (c0' frame).
std::vector<cplx> volterra_pass(const ChainSpec& chain, const DriveProtocol& drive, std::size_t steps, double h,
                                KernelProvenance provenance);

}  // namespace floq
