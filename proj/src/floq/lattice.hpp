#pragma once

#include <vector>

#include "floq/linalg.hpp"
#include "floq/trajectory.hpp"

namespace floq {

/// The two static decompositions of a step drive and their basis overlap.
struct PiecewiseHamiltonian {
  SpectralDecomposition first;   // A = a1 on (nT, nT+tau]
  SpectralDecomposition second;  // A = a2 on (nT+tau, (n+1)T]
  Eigen::MatrixXd overlap;       // first.vectors^T * second.vectors
  bool constant = false;         // a1 == a2, one decomposition suffices

  /// energy_shift moves every level of segment s by shift(A_s); used for the lab frame.
  static PiecewiseHamiltonian build(const ChainSpec& chain, const StepDrive& drive, bool lab_frame = false);
};

struct LatticeOptions {
  int samples_per_period = 50;
  bool store_sites = false;
  double rk_tolerance = 1e-11;  // local error target for the non-step fallback
};

struct LatticeResult {
  Trajectory trajectory;
  std::vector<Eigen::VectorXcd> sites;  // full amplitudes per sample when store_sites
  std::vector<double> norm;             // sum_j |c_j|^2 per sample
};

/// Exact piecewise propagation of the (L+1)-site amplitudes starting from site 0.
/// Harmonic drives fall back to adaptive RK4 with step doubling (fourth order,
/// local error controlled to rk_tolerance); the trajectory then carries solver
/// "lattice-rk4" and a NonStepDrive warning.
LatticeResult propagate_lattice(const ChainSpec& chain, const DriveProtocol& drive, double horizon,
                                const LatticeOptions& options = {});

/// Same propagation sampled at arbitrary ascending times.
LatticeResult propagate_lattice_at(const ChainSpec& chain, const DriveProtocol& drive,
                                   const std::vector<double>& times, bool store_sites = false,
                                   double rk_tolerance = 1e-11);

/// Sample times t_i = i T / samples_per_period up to horizon.
std::vector<double> period_samples(const DriveProtocol& drive, double horizon, int samples_per_period);

}  // namespace floq
