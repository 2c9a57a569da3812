#pragma once

#include <vector>

#include "floq/lattice.hpp"
#include "floq/spectrum.hpp"

namespace floq {

/// One Floquet eigenstate. harmonics is (L+1) x (2K+1) with column k + K.
struct FloquetMode {
  double quasienergy = 0.0;
  int K = 0;
  Eigen::MatrixXcd harmonics;
  std::vector<double> period_times;
  std::vector<Eigen::VectorXcd> period_series;
  cplx overlap_x = 0.0;  // <u(0)|Psi(0)> for Psi(0) = site 0
};

/// Exact one-period propagator route for step drives.
class MonodromySolution {
 public:
  ChainSpec chain;
  DriveProtocol drive;
  PiecewiseHamiltonian pieces;
  QuasienergySpectrum spectrum;   // entries and u0 in matching order
  Eigen::VectorXcd multipliers;   // eigenvalues mu of U(T)
  double max_unitarity_defect = 0.0;
  double max_residual = 0.0;

  int size() const { return static_cast<int>(spectrum.entries.size()); }
  /// u_alpha(t) = exp(i eps t) U(t) u_alpha(0) for t in [0, T].
  Eigen::VectorXcd state_at(int alpha, double t) const;
  /// Site-0 component of u_alpha(t), O(L) per call after the first.
  cplx impurity_at(int alpha, double t) const;
  /// Harmonics by DFT of `samples` points over one period, truncated to |k| <= K.
  FloquetMode mode(int alpha, int K = 16, int samples = 64) const;

 private:
  struct ImpurityCache {
    Eigen::VectorXcd first;   // V1^T u(0) scaled by the V1 row 0 entries
    Eigen::VectorXcd second;  // V2^T U(tau) u(0) scaled by the V2 row 0 entries
  };
  mutable std::vector<ImpurityCache> cache_;
  const ImpurityCache& cache(int alpha) const;
};

/// Quasienergies eps = -arg(mu) / T folded into (-omega/2, omega/2], modes u(0), and
/// the dual-criterion classification. Throws NonStepDrive for harmonic drives.
MonodromySolution monodromy_spectrum(const ChainSpec& chain, const DriveProtocol& drive,
                                     const ClassifyTolerances& tol = {});

}  // namespace floq
