#pragma once

#include <vector>

#include "floq/spectrum.hpp"

namespace floq {

enum class SambeFrame { Unrotated, Rotated };

const char* to_string(SambeFrame f) noexcept;
SambeFrame sambe_frame_from_string(const std::string& text);

/// Dense Sambe matrix in the lab frame: blocks H_eff(0) delta_{lk} + l omega delta_{lk}
/// + omega_{l-k} |0><0|. Index (l, j) -> (l + K)(L + 1) + j.
Eigen::MatrixXcd sambe_matrix(const ChainSpec& chain, const DriveProtocol& drive, int K);

/// Dense Sambe matrix in the frame rotating with theta(t) on the impurity: site 0 sits
/// at lambda + Abar and the impurity-chain bond carries g F_{l-k}.
Eigen::MatrixXcd sambe_matrix_rotated(const ChainSpec& chain, const DriveProtocol& drive, int K);

/// Structured form: a few dense sites per harmonic coupled to a static tridiagonal tail.
/// For the ring the chain is first reduced to its mirror-symmetric part; the
/// antisymmetric combinations never touch the impurity and are kept as dark levels.
struct SambeOperator {
  int K = 0;
  double omega = 0.0;
  int nd = 1;                  // dense sites per harmonic
  Eigen::MatrixXcd dense;      // nd (2K+1) square, index (l + K) nd + d, includes l omega
  Eigen::VectorXd tail_diag;   // static tail, harmonic l adds l omega
  Eigen::VectorXd tail_off;
  double link = 0.0;           // hopping between dense site nd-1 and tail site 0
  std::vector<double> dark;    // decoupled static levels (ring only)
  Eigen::MatrixXd reduced_basis;  // (L+1) x reduced sites; empty for the open chain

  int reduced_sites() const { return nd + static_cast<int>(tail_diag.size()); }
  /// Number of eigenvalues strictly below sigma (Sylvester inertia).
  long count_below(double sigma) const;
  /// Solve (M - sigma) x = b for a vector laid out as [harmonic][reduced site].
  Eigen::VectorXcd solve_shifted(double sigma, const Eigen::VectorXcd& b) const;
};

SambeOperator build_sambe_operator(const ChainSpec& chain, const DriveProtocol& drive, int K, SambeFrame frame);

struct KPolicy {
  int K0 = 8;
  int step = 4;         // K grows by at least this much per round
  double growth = 1.0;  // and by at least this factor
  int K_max = 96;
  double tol = 1e-8;
};

struct SambeOptions {
  KPolicy policy;
  SambeFrame frame = SambeFrame::Rotated;
  bool eigenvectors = true;
  ClassifyTolerances tolerances;
};

/// Eigenvalues of the operator in [lo, hi), ascending, to absolute accuracy tol.
std::vector<double> sambe_eigenvalues(const SambeOperator& op, double lo, double hi, double tol = 1e-12);

/// One Brillouin zone of Sambe eigenvalues (L+1 representatives) folded into (-omega/2, omega/2].
struct SambeZone {
  std::vector<double> raw;     // unfolded eigenvalues inside the chosen window
  std::vector<double> folded;  // same order
  double cut = 0.0;            // window is [cut, cut + omega)
};
SambeZone sambe_zone(const SambeOperator& op, double centre);

/// Converged Sambe spectrum with K-growth; on failure the partial result carries
/// convergence.converged = false and a TruncationNotConverged warning.
QuasienergySpectrum solve_sambe(const ChainSpec& chain, const DriveProtocol& drive, const SambeOptions& options = {});

/// Harmonic components u_j(k), k = -K..K, of the Sambe eigenvector closest to raw eigenvalue e,
/// mapped back to the lab frame and to all L+1 sites. Column k + K.
Eigen::MatrixXcd sambe_mode_harmonics(const SambeOperator& op, const ChainSpec& chain, const DriveProtocol& drive,
                                      SambeFrame frame, double raw_eigenvalue);

}  // namespace floq
