#include "floq/linalg.hpp"

#include <cmath>
#include <vector>

#include <lapacke.h>

#include "floq/errors.hpp"

namespace floq {

SpectralDecomposition decompose(const EffectiveHamiltonian& h) {
  SpectralDecomposition out;
  if (h.tridiagonal()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(h.diag, h.offdiag, Eigen::ComputeEigenvectors);
    require(es.info() == Eigen::Success, "tridiagonal eigensolver failed", ErrorCode::NotConverged);
    out.energies = es.eigenvalues();
    out.vectors = es.eigenvectors();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.dense());
    require(es.info() == Eigen::Success, "dense eigensolver failed", ErrorCode::NotConverged);
    out.energies = es.eigenvalues();
    out.vectors = es.eigenvectors();
  }
  return out;
}

int hermitian_negative_count(Eigen::MatrixXcd& a) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  if (n == 0) return 0;
  std::vector<lapack_int> ipiv(static_cast<std::size_t>(n));
  auto* data = reinterpret_cast<lapack_complex_double*>(a.data());
  const lapack_int info = LAPACKE_zhetrf(LAPACK_COL_MAJOR, 'L', n, data, n, ipiv.data());
  require(info >= 0, "zhetrf argument error", ErrorCode::Internal);
  // info > 0 means an exactly singular D; the zero pivot counts as non-negative.
  int neg = 0;
  for (lapack_int i = 0; i < n; ++i) {
    if (ipiv[i] > 0) {
      if (a(i, i).real() < 0.0) ++neg;
      continue;
    }
    // 2x2 block in rows i, i+1: det < 0 means one negative eigenvalue, else the sign of the trace.
    const double d11 = a(i, i).real();
    const double d22 = a(i + 1, i + 1).real();
    const double off = std::abs(a(i + 1, i));
    const double det = d11 * d22 - off * off;
    if (det < 0.0) {
      neg += 1;
    } else if (d11 + d22 < 0.0) {
      neg += 2;
    }
    ++i;
  }
  return neg;
}

bool hermitian_solve(Eigen::MatrixXcd a, Eigen::VectorXcd& rhs) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  std::vector<lapack_int> ipiv(static_cast<std::size_t>(n));
  auto* data = reinterpret_cast<lapack_complex_double*>(a.data());
  auto* b = reinterpret_cast<lapack_complex_double*>(rhs.data());
  const lapack_int info = LAPACKE_zhesv(LAPACK_COL_MAJOR, 'L', n, 1, data, n, ipiv.data(), b, n);
  return info == 0;
}

}  // namespace floq
