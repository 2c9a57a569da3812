#pragma once

#include <Eigen/Dense>

#include "floq/model.hpp"

namespace floq {

/// Eigen-decomposition H = V diag(E) V^T of a real symmetric single-excitation matrix.
struct SpectralDecomposition {
  Eigen::VectorXd energies;  // ascending
  Eigen::MatrixXd vectors;   // columns are eigenvectors
};

/// Tridiagonal QL path when there is no ring closure, dense otherwise.
SpectralDecomposition decompose(const EffectiveHamiltonian& h);

/// Number of negative eigenvalues of a Hermitian matrix via Bunch-Kaufman LDL^H
/// (Sylvester inertia). The input is overwritten by the factorization.
int hermitian_negative_count(Eigen::MatrixXcd& a);

/// Solve a Hermitian indefinite system in place; returns false if the matrix is singular.
bool hermitian_solve(Eigen::MatrixXcd a, Eigen::VectorXcd& rhs);

}  // namespace floq
