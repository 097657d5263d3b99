#pragma once

#include "twr/types.hpp"

namespace twr {

// Kronecker product, column-major convention throughout.
Mat kron(const Mat& a, const Mat& b);

// Column-stacking vectorization and its inverse.
Vec vec(const Mat& a);
Mat unvec(const Vec& v, Index rows, Index cols);

Mat blkdiag(const Mat& a, const Mat& b);

// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.
// Ties keep the solver's original (ascending-index) order so that exact
// diagonal inputs reproduce themselves.
struct HermitianEig {
  Mat vectors;    // unitary, columns are eigenvectors
  RealVec values; // real, descending
};

HermitianEig hermitian_eig(const Mat& a);

// Asymmetry check used by every Hermitian-tagged entry point.
// Throws if max|A - A^H| > tol * max|A|.
void ensure_hermitian(const Mat& a, double tol = 1e-10);

// Factor C of a Hermitian PSD matrix Z with C C^H = Z, canonical choice
// C = U Lambda^{1/2} with eigenvalues clipped at zero, descending order.
// Throws NotPsdError if an eigenvalue falls below -1e-10 * trace / n.
Mat hermitian_factor(const Mat& z);

// Nearest-PSD repair by eigenvalue clipping (round-off cleanup for
// covariance builders).
Mat psd_project(const Mat& a);

// 0/1 matrix E with vec(S kron I_m) = E vec(S) for every S of shape
// n_rows x l.
Mat selection_matrix_e(Index n_rows, Index m, Index l);

// Linear solves. solve_hermitian expects a Hermitian lhs (LDLT, LU
// fallback); solve_lu is the generic path. Both throw SingularGramError
// when the system is numerically singular.
Mat solve_hermitian(const Mat& a, const Mat& b);
Mat solve_lu(const Mat& a, const Mat& b);

}  // namespace twr
