#pragma once

#include <vector>

#include "ebi_unmix/matrix.hpp"

namespace ebi {

struct Centered {
  Matrix centered;
  std::vector<double> means;
};

/// Eigenpairs of a symmetric matrix. Eigenvalues are sorted descending and
/// eigenvector column i belongs to eigenvalue i.
struct SymEigen {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;
};

/// Thin SVD of a tall matrix: data = U·diag(D)·Vᵀ.
struct SvdResult {
  Matrix u;
  std::vector<double> d;
  Matrix v;
};

inline constexpr double kJacobiTolerance = 1e-12;
inline constexpr int kJacobiMaxSweeps = 100;
inline constexpr double kSymmetryTolerance = 1e-9;
/// Singular values below this fraction of the largest are treated as zero.
inline constexpr double kRankTolerance = 1e-12;

Centered center_columns(const Matrix& data);

/// Unbiased sample covariance (1/(n-1))·XᵀX of an already centered matrix.
Matrix covariance(const Matrix& centered);

/// Cyclic Jacobi eigensolver. Each eigenvector is sign-normalized so that its
/// largest-magnitude entry is positive.
///
/// Throws Error(invalid_input) for non-square or asymmetric input and
/// ConvergenceError when off-diagonal mass does not fall below
/// kJacobiTolerance·‖m‖ within kJacobiMaxSweeps sweeps.
SymEigen sym_eigen(const Matrix& m);

/// SVD through the eigendecomposition of the p×p Gram matrix. Columns of U
/// belonging to zero singular values are completed by Gram–Schmidt over the
/// standard basis.
SvdResult svd(const Matrix& data);

/// Flip the sign of `v` so that its largest-magnitude entry is positive.
void normalize_sign(std::span<double> v);

}  // namespace ebi
