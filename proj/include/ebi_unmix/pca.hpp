#pragma once

#include <cstddef>
#include <vector>

#include "ebi_unmix/matrix.hpp"
#include "ebi_unmix/signal.hpp"

namespace ebi {

/// Principal axes of a multichannel block. Loadings are the covariance
/// eigenvectors (columns, descending eigenvalue order); scores are the
/// projections of centered data onto them.
struct PcaModel {
  std::vector<double> means;
  Matrix loadings;
  std::vector<double> eigenvalues;
  std::size_t retained = 1;

  std::size_t dimension() const noexcept { return means.size(); }
};

struct Whitened {
  Matrix white;        // n × k, identity sample covariance
  Matrix whitening;    // p × k: white = (data - means) · whitening
  Matrix dewhitening;  // k × p: white · dewhitening + means = rank-k approximation
};

/// Fits through the covariance eigendecomposition. `retained` is set to
/// `retain` (clamped to p).
PcaModel fit_pca(const SignalMatrix& data, std::size_t retain = 2);
PcaModel fit_pca(const Matrix& data, std::size_t retain = 2);

/// Same model through the SVD of the centered data, λ = d²/(n-1).
PcaModel fit_pca_svd(const Matrix& data, std::size_t retain = 2);

/// Scores on the first k principal axes.
Matrix project(const PcaModel& model, const Matrix& data, std::size_t k);
Matrix project(const PcaModel& model, const SignalMatrix& data, std::size_t k);

/// Throws Error(degenerate_dimension) naming the first retained component
/// whose eigenvalue is below 1e-12 of the largest.
Whitened whiten(const PcaModel& model, const Matrix& data, std::size_t k);
Whitened whiten(const PcaModel& model, const SignalMatrix& data, std::size_t k);

double explained_variance(const PcaModel& model, std::size_t k);

/// Smallest k whose explained variance reaches `threshold`.
std::size_t components_for_variance(const PcaModel& model, double threshold);

}  // namespace ebi
