#include "ebi_unmix/pca.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ebi_unmix/error.hpp"
#include "ebi_unmix/linalg.hpp"

namespace ebi {

namespace {

constexpr double kClampTolerance = 1e-12;
constexpr double kDegenerateRatio = 1e-12;

void clamp_eigenvalues(std::vector<double>& eigenvalues) {
  const double scale = std::max(1.0, std::abs(eigenvalues.front()));
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    double& l = eigenvalues[i];
    if (l >= 0.0) continue;
    if (l < -kClampTolerance * scale) {
      throw Error(ErrorKind::internal, "covariance eigenvalue " + std::to_string(i) + " is " +
                                           message_number(l) + ", not positive semi-definite");
    }
    l = 0.0;
  }
}

void check_fit_shape(const Matrix& data) {
  if (data.rows() < data.cols() || data.rows() < 2) {
    throw Error(ErrorKind::insufficient_data,
                "PCA needs at least as many samples as channels (and two samples), got " +
                    std::to_string(data.rows()) + " samples for " + std::to_string(data.cols()) +
                    " channels");
  }
}

void check_k(const PcaModel& model, std::size_t k) {
  if (k == 0 || k > model.dimension()) {
    throw Error(ErrorKind::dimension, "requested " + std::to_string(k) +
                                          " components from a " +
                                          std::to_string(model.dimension()) + "-channel model");
  }
}

Matrix subtract_means(const PcaModel& model, const Matrix& data) {
  if (data.cols() != model.dimension()) {
    throw Error(ErrorKind::dimension, "data has " + std::to_string(data.cols()) +
                                          " channels, model expects " +
                                          std::to_string(model.dimension()));
  }
  Matrix centered = data;
  for (std::size_t r = 0; r < centered.rows(); ++r) {
    auto row = centered.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] -= model.means[c];
  }
  return centered;
}

}  // namespace

PcaModel fit_pca(const Matrix& data, std::size_t retain) {
  check_fit_shape(data);
  auto [centered, means] = center_columns(data);
  SymEigen eig = sym_eigen(covariance(centered));
  clamp_eigenvalues(eig.eigenvalues);
  const std::size_t p = data.cols();
  return PcaModel{std::move(means), std::move(eig.eigenvectors), std::move(eig.eigenvalues),
                  std::clamp<std::size_t>(retain, 1, p)};
}

PcaModel fit_pca(const SignalMatrix& data, std::size_t retain) {
  return fit_pca(data.samples(), retain);
}

PcaModel fit_pca_svd(const Matrix& data, std::size_t retain) {
  check_fit_shape(data);
  auto [centered, means] = center_columns(data);
  SvdResult s = svd(centered);
  const double denom = static_cast<double>(data.rows() - 1);
  std::vector<double> eigenvalues(s.d.size());
  for (std::size_t i = 0; i < s.d.size(); ++i) eigenvalues[i] = s.d[i] * s.d[i] / denom;
  const std::size_t p = data.cols();
  return PcaModel{std::move(means), std::move(s.v), std::move(eigenvalues),
                  std::clamp<std::size_t>(retain, 1, p)};
}

Matrix project(const PcaModel& model, const Matrix& data, std::size_t k) {
  check_k(model, k);
  return subtract_means(model, data) * model.loadings.left_columns(k);
}

Matrix project(const PcaModel& model, const SignalMatrix& data, std::size_t k) {
  return project(model, data.samples(), k);
}

Whitened whiten(const PcaModel& model, const Matrix& data, std::size_t k) {
  check_k(model, k);
  const double largest = model.eigenvalues.front();
  for (std::size_t i = 0; i < k; ++i) {
    if (!(model.eigenvalues[i] > kDegenerateRatio * largest)) {
      throw Error(ErrorKind::degenerate_dimension,
                  "principal component " + std::to_string(i + 1) + " has eigenvalue " +
                      message_number(model.eigenvalues[i]) + ", too small to whiten");
    }
  }
  const std::size_t p = model.dimension();
  Matrix whitening(p, k);
  Matrix dewhitening(k, p);
  for (std::size_t j = 0; j < k; ++j) {
    const double root = std::sqrt(model.eigenvalues[j]);
    for (std::size_t i = 0; i < p; ++i) {
      whitening(i, j) = model.loadings(i, j) / root;
      dewhitening(j, i) = model.loadings(i, j) * root;
    }
  }
  Matrix white = subtract_means(model, data) * whitening;
  return {std::move(white), std::move(whitening), std::move(dewhitening)};
}

Whitened whiten(const PcaModel& model, const SignalMatrix& data, std::size_t k) {
  return whiten(model, data.samples(), k);
}

double explained_variance(const PcaModel& model, std::size_t k) {
  check_k(model, k);
  if (k == model.dimension()) return 1.0;
  double total = 0.0;
  for (double l : model.eigenvalues) total += l;
  if (total == 0.0) return 1.0;
  double kept = 0.0;
  for (std::size_t i = 0; i < k; ++i) kept += model.eigenvalues[i];
  return std::min(1.0, kept / total);
}

std::size_t components_for_variance(const PcaModel& model, double threshold) {
  for (std::size_t k = 1; k < model.dimension(); ++k) {
    if (explained_variance(model, k) >= threshold) return k;
  }
  return model.dimension();
}

}  // namespace ebi
