#include "ebi_unmix/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ebi_unmix/error.hpp"

namespace ebi {

Centered center_columns(const Matrix& data) {
  const std::size_t n = data.rows();
  const std::size_t p = data.cols();
  std::vector<double> means(p, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    auto row = data.row(r);
    for (std::size_t c = 0; c < p; ++c) {
      if (!std::isfinite(row[c])) {
        throw Error(ErrorKind::invalid_input, "non-finite value at row " + std::to_string(r) +
                                                  ", column " + std::to_string(c));
      }
      means[c] += row[c];
    }
  }
  for (double& m : means) m /= static_cast<double>(n);

  Matrix centered = data;
  for (std::size_t r = 0; r < n; ++r) {
    auto row = centered.row(r);
    for (std::size_t c = 0; c < p; ++c) row[c] -= means[c];
  }
  return {std::move(centered), std::move(means)};
}

Matrix covariance(const Matrix& centered) {
  if (centered.rows() < 2) {
    throw Error(ErrorKind::insufficient_data, "covariance needs at least 2 rows, got " +
                                                  std::to_string(centered.rows()));
  }
  Matrix cov = transpose_times(centered, centered);
  const double scale = 1.0 / static_cast<double>(centered.rows() - 1);
  const std::size_t p = cov.rows();
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i; j < p; ++j) {
      const double v = cov(i, j) * scale;
      cov(i, j) = v;
      cov(j, i) = v;
    }
  }
  return cov;
}

void normalize_sign(std::span<double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  }
  if (!v.empty() && v[best] < 0.0) {
    for (double& x : v) x = -x;
  }
}

namespace {

double max_off_diagonal(const Matrix& a) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = i + 1; j < a.cols(); ++j) best = std::max(best, std::abs(a(i, j)));
  }
  return best;
}

// Annihilates a(p,q) with a plane rotation and accumulates it into v.
void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const std::size_t n = a.rows();

  for (std::size_t k = 0; k < n; ++k) {
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double apk = a(p, k);
    const double aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;

  for (std::size_t k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

}  // namespace

SymEigen sym_eigen(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::invalid_input, "sym_eigen needs a square matrix, got " +
                                              std::to_string(m.rows()) + "x" +
                                              std::to_string(m.cols()));
  }
  const std::size_t n = m.rows();
  const double scale = std::max(1.0, max_abs(m));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(m(i, j) - m(j, i)) > kSymmetryTolerance * scale) {
        throw Error(ErrorKind::invalid_input, "matrix is not symmetric at (" + std::to_string(i) +
                                                  "," + std::to_string(j) + ")");
      }
    }
  }

  Matrix a = m;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = avg;
      a(j, i) = avg;
    }
  }
  Matrix v = Matrix::identity(n);
  const double threshold = kJacobiTolerance * frobenius_norm(m);

  int sweeps = 0;
  while (max_off_diagonal(a) > threshold) {
    if (sweeps == kJacobiMaxSweeps) {
      throw ConvergenceError("Jacobi eigensolver did not converge after " +
                                 std::to_string(sweeps) + " sweeps",
                             static_cast<std::size_t>(sweeps));
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) rotate(a, v, p, q);
    }
    ++sweeps;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

  SymEigen out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]);
    std::vector<double> vec = v.column(order[k]);
    normalize_sign(vec);
    out.eigenvectors.set_column(k, vec);
  }
  return out;
}

SvdResult svd(const Matrix& data) {
  const std::size_t n = data.rows();
  const std::size_t p = data.cols();
  if (n < p) {
    throw Error(ErrorKind::dimension, "svd needs rows >= cols, got " + std::to_string(n) + "x" +
                                          std::to_string(p));
  }

  SymEigen gram = sym_eigen(transpose_times(data, data));
  std::vector<double> d(p);
  for (std::size_t i = 0; i < p; ++i) d[i] = std::sqrt(std::max(gram.eigenvalues[i], 0.0));

  const double cutoff = kRankTolerance * d.front();
  Matrix u = data * gram.eigenvectors;
  std::vector<bool> filled(p, false);
  for (std::size_t j = 0; j < p; ++j) {
    if (d[j] <= cutoff || d[j] == 0.0) {
      d[j] = 0.0;
      continue;
    }
    for (std::size_t r = 0; r < n; ++r) u(r, j) /= d[j];
    filled[j] = true;
  }

  // Complete the basis for zero singular values: orthogonalize successive
  // standard basis vectors against every column already present.
  std::size_t next_basis = 0;
  for (std::size_t j = 0; j < p; ++j) {
    if (filled[j]) continue;
    for (;; ++next_basis) {
      if (next_basis == n) throw Error(ErrorKind::internal, "svd basis completion failed");
      std::vector<double> cand(n, 0.0);
      cand[next_basis] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t k = 0; k < p; ++k) {
          if (!filled[k]) continue;
          double proj = 0.0;
          for (std::size_t r = 0; r < n; ++r) proj += u(r, k) * cand[r];
          for (std::size_t r = 0; r < n; ++r) cand[r] -= proj * u(r, k);
        }
      }
      const double norm = std::sqrt(dot(cand, cand));
      if (norm < 1e-8) continue;
      for (double& x : cand) x /= norm;
      normalize_sign(cand);
      u.set_column(j, cand);
      filled[j] = true;
      ++next_basis;
      break;
    }
  }

  return {std::move(u), std::move(d), std::move(gram.eigenvectors)};
}

}  // namespace ebi
