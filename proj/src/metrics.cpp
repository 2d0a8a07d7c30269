#include "ebi_unmix/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ebi_unmix/error.hpp"

namespace ebi {

double SeparationReport::min_abs_correlation() const {
  double best = matches.empty() ? 0.0 : 1.0;
  for (const auto& m : matches) best = std::min(best, std::abs(m.correlation));
  return best;
}

double SeparationReport::mean_abs_correlation() const {
  if (matches.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& m : matches) sum += std::abs(m.correlation);
  return sum / static_cast<double>(matches.size());
}

const ComponentMatch* SeparationReport::for_truth(std::size_t truth_index) const {
  for (const auto& m : matches) {
    if (m.truth == truth_index) return &m;
  }
  return nullptr;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::dimension, "pearson: length mismatch");
  if (x.size() < 2) throw Error(ErrorKind::insufficient_data, "pearson needs at least 2 samples");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) {
    throw Error(ErrorKind::undefined_correlation, "correlation undefined for zero-variance input");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

SeparationReport match_components(const Matrix& estimated, const Matrix& truth) {
  if (estimated.rows() != truth.rows()) {
    throw Error(ErrorKind::dimension, "estimated and true components differ in length (" +
                                          std::to_string(estimated.rows()) + " vs " +
                                          std::to_string(truth.rows()) + ")");
  }
  const std::size_t ke = estimated.cols();
  const std::size_t kt = truth.cols();
  if (std::max(ke, kt) > 8) {
    throw Error(ErrorKind::dimension, "exhaustive matching supports at most 8 components");
  }

  std::vector<std::vector<double>> est_cols(ke), true_cols(kt);
  for (std::size_t i = 0; i < ke; ++i) est_cols[i] = estimated.column(i);
  for (std::size_t j = 0; j < kt; ++j) true_cols[j] = truth.column(j);
  Matrix rho(ke, kt);
  for (std::size_t i = 0; i < ke; ++i) {
    for (std::size_t j = 0; j < kt; ++j) rho(i, j) = pearson(est_cols[i], true_cols[j]);
  }

  // Enumerate permutations of the larger side; the first min(ke, kt) slots
  // give the pairing. Duplicate prefixes are harmless.
  const bool est_larger = ke >= kt;
  const std::size_t big = std::max(ke, kt);
  const std::size_t small = std::min(ke, kt);
  std::vector<std::size_t> perm(big);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::size_t> best_perm = perm;
  double best_score = -1.0;
  do {
    double score = 0.0;
    for (std::size_t s = 0; s < small; ++s) {
      score += est_larger ? std::abs(rho(perm[s], s)) : std::abs(rho(s, perm[s]));
    }
    if (score > best_score) {
      best_score = score;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  SeparationReport report;
  for (std::size_t s = 0; s < small; ++s) {
    ComponentMatch m;
    m.estimated = est_larger ? best_perm[s] : s;
    m.truth = est_larger ? s : best_perm[s];
    m.correlation = rho(m.estimated, m.truth);
    report.matches.push_back(m);
  }
  for (auto& m : report.matches) {
    for (std::size_t j = 0; j < kt; ++j) {
      if (j != m.truth) m.leakage = std::max(m.leakage, std::abs(rho(m.estimated, j)));
    }
  }
  std::sort(report.matches.begin(), report.matches.end(),
            [](const ComponentMatch& a, const ComponentMatch& b) { return a.truth < b.truth; });
  return report;
}

double amari_index(const Matrix& p) {
  if (p.rows() != p.cols()) {
    throw Error(ErrorKind::dimension, "Amari index needs a square product, got " +
                                          std::to_string(p.rows()) + "x" +
                                          std::to_string(p.cols()));
  }
  const std::size_t k = p.rows();
  double rows_term = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double sum = 0.0, peak = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      sum += std::abs(p(i, j));
      peak = std::max(peak, std::abs(p(i, j)));
    }
    if (!(peak > 0.0)) throw Error(ErrorKind::degenerate_dimension, "Amari index: zero row");
    rows_term += sum / peak - 1.0;
  }
  double cols_term = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    double sum = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      sum += std::abs(p(i, j));
      peak = std::max(peak, std::abs(p(i, j)));
    }
    if (!(peak > 0.0)) throw Error(ErrorKind::degenerate_dimension, "Amari index: zero column");
    cols_term += sum / peak - 1.0;
  }
  const double scale = 1.0 / (2.0 * static_cast<double>(k));
  return scale * rows_term + scale * cols_term;
}

double amari_index(const Matrix& w, const Matrix& a) { return amari_index(w * a); }

}  // namespace ebi
