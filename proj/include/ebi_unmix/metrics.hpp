#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ebi_unmix/matrix.hpp"

namespace ebi {

struct ComponentMatch {
  std::size_t estimated = 0;
  std::size_t truth = 0;
  /// Signed Pearson correlation of the pair.
  double correlation = 0.0;
  /// Largest |ρ| between the estimate and any true source it was not
  /// assigned to (0 when there is none).
  double leakage = 0.0;
};

struct SeparationReport {
  std::vector<ComponentMatch> matches;
  /// Set when the caller supplied both unmixing and true mixing.
  std::optional<double> amari_index;

  double min_abs_correlation() const;
  double mean_abs_correlation() const;
  /// Match for a given true source, if that source was assigned.
  const ComponentMatch* for_truth(std::size_t truth_index) const;
};

/// Throws Error(undefined_correlation) when either input has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

/// Exhaustive search over injective assignments between estimated and true
/// columns maximizing Σ|ρ|. Ties keep the lexicographically first assignment.
SeparationReport match_components(const Matrix& estimated, const Matrix& truth);

/// Amari index of P = w·a; 0 means P is a scaled permutation.
double amari_index(const Matrix& w, const Matrix& a);
double amari_index(const Matrix& p);

}  // namespace ebi
