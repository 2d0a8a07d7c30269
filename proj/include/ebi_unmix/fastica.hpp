#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ebi_unmix/matrix.hpp"

namespace ebi {

enum class Contrast { logcosh, pow3 };
enum class Orthogonalization { symmetric, deflation };

const char* to_string(Contrast c);
const char* to_string(Orthogonalization o);
Contrast parse_contrast(const std::string& name);
Orthogonalization parse_orthogonalization(const std::string& name);

struct IcaConfig {
  Contrast contrast = Contrast::logcosh;
  std::size_t max_iterations = 200;
  double tolerance = 1e-6;
  Orthogonalization orthogonalization = Orthogonalization::symmetric;
  std::uint64_t seed = 0;
};

struct ConvergenceReport {
  std::size_t iterations_used = 0;
  /// max over components of |1 - |<w_new, w_old>||
  double final_delta = 0.0;
  bool converged = false;
  std::vector<double> per_iteration_deltas;
};

/// Unmixing rows act on whitened data: S = white · Wᵀ.
struct IcaModel {
  Matrix unmixing;
  /// Wᵀ after fitting (whitened space); reconstruct_mixing maps it to
  /// channel space.
  Matrix mixing_estimate;
  ConvergenceReport convergence;
};

struct ContrastValue {
  double g;
  double g_prime;
};

ContrastValue contrast_eval(Contrast contrast, double u);

/// Fixed-point FastICA on whitened data with as many components as columns.
/// Components are returned ordered by decreasing |E{log cosh s} - E{log cosh ν}|
/// with signs chosen to make each component's skewness non-negative.
///
/// Throws Error(precondition) when the sample covariance of `white` is not
/// the identity within 1e-3. Non-convergence is reported in the model.
IcaModel fit_fastica(const Matrix& white, const IcaConfig& config);

/// white · Wᵀ: one estimated component per column.
Matrix separate(const IcaModel& model, const Matrix& white);

/// Channel-space mixing estimate dewhiteningᵀ · Wᵀ (p × k).
Matrix reconstruct_mixing(const IcaModel& model, const Matrix& dewhitening);

/// (W·Wᵀ)^{-1/2}·W via the symmetric eigendecomposition.
Matrix symmetric_decorrelation(const Matrix& w);

/// E{log cosh ν} for standard normal ν.
double gaussian_logcosh_mean();

}  // namespace ebi
