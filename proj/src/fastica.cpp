#include "ebi_unmix/fastica.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>
#include <random>

#include "ebi_unmix/error.hpp"
#include "ebi_unmix/linalg.hpp"

namespace ebi {

namespace {

constexpr double kWhitenessTolerance = 1e-3;
constexpr double kOrthonormalityDrift = 1e-8;
constexpr double kDecorrelationFloor = 1e-12;
constexpr double kSkewnessFloor = 1e-3;

double log_cosh(double u) {
  const double a = std::abs(u);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

void require_white(const Matrix& white) {
  if (white.rows() < 2) {
    throw Error(ErrorKind::insufficient_data, "FastICA needs at least 2 samples");
  }
  const Matrix cov = covariance(center_columns(white).centered);
  const double defect = max_abs_diff(cov, Matrix::identity(white.cols()));
  if (defect > kWhitenessTolerance) {
    throw Error(ErrorKind::precondition,
                "input is not white: sample covariance deviates from identity by " +
                    message_number(defect));
  }
}

Matrix random_start(std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix w(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    for (double& v : w.row(i)) v = normal(rng);
  }
  return w;
}

Matrix decorrelate_checked(const Matrix& w) {
  Matrix out = symmetric_decorrelation(w);
  const std::size_t k = out.rows();
  if (max_abs_diff(out * out.transposed(), Matrix::identity(k)) > kOrthonormalityDrift) {
    out = symmetric_decorrelation(out);
    if (max_abs_diff(out * out.transposed(), Matrix::identity(k)) > kOrthonormalityDrift) {
      throw Error(ErrorKind::internal, "unmixing rows drifted from orthonormality");
    }
  }
  return out;
}

// One fixed-point step for every row of w: E{x g(wᵀx)} - E{g'(wᵀx)} w.
Matrix fixed_point_step(const Matrix& white, const Matrix& w, Contrast contrast) {
  const std::size_t n = white.rows();
  const std::size_t k = w.rows();
  const std::size_t dim = white.cols();
  Matrix next(k, dim);
  std::vector<double> mean_gp(k, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    auto x = white.row(t);
    for (std::size_t i = 0; i < k; ++i) {
      const ContrastValue cv = contrast_eval(contrast, dot(w.row(i), x));
      auto out = next.row(i);
      for (std::size_t j = 0; j < dim; ++j) out[j] += cv.g * x[j];
      mean_gp[i] += cv.g_prime;
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < k; ++i) {
    auto out = next.row(i);
    auto wi = w.row(i);
    for (std::size_t j = 0; j < dim; ++j) out[j] = out[j] * inv_n - mean_gp[i] * inv_n * wi[j];
  }
  return next;
}

double alignment_delta(std::span<const double> a, std::span<const double> b) {
  return std::abs(1.0 - std::abs(dot(a, b)));
}

ConvergenceReport run_symmetric(const Matrix& white, const IcaConfig& config, Matrix& w) {
  ConvergenceReport report;
  w = decorrelate_checked(w);
  double delta = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < config.max_iterations; ++it) {
    Matrix next = decorrelate_checked(fixed_point_step(white, w, config.contrast));
    delta = 0.0;
    for (std::size_t i = 0; i < w.rows(); ++i) {
      delta = std::max(delta, alignment_delta(next.row(i), w.row(i)));
    }
    w = std::move(next);
    report.per_iteration_deltas.push_back(delta);
    report.iterations_used = it + 1;
    if (delta < config.tolerance) break;
  }
  report.final_delta = delta;
  report.converged = delta < config.tolerance;
  return report;
}

void orthogonalize_against(std::span<double> v, const Matrix& w, std::size_t count) {
  for (std::size_t j = 0; j < count; ++j) {
    const double proj = dot(v, w.row(j));
    auto wj = w.row(j);
    for (std::size_t d = 0; d < v.size(); ++d) v[d] -= proj * wj[d];
  }
}

void normalize(std::span<double> v) {
  const double norm = std::sqrt(dot(v, v));
  if (!(norm > kDecorrelationFloor)) {
    throw Error(ErrorKind::degenerate_dimension, "unmixing vector collapsed to zero");
  }
  for (double& x : v) x /= norm;
}

ConvergenceReport run_deflation(const Matrix& white, const IcaConfig& config, Matrix& w) {
  ConvergenceReport report;
  const std::size_t k = w.rows();
  double worst = 0.0;
  bool all_converged = true;
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<double> current(w.row(c).begin(), w.row(c).end());
    orthogonalize_against(current, w, c);
    normalize(current);
    double delta = std::numeric_limits<double>::infinity();
    for (std::size_t it = 0; it < config.max_iterations; ++it) {
      const Matrix one(1, current.size(), current);
      Matrix step = fixed_point_step(white, one, config.contrast);
      std::vector<double> next(step.row(0).begin(), step.row(0).end());
      // Twice for numerical orthogonality against the finished rows.
      orthogonalize_against(next, w, c);
      orthogonalize_against(next, w, c);
      normalize(next);
      delta = alignment_delta(next, current);
      current = std::move(next);
      report.per_iteration_deltas.push_back(delta);
      ++report.iterations_used;
      if (delta < config.tolerance) break;
    }
    std::copy(current.begin(), current.end(), w.row(c).begin());
    worst = std::max(worst, delta);
    all_converged = all_converged && delta < config.tolerance;
  }
  report.final_delta = worst;
  report.converged = all_converged && worst < config.tolerance;
  return report;
}

double skewness(std::span<const double> s) {
  const double n = static_cast<double>(s.size());
  const double mean = std::accumulate(s.begin(), s.end(), 0.0) / n;
  double m2 = 0.0, m3 = 0.0;
  for (double v : s) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  return m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
}

// Orders rows by non-Gaussianity and fixes their signs.
Matrix canonicalize(const Matrix& white, const Matrix& w) {
  const Matrix sources = white * w.transposed();
  const std::size_t k = w.rows();
  const double gauss = gaussian_logcosh_mean();

  std::vector<double> score(k);
  std::vector<double> sign(k, 1.0);
  for (std::size_t i = 0; i < k; ++i) {
    const std::vector<double> s = sources.column(i);
    double mean_g = 0.0;
    for (double v : s) mean_g += log_cosh(v);
    mean_g /= static_cast<double>(s.size());
    score[i] = std::abs(mean_g - gauss);

    const double skew = skewness(s);
    if (std::abs(skew) >= kSkewnessFloor) {
      sign[i] = skew < 0.0 ? -1.0 : 1.0;
    } else {
      std::size_t best = 0;
      for (std::size_t t = 1; t < s.size(); ++t) {
        if (std::abs(s[t]) > std::abs(s[best])) best = t;
      }
      sign[i] = s[best] < 0.0 ? -1.0 : 1.0;
    }
  }

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });

  Matrix out(k, w.cols());
  for (std::size_t r = 0; r < k; ++r) {
    const std::size_t src = order[r];
    for (std::size_t j = 0; j < w.cols(); ++j) out(r, j) = sign[src] * w(src, j);
  }
  return out;
}

}  // namespace

const char* to_string(Contrast c) { return c == Contrast::logcosh ? "logcosh" : "pow3"; }

const char* to_string(Orthogonalization o) {
  return o == Orthogonalization::symmetric ? "symmetric" : "deflation";
}

Contrast parse_contrast(const std::string& name) {
  if (name == "logcosh") return Contrast::logcosh;
  if (name == "pow3") return Contrast::pow3;
  throw Error(ErrorKind::invalid_input, "unknown contrast '" + name + "'");
}

Orthogonalization parse_orthogonalization(const std::string& name) {
  if (name == "symmetric") return Orthogonalization::symmetric;
  if (name == "deflation") return Orthogonalization::deflation;
  throw Error(ErrorKind::invalid_input, "unknown orthogonalization '" + name + "'");
}

ContrastValue contrast_eval(Contrast contrast, double u) {
  switch (contrast) {
    case Contrast::logcosh: {
      const double t = std::tanh(u);
      return {t, 1.0 - t * t};
    }
    case Contrast::pow3:
      return {u * u * u, 3.0 * u * u};
  }
  return {0.0, 0.0};
}

double gaussian_logcosh_mean() {
  static const double value = [] {
    // Composite Simpson over [-12, 12]; the tails beyond contribute < 1e-30.
    constexpr int intervals = 24000;
    constexpr double lo = -12.0;
    constexpr double hi = 12.0;
    const double h = (hi - lo) / intervals;
    auto f = [](double x) {
      return log_cosh(x) * std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    };
    double sum = f(lo) + f(hi);
    for (int i = 1; i < intervals; ++i) sum += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return sum * h / 3.0;
  }();
  return value;
}

Matrix symmetric_decorrelation(const Matrix& w) {
  const SymEigen eig = sym_eigen(w * w.transposed());
  const std::size_t k = eig.eigenvalues.size();
  const double largest = std::abs(eig.eigenvalues.front());
  Matrix inv_sqrt(k, k);
  for (std::size_t m = 0; m < k; ++m) {
    const double l = eig.eigenvalues[m];
    if (!(l > kDecorrelationFloor * std::max(1.0, largest))) {
      throw Error(ErrorKind::degenerate_dimension,
                  "W·Wᵀ eigenvalue " + message_number(l) + " too small for decorrelation");
    }
    const double s = 1.0 / std::sqrt(l);
    for (std::size_t i = 0; i < k; ++i) {
      const double vi = eig.eigenvectors(i, m) * s;
      for (std::size_t j = 0; j < k; ++j) inv_sqrt(i, j) += vi * eig.eigenvectors(j, m);
    }
  }
  return inv_sqrt * w;
}

IcaModel fit_fastica(const Matrix& white, const IcaConfig& config) {
  if (!(config.tolerance > 0.0) || config.max_iterations == 0) {
    throw Error(ErrorKind::invalid_input, "ICA tolerance must be > 0 and max iterations >= 1");
  }
  require_white(white);

  Matrix w = random_start(white.cols(), config.seed);
  ConvergenceReport report = config.orthogonalization == Orthogonalization::symmetric
                                 ? run_symmetric(white, config, w)
                                 : run_deflation(white, config, w);
  w = canonicalize(white, w);
  Matrix mixing = w.transposed();
  return IcaModel{std::move(w), std::move(mixing), std::move(report)};
}

Matrix separate(const IcaModel& model, const Matrix& white) {
  if (white.cols() != model.unmixing.cols()) {
    throw Error(ErrorKind::dimension, "whitened data has " + std::to_string(white.cols()) +
                                          " columns, unmixing expects " +
                                          std::to_string(model.unmixing.cols()));
  }
  return white * model.unmixing.transposed();
}

Matrix reconstruct_mixing(const IcaModel& model, const Matrix& dewhitening) {
  if (dewhitening.rows() != model.unmixing.cols()) {
    throw Error(ErrorKind::dimension, "dewhitening has " + std::to_string(dewhitening.rows()) +
                                          " rows, unmixing acts on " +
                                          std::to_string(model.unmixing.cols()) + " dimensions");
  }
  return dewhitening.transposed() * model.unmixing.transposed();
}

}  // namespace ebi
