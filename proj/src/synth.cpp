#include "ebi_unmix/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ebi_unmix/error.hpp"
#include "ebi_unmix/linalg.hpp"

namespace ebi {

namespace {

constexpr double kRankRatio = 1e-6;

void check_rate(const SourceSpec& spec, std::size_t n, double rate_hz) {
  if (n == 0) throw Error(ErrorKind::invalid_spec, "source length must be at least 1");
  if (!(rate_hz > 0.0)) throw Error(ErrorKind::invalid_spec, "sample rate must be positive");
  if (!(spec.fundamental_hz > 0.0) || !(spec.fundamental_hz < rate_hz / 2.0)) {
    throw Error(ErrorKind::invalid_spec, "fundamental " + message_number(spec.fundamental_hz) +
                                             " Hz must lie in (0, Nyquist)");
  }
  if (spec.harmonics < 1) throw Error(ErrorKind::invalid_spec, "harmonics must be at least 1");
  if (!(spec.jitter_pct >= 0.0) || !(spec.jitter_pct < 100.0)) {
    throw Error(ErrorKind::invalid_spec, "jitter must lie in [0, 100) percent");
  }
}

// Zero mean, standard deviation `amplitude`; a constant input stays zero.
void standardize(std::vector<double>& x, double amplitude) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double var = 0.0;
  for (double& v : x) {
    v -= mean;
    var += v * v;
  }
  var /= n;
  if (!(var > 0.0)) {
    std::fill(x.begin(), x.end(), 0.0);
    return;
  }
  const double scale = amplitude / std::sqrt(var);
  for (double& v : x) v *= scale;
}

}  // namespace

SourceSpec SourceSpec::cardiac_default() {
  return SourceSpec{SourceKind::cardiac, 1.2, 1.0, 1, 5.0};
}

SourceSpec SourceSpec::respiratory_default() {
  return SourceSpec{SourceKind::respiratory, 0.25, 1.0, 2, 0.0};
}

Matrix MixtureSpec::default_mixing() {
  return Matrix{{1.0, 0.8}, {0.6, 1.0}, {0.9, -0.4}, {-0.3, 1.1}};
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined value.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SourceSignal gen_cardiac(const SourceSpec& spec, std::size_t n, double rate_hz,
                         std::uint64_t seed) {
  check_rate(spec, n, rate_hz);
  SourceSignal out;
  out.values.assign(n, 0.0);
  if (spec.amplitude == 0.0) return out;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double period = 1.0 / spec.fundamental_hz;
  const double jitter = spec.jitter_pct / 100.0;
  const double duration = static_cast<double>(n) / rate_hz;
  const double reach = 6.0 * kPulseSigmaSeconds;

  // One beat before t = 0 so the first pulse tail is present.
  double beat = unit(rng) * period - period;
  while (beat < duration + reach) {
    const auto first = static_cast<std::ptrdiff_t>(std::ceil((beat - reach) * rate_hz));
    const auto last = static_cast<std::ptrdiff_t>(std::floor((beat + reach) * rate_hz));
    for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(first, 0);
         i <= last && i < static_cast<std::ptrdiff_t>(n); ++i) {
      const double z = (static_cast<double>(i) / rate_hz - beat) / kPulseSigmaSeconds;
      out.values[static_cast<std::size_t>(i)] += std::exp(-0.5 * z * z);
    }
    beat += period * (1.0 + jitter * (2.0 * unit(rng) - 1.0));
  }
  standardize(out.values, spec.amplitude);
  return out;
}

SourceSignal gen_respiratory(const SourceSpec& spec, std::size_t n, double rate_hz,
                             std::uint64_t seed) {
  check_rate(spec, n, rate_hz);
  SourceSignal out;
  out.values.assign(n, 0.0);
  if (spec.amplitude == 0.0) return out;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
  for (std::size_t m = 1; m <= spec.harmonics; ++m) {
    const double phase = phase_dist(rng);
    const double freq = static_cast<double>(m) * spec.fundamental_hz;
    if (freq >= rate_hz / 2.0) {
      out.warnings.push_back("respiratory harmonic " + std::to_string(m) + " at " +
                             message_number(freq) + " Hz is at or above Nyquist; dropped");
      continue;
    }
    const double weight = 1.0 / static_cast<double>(m);
    const double step = 2.0 * std::numbers::pi * freq / rate_hz;
    for (std::size_t i = 0; i < n; ++i) {
      out.values[i] += weight * std::sin(step * static_cast<double>(i) + phase);
    }
  }
  standardize(out.values, spec.amplitude);
  return out;
}

Matrix inject_correlation(const Matrix& sources, double strength) {
  if (!(strength >= 0.0) || !(strength < 1.0)) {
    throw Error(ErrorKind::invalid_spec, "correlation injection must lie in [0, 1)");
  }
  if (strength == 0.0) return sources;
  if (sources.cols() < 2) {
    throw Error(ErrorKind::invalid_spec,
                "correlation injection needs cardiac and respiratory columns");
  }
  double baseline = sources(0, 0);
  for (std::size_t r = 1; r < sources.rows(); ++r) baseline = std::min(baseline, sources(r, 0));
  Matrix out = sources;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    out(r, 0) = baseline + (sources(r, 0) - baseline) * (1.0 + strength * sources(r, 1));
  }
  return out;
}

SignalMatrix mix(const Matrix& sources, const MixtureSpec& spec, double rate_hz,
                 std::uint64_t seed) {
  const Matrix& a = spec.mixing;
  if (a.cols() != sources.cols()) {
    throw Error(ErrorKind::invalid_spec, "mixing has " + std::to_string(a.cols()) +
                                             " columns for " + std::to_string(sources.cols()) +
                                             " sources");
  }
  if (a.rows() < a.cols()) {
    throw Error(ErrorKind::invalid_spec, "mixing needs at least as many channels as sources");
  }
  const SvdResult s = svd(a);
  if (!(s.d.back() > kRankRatio * s.d.front())) {
    throw Error(ErrorKind::invalid_spec, "mixing matrix is rank deficient");
  }
  if (!(spec.noise_sigma >= 0.0)) {
    throw Error(ErrorKind::invalid_spec, "noise sigma must be non-negative");
  }

  Matrix channels = inject_correlation(sources, spec.correlation_injection) * a.transposed();
  if (spec.noise_sigma > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    for (std::size_t r = 0; r < channels.rows(); ++r) {
      for (double& v : channels.row(r)) v += noise(rng);
    }
  }
  std::vector<std::string> labels = a.rows() == 4
                                        ? std::vector<std::string>{"z1_re", "z1_im", "z2_re",
                                                                   "z2_im"}
                                        : default_labels(a.rows());
  return SignalMatrix(std::move(channels), rate_hz, std::move(labels));
}

SyntheticDataset generate(const SyntheticScenario& scenario) {
  SourceSpec cardiac = scenario.cardiac;
  cardiac.kind = SourceKind::cardiac;
  SourceSpec respiratory = scenario.respiratory;
  respiratory.kind = SourceKind::respiratory;

  SourceSignal c = gen_cardiac(cardiac, scenario.samples, scenario.rate_hz,
                               derive_seed(scenario.seed, 1));
  SourceSignal r = gen_respiratory(respiratory, scenario.samples, scenario.rate_hz,
                                   derive_seed(scenario.seed, 2));
  const Matrix sources = Matrix::from_columns({c.values, r.values});

  SyntheticDataset out{
      mix(sources, scenario.mixture, scenario.rate_hz, derive_seed(scenario.seed, 3)),
      SignalMatrix(inject_correlation(sources, scenario.mixture.correlation_injection),
                   scenario.rate_hz, {"cardiac", "respiratory"}),
      scenario.mixture.mixing,
      {}};
  out.warnings = std::move(c.warnings);
  out.warnings.insert(out.warnings.end(), r.warnings.begin(), r.warnings.end());
  return out;
}

}  // namespace ebi
