#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ebi_unmix/matrix.hpp"
#include "ebi_unmix/signal.hpp"

namespace ebi {

enum class SourceKind { cardiac, respiratory };

struct SourceSpec {
  SourceKind kind = SourceKind::cardiac;
  double fundamental_hz = 1.2;
  double amplitude = 1.0;
  std::size_t harmonics = 1;
  /// Per-beat interval randomization, percent of the nominal period.
  double jitter_pct = 0.0;

  static SourceSpec cardiac_default();
  static SourceSpec respiratory_default();
};

struct SourceSignal {
  std::vector<double> values;
  std::vector<std::string> warnings;
};

/// Full width at half maximum of the Gaussian pulse placed at every beat.
inline constexpr double kPulseFwhmSeconds = 0.060;
/// Standard deviation matching kPulseFwhmSeconds (FWHM = 2·√(2 ln 2)·σ).
inline const double kPulseSigmaSeconds = kPulseFwhmSeconds / (2.0 * std::sqrt(2.0 * std::log(2.0)));

/// Quasi-periodic Gaussian pulse train scaled to zero mean and standard
/// deviation `amplitude`.
SourceSignal gen_cardiac(const SourceSpec& spec, std::size_t n, double rate_hz,
                         std::uint64_t seed);

/// Σ_m (1/m)·sin(2π·m·f·t + φ_m) with seeded phases, scaled to zero mean and
/// standard deviation `amplitude`. Harmonics at or above Nyquist are dropped
/// with a warning.
SourceSignal gen_respiratory(const SourceSpec& spec, std::size_t n, double rate_hz,
                             std::uint64_t seed);

struct MixtureSpec {
  Matrix mixing = default_mixing();
  double noise_sigma = 0.05;
  /// Strength with which the respiratory source modulates the cardiac pulse
  /// height; 0 keeps the sources independent.
  double correlation_injection = 0.0;

  static Matrix default_mixing();
};

/// Column 0 of `sources` is the cardiac source and column 1 the
/// respiratory one. Returns the sources after respiratory amplitude
/// modulation of the cardiac pulses: b + (c - b)(1 + strength·r), where b is
/// the pulse baseline (minimum of the cardiac column).
Matrix inject_correlation(const Matrix& sources, double strength);

/// channels = inject_correlation(sources)·mixingᵀ + N(0, σ²) noise.
/// Throws Error(invalid_spec) when the mixing matrix is rank deficient or
/// does not match the source count.
SignalMatrix mix(const Matrix& sources, const MixtureSpec& spec, double rate_hz,
                 std::uint64_t seed);

struct SyntheticScenario {
  std::size_t samples = 25000;
  double rate_hz = 1000.0;
  SourceSpec cardiac = SourceSpec::cardiac_default();
  SourceSpec respiratory = SourceSpec::respiratory_default();
  MixtureSpec mixture;
  std::uint64_t seed = 0;
};

struct SyntheticDataset {
  SignalMatrix mixtures;  // n × p observed channels
  SignalMatrix truth;     // n × 2 sources as mixed (cardiac, respiratory)
  Matrix mixing;          // p × 2
  std::vector<std::string> warnings;
};

SyntheticDataset generate(const SyntheticScenario& scenario);

/// Derives an independent stream seed; used to split one user seed into
/// per-generator and per-frame seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace ebi
