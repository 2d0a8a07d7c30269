#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "ebi_unmix/signal.hpp"

namespace ebi {

struct FramePlan {
  std::size_t frame_len = 10000;
  std::size_t hop = 10000;
};

struct FrameSet {
  std::vector<SignalMatrix> frames;
  /// Sample index at which each frame starts in the source signal.
  std::vector<std::size_t> starts;
  /// Trailing samples not covered by any frame.
  std::size_t dropped = 0;
  /// Set when the signal is shorter than one frame.
  bool too_short = false;
};

/// Second-order section with a0 normalized to 1.
struct BiquadCoefficients {
  double b0 = 1.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;

  std::complex<double> response(double freq_hz, double sample_rate_hz) const;
  double dc_gain() const;
  /// Both poles strictly inside the unit circle.
  bool stable() const;
  std::array<std::complex<double>, 2> poles() const;
};

enum class FilterKind { low_pass };

struct FilterSpec {
  int order = 2;
  double cutoff_hz = 40.0;
  FilterKind kind = FilterKind::low_pass;
};

FrameSet frame_signal(const SignalMatrix& signal, const FramePlan& plan);

/// Keeps samples 0, factor, 2·factor, ... without any anti-alias filtering.
SignalMatrix decimate(const SignalMatrix& signal, std::size_t factor);

/// Bilinear-transform realization of 1/(s² + √2·s + 1) with the cutoff
/// prewarped, so |H| is exactly 1/√2 at `cutoff_hz`.
BiquadCoefficients design_butterworth_lp2(double cutoff_hz, double sample_rate_hz);
BiquadCoefficients design_filter(const FilterSpec& spec, double sample_rate_hz);

/// Causal direct-form I filtering of every channel from zero initial state.
SignalMatrix apply_filter(const SignalMatrix& signal, const BiquadCoefficients& coeffs);
/// Forward pass followed by a time-reversed pass; zero phase, squared magnitude.
SignalMatrix apply_filter_zero_phase(const SignalMatrix& signal, const BiquadCoefficients& coeffs);

void filter_in_place(std::span<double> x, const BiquadCoefficients& coeffs);

struct Periodogram {
  std::vector<double> freq_hz;
  std::vector<double> power;
};

/// One-sided |DFT|²/n of the mean-removed series, bins k·rate/n for
/// k = 0..n/2.
Periodogram periodogram(std::span<const double> x, double sample_rate_hz);

/// Frequency of the largest non-DC periodogram bin.
double peak_frequency(const Periodogram& pg);

}  // namespace ebi
