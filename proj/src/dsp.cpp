#include "ebi_unmix/dsp.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "ebi_unmix/error.hpp"

namespace ebi {

std::complex<double> BiquadCoefficients::response(double freq_hz, double sample_rate_hz) const {
  const double omega = 2.0 * std::numbers::pi * freq_hz / sample_rate_hz;
  const std::complex<double> z1 = std::polar(1.0, -omega);
  const std::complex<double> z2 = z1 * z1;
  return (b0 + b1 * z1 + b2 * z2) / (1.0 + a1 * z1 + a2 * z2);
}

double BiquadCoefficients::dc_gain() const { return (b0 + b1 + b2) / (1.0 + a1 + a2); }

std::array<std::complex<double>, 2> BiquadCoefficients::poles() const {
  const std::complex<double> disc = std::sqrt(std::complex<double>(a1 * a1 - 4.0 * a2, 0.0));
  return {(-a1 + disc) / 2.0, (-a1 - disc) / 2.0};
}

bool BiquadCoefficients::stable() const {
  for (const auto& p : poles()) {
    if (!(std::abs(p) < 1.0)) return false;
  }
  return true;
}

FrameSet frame_signal(const SignalMatrix& signal, const FramePlan& plan) {
  if (plan.frame_len == 0 || plan.hop == 0) {
    throw Error(ErrorKind::invalid_input, "frame length and hop must be at least 1");
  }
  FrameSet out;
  const std::size_t n = signal.length();
  if (plan.frame_len > n) {
    out.too_short = true;
    out.dropped = n;
    return out;
  }
  std::size_t start = 0;
  for (; start + plan.frame_len <= n; start += plan.hop) {
    out.frames.push_back(signal.with_samples(signal.samples().row_block(start, plan.frame_len)));
    out.starts.push_back(start);
  }
  const std::size_t covered_end = out.starts.back() + plan.frame_len;
  out.dropped = n - covered_end;
  return out;
}

SignalMatrix decimate(const SignalMatrix& signal, std::size_t factor) {
  if (factor == 0) throw Error(ErrorKind::invalid_input, "decimation factor must be at least 1");
  if (factor == 1) return signal;
  const std::size_t n = signal.length();
  const std::size_t p = signal.channels();
  const std::size_t kept = (n + factor - 1) / factor;
  std::vector<double> values;
  values.reserve(kept * p);
  for (std::size_t r = 0; r < n; r += factor) {
    auto row = signal.samples().row(r);
    values.insert(values.end(), row.begin(), row.end());
  }
  return SignalMatrix(Matrix(kept, p, std::move(values)),
                      signal.sample_rate_hz() / static_cast<double>(factor),
                      signal.channel_labels());
}

BiquadCoefficients design_butterworth_lp2(double cutoff_hz, double sample_rate_hz) {
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
    throw Error(ErrorKind::filter_design, "sample rate must be positive");
  }
  if (!(cutoff_hz > 0.0) || !(cutoff_hz < sample_rate_hz / 2.0)) {
    throw Error(ErrorKind::filter_design,
                "cutoff " + message_number(cutoff_hz) + " Hz must lie in (0, " +
                    message_number(sample_rate_hz / 2.0) + ") Hz");
  }
  const double k = std::tan(std::numbers::pi * cutoff_hz / sample_rate_hz);
  const double k2 = k * k;
  const double norm = 1.0 / (1.0 + std::numbers::sqrt2 * k + k2);
  BiquadCoefficients c;
  c.b0 = k2 * norm;
  c.b1 = 2.0 * c.b0;
  c.b2 = c.b0;
  c.a1 = 2.0 * (k2 - 1.0) * norm;
  c.a2 = (1.0 - std::numbers::sqrt2 * k + k2) * norm;
  return c;
}

BiquadCoefficients design_filter(const FilterSpec& spec, double sample_rate_hz) {
  if (spec.order != 2 || spec.kind != FilterKind::low_pass) {
    throw Error(ErrorKind::filter_design, "only second-order low-pass Butterworth is supported");
  }
  return design_butterworth_lp2(spec.cutoff_hz, sample_rate_hz);
}

void filter_in_place(std::span<double> x, const BiquadCoefficients& c) {
  double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;
  for (double& v : x) {
    const double x0 = v;
    const double y0 = c.b0 * x0 + c.b1 * x1 + c.b2 * x2 - c.a1 * y1 - c.a2 * y2;
    x2 = x1;
    x1 = x0;
    y2 = y1;
    y1 = y0;
    v = y0;
  }
}

namespace {

SignalMatrix filter_channels(const SignalMatrix& signal, const BiquadCoefficients& coeffs,
                             bool zero_phase) {
  if (!coeffs.stable()) {
    throw Error(ErrorKind::unstable_filter, "filter poles are not inside the unit circle");
  }
  Matrix out = signal.samples();
  for (std::size_t c = 0; c < out.cols(); ++c) {
    std::vector<double> ch = out.column(c);
    filter_in_place(ch, coeffs);
    if (zero_phase) {
      std::reverse(ch.begin(), ch.end());
      filter_in_place(ch, coeffs);
      std::reverse(ch.begin(), ch.end());
    }
    out.set_column(c, ch);
  }
  return signal.with_samples(std::move(out));
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

SignalMatrix apply_filter(const SignalMatrix& signal, const BiquadCoefficients& coeffs) {
  return filter_channels(signal, coeffs, false);
}

SignalMatrix apply_filter_zero_phase(const SignalMatrix& signal,
                                     const BiquadCoefficients& coeffs) {
  return filter_channels(signal, coeffs, true);
}

Periodogram periodogram(std::span<const double> x, double sample_rate_hz) {
  const std::size_t n = x.size();
  if (n < 2) throw Error(ErrorKind::insufficient_data, "periodogram needs at least 2 samples");

  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);

  const std::size_t bins = n / 2 + 1;
  double* in = fftw_alloc_real(n);
  fftw_complex* spectrum = fftw_alloc_complex(bins);
  fftw_plan plan;
  {
    // The FFTW planner is not thread-safe; execution is.
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, spectrum, FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < n; ++i) in[i] = x[i] - mean;
  fftw_execute(plan);

  Periodogram pg;
  pg.freq_hz.resize(bins);
  pg.power.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    pg.freq_hz[k] = static_cast<double>(k) * sample_rate_hz / static_cast<double>(n);
    pg.power[k] = (spectrum[k][0] * spectrum[k][0] + spectrum[k][1] * spectrum[k][1]) /
                  static_cast<double>(n);
  }
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(spectrum);
  fftw_free(in);
  return pg;
}

double peak_frequency(const Periodogram& pg) {
  std::size_t best = 1;
  for (std::size_t k = 2; k < pg.power.size(); ++k) {
    if (pg.power[k] > pg.power[best]) best = k;
  }
  return pg.freq_hz.at(best);
}

}  // namespace ebi
