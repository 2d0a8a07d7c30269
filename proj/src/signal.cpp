#include "ebi_unmix/signal.hpp"

#include <cmath>

#include "ebi_unmix/error.hpp"

namespace ebi {

SignalMatrix::SignalMatrix(Matrix samples, double sample_rate_hz,
                           std::vector<std::string> channel_labels)
    : samples_(std::move(samples)),
      sample_rate_hz_(sample_rate_hz),
      labels_(std::move(channel_labels)) {
  if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_)) {
    throw Error(ErrorKind::invalid_input, "sample rate must be positive");
  }
  if (labels_.size() != samples_.cols()) {
    throw Error(ErrorKind::dimension, "expected " + std::to_string(samples_.cols()) +
                                          " channel labels, got " +
                                          std::to_string(labels_.size()));
  }
}

SignalMatrix::SignalMatrix(Matrix samples, double sample_rate_hz)
    : SignalMatrix(samples, sample_rate_hz, default_labels(samples.cols())) {}

SignalMatrix SignalMatrix::with_samples(Matrix samples) const {
  return SignalMatrix(std::move(samples), sample_rate_hz_, labels_);
}

std::vector<std::string> default_labels(std::size_t count, const std::string& prefix) {
  std::vector<std::string> labels;
  labels.reserve(count);
  for (std::size_t i = 0; i < count; ++i) labels.push_back(prefix + std::to_string(i + 1));
  return labels;
}

}  // namespace ebi
