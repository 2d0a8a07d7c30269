#pragma once

#include <string>
#include <vector>

#include "ebi_unmix/matrix.hpp"

namespace ebi {

/// Multichannel time series: one row per sample, one column per channel.
class SignalMatrix {
 public:
  SignalMatrix(Matrix samples, double sample_rate_hz, std::vector<std::string> channel_labels);
  /// Labels default to ch1..chp.
  SignalMatrix(Matrix samples, double sample_rate_hz);

  const Matrix& samples() const noexcept { return samples_; }
  double sample_rate_hz() const noexcept { return sample_rate_hz_; }
  const std::vector<std::string>& channel_labels() const noexcept { return labels_; }

  std::size_t length() const noexcept { return samples_.rows(); }
  std::size_t channels() const noexcept { return samples_.cols(); }

  /// Same rate and labels, new sample block.
  SignalMatrix with_samples(Matrix samples) const;

  bool operator==(const SignalMatrix&) const = default;

 private:
  Matrix samples_;
  double sample_rate_hz_;
  std::vector<std::string> labels_;
};

std::vector<std::string> default_labels(std::size_t count, const std::string& prefix = "ch");

}  // namespace ebi
