#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ebi_unmix/dsp.hpp"
#include "ebi_unmix/fastica.hpp"
#include "ebi_unmix/metrics.hpp"
#include "ebi_unmix/signal.hpp"

namespace ebi {

enum class FilterPosition { after_decimate, before_decimate };
enum class FilterPhase { causal, zero_phase };
enum class PipelineMode { pca_only, ica_only, pca_then_ica };

const char* to_string(FilterPosition p);
const char* to_string(FilterPhase p);
const char* to_string(PipelineMode m);
FilterPosition parse_filter_position(const std::string& s);
FilterPhase parse_filter_phase(const std::string& s);
PipelineMode parse_mode(const std::string& s);

struct PipelineConfig {
  std::size_t frame_len = 10000;
  /// 0 means hop = frame_len.
  std::size_t hop = 0;
  std::size_t decimation_factor = 10;
  int filter_order = 2;
  double cutoff_hz = 40.0;
  FilterPosition filter_position = FilterPosition::after_decimate;
  FilterPhase filter_phase = FilterPhase::causal;
  std::size_t retained_components = 2;
  /// When set, overrides retained_components with the smallest count whose
  /// explained variance reaches this fraction.
  std::optional<double> variance_threshold;
  IcaConfig ica;
  PipelineMode mode = PipelineMode::pca_then_ica;
  /// Worker threads over frames; results do not depend on it.
  std::size_t jobs = 1;

  FramePlan frame_plan() const { return {frame_len, hop == 0 ? frame_len : hop}; }
  /// Throws Error(invalid_input) on zero counts or a bad filter order.
  void validate() const;
};

struct FrameResult {
  std::size_t index = 0;
  std::size_t start_sample = 0;
  bool ok = false;
  std::string failed_stage;
  std::string error;

  std::optional<SignalMatrix> components;
  std::vector<double> eigenvalues;
  std::size_t retained = 0;
  double explained_variance = 0.0;
  /// ICA rotation in whitened space (k × k).
  std::optional<Matrix> unmixing;
  /// Channel-space mixing estimate (p × k).
  std::optional<Matrix> mixing_estimate;
  /// Full channel-to-component map (k × p) applied to centered frames.
  std::optional<Matrix> channel_unmixing;
  std::optional<ConvergenceReport> convergence;
  std::optional<SeparationReport> separation;
  double timing_ms = 0.0;
};

struct RunReport {
  PipelineConfig config;
  std::size_t input_samples = 0;
  std::size_t input_channels = 0;
  std::size_t dropped_samples = 0;
  std::vector<std::string> warnings;
  std::vector<FrameResult> frames;

  bool has_errors() const;
};

/// Framing, decimation and low-pass filtering in the configured order.
/// Shared by the signal path and the ground-truth path.
struct Preprocessed {
  std::vector<SignalMatrix> frames;
  std::vector<std::size_t> starts;
  std::size_t dropped = 0;
  bool too_short = false;
};

Preprocessed preprocess(const SignalMatrix& input, const PipelineConfig& config);

/// Runs every frame through preprocessing, PCA and FastICA. Stage failures
/// are recorded per frame and the remaining frames still run. `truth` is
/// preprocessed exactly like `input` and scored against the components;
/// `true_mixing` (p × k_true) additionally enables the Amari index.
RunReport run_pipeline(const SignalMatrix& input, const PipelineConfig& config,
                       const std::optional<SignalMatrix>& truth = std::nullopt,
                       const std::optional<Matrix>& true_mixing = std::nullopt);

}  // namespace ebi
