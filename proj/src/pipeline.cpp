#include "ebi_unmix/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <thread>

#include "ebi_unmix/error.hpp"
#include "ebi_unmix/pca.hpp"
#include "ebi_unmix/synth.hpp"

namespace ebi {

const char* to_string(FilterPosition p) {
  return p == FilterPosition::after_decimate ? "after_decimate" : "before_decimate";
}

const char* to_string(FilterPhase p) { return p == FilterPhase::causal ? "causal" : "zero_phase"; }

const char* to_string(PipelineMode m) {
  switch (m) {
    case PipelineMode::pca_only: return "pca_only";
    case PipelineMode::ica_only: return "ica_only";
    case PipelineMode::pca_then_ica: return "pca_then_ica";
  }
  return "unknown";
}

FilterPosition parse_filter_position(const std::string& s) {
  if (s == "after_decimate") return FilterPosition::after_decimate;
  if (s == "before_decimate") return FilterPosition::before_decimate;
  throw Error(ErrorKind::invalid_input, "unknown filter position '" + s + "'");
}

FilterPhase parse_filter_phase(const std::string& s) {
  if (s == "causal") return FilterPhase::causal;
  if (s == "zero_phase") return FilterPhase::zero_phase;
  throw Error(ErrorKind::invalid_input, "unknown filter phase '" + s + "'");
}

PipelineMode parse_mode(const std::string& s) {
  if (s == "pca_only") return PipelineMode::pca_only;
  if (s == "ica_only") return PipelineMode::ica_only;
  if (s == "pca_then_ica") return PipelineMode::pca_then_ica;
  throw Error(ErrorKind::invalid_input, "unknown mode '" + s + "'");
}

void PipelineConfig::validate() const {
  if (frame_len == 0 || decimation_factor == 0 || retained_components == 0 || jobs == 0) {
    throw Error(ErrorKind::invalid_input, "frame length, decimation, components and jobs must be >= 1");
  }
  if (filter_order != 2) {
    throw Error(ErrorKind::invalid_input, "filter order is fixed at 2");
  }
  if (variance_threshold && !(*variance_threshold > 0.0 && *variance_threshold <= 1.0)) {
    throw Error(ErrorKind::invalid_input, "explained-variance threshold must lie in (0, 1]");
  }
}

bool RunReport::has_errors() const {
  for (const auto& f : frames) {
    if (!f.ok) return true;
  }
  return false;
}

namespace {

// Error tagged with the pipeline stage that raised it.
struct StageFailure {
  std::string stage;
  std::string message;
};

template <typename F>
auto stage(const char* name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const std::exception& e) {
    throw StageFailure{name, e.what()};
  }
}

SignalMatrix filter_with(const SignalMatrix& s, const PipelineConfig& config) {
  const FilterSpec spec{config.filter_order, config.cutoff_hz, FilterKind::low_pass};
  const BiquadCoefficients coeffs = design_filter(spec, s.sample_rate_hz());
  return config.filter_phase == FilterPhase::causal ? apply_filter(s, coeffs)
                                                    : apply_filter_zero_phase(s, coeffs);
}

SignalMatrix preprocess_frame(const SignalMatrix& frame, const PipelineConfig& config) {
  if (config.filter_position == FilterPosition::after_decimate) {
    SignalMatrix d = stage("decimate", [&] { return decimate(frame, config.decimation_factor); });
    return stage("filter", [&] { return filter_with(d, config); });
  }
  SignalMatrix f = stage("filter", [&] { return filter_with(frame, config); });
  return stage("decimate", [&] { return decimate(f, config.decimation_factor); });
}

std::vector<std::string> component_labels(const char* prefix, std::size_t k) {
  return default_labels(k, prefix);
}

void process_frame(const SignalMatrix& frame, const std::optional<SignalMatrix>& truth_frame,
                   const std::optional<Matrix>& true_mixing, const PipelineConfig& config,
                   FrameResult& out) {
  const SignalMatrix x = preprocess_frame(frame, config);
  const std::size_t p = x.channels();

  const PcaModel pca = stage("pca", [&] { return fit_pca(x, config.retained_components); });
  out.eigenvalues = pca.eigenvalues;

  std::size_t k = std::min(config.retained_components, p);
  if (config.variance_threshold) k = components_for_variance(pca, *config.variance_threshold);
  if (config.mode == PipelineMode::ica_only) k = p;
  out.retained = k;
  out.explained_variance = explained_variance(pca, k);

  Matrix sources(1, 1);
  if (config.mode == PipelineMode::pca_only) {
    sources = stage("pca", [&] { return project(pca, x, k); });
    const Matrix axes = pca.loadings.left_columns(k);
    out.channel_unmixing = axes.transposed();
    out.mixing_estimate = axes;
    out.components = SignalMatrix(sources, x.sample_rate_hz(), component_labels("pc", k));
  } else {
    const Whitened w = stage("whiten", [&] { return whiten(pca, x, k); });
    IcaConfig ica = config.ica;
    ica.seed = derive_seed(config.ica.seed, out.index);
    IcaModel model = stage("ica", [&] { return fit_fastica(w.white, ica); });
    sources = stage("separate", [&] { return separate(model, w.white); });
    model.mixing_estimate = stage("separate", [&] { return reconstruct_mixing(model, w.dewhitening); });
    out.channel_unmixing = model.unmixing * w.whitening.transposed();
    out.mixing_estimate = model.mixing_estimate;
    out.unmixing = model.unmixing;
    out.convergence = model.convergence;
    out.components = SignalMatrix(sources, x.sample_rate_hz(), component_labels("ic", k));
  }

  if (truth_frame) {
    const SignalMatrix t = preprocess_frame(*truth_frame, config);
    out.separation = stage("metrics", [&] { return match_components(sources, t.samples()); });
    if (true_mixing && out.channel_unmixing->rows() == true_mixing->cols()) {
      out.separation->amari_index =
          stage("metrics", [&] { return amari_index(*out.channel_unmixing, *true_mixing); });
    }
  }
}

}  // namespace

Preprocessed preprocess(const SignalMatrix& input, const PipelineConfig& config) {
  config.validate();
  FrameSet set = frame_signal(input, config.frame_plan());
  Preprocessed out;
  out.starts = std::move(set.starts);
  out.dropped = set.dropped;
  out.too_short = set.too_short;
  for (const auto& f : set.frames) {
    try {
      out.frames.push_back(preprocess_frame(f, config));
    } catch (const StageFailure& e) {
      throw Error(ErrorKind::invalid_input, e.stage + ": " + e.message);
    }
  }
  return out;
}

RunReport run_pipeline(const SignalMatrix& input, const PipelineConfig& config,
                       const std::optional<SignalMatrix>& truth,
                       const std::optional<Matrix>& true_mixing) {
  config.validate();
  if (config.mode != PipelineMode::ica_only && input.channels() < config.retained_components) {
    throw Error(ErrorKind::invalid_input,
                "input has " + std::to_string(input.channels()) + " channels but " +
                    std::to_string(config.retained_components) + " components were requested");
  }
  if (truth && truth->length() != input.length()) {
    throw Error(ErrorKind::dimension, "truth has " + std::to_string(truth->length()) +
                                          " samples, input has " +
                                          std::to_string(input.length()));
  }
  if (true_mixing && true_mixing->rows() != input.channels()) {
    throw Error(ErrorKind::dimension, "true mixing rows must equal the input channel count");
  }

  RunReport report;
  report.config = config;
  report.input_samples = input.length();
  report.input_channels = input.channels();

  const FramePlan plan = config.frame_plan();
  FrameSet frames = frame_signal(input, plan);
  std::optional<FrameSet> truth_frames;
  if (truth) truth_frames = frame_signal(*truth, plan);
  report.dropped_samples = frames.dropped;
  if (frames.too_short) {
    report.warnings.push_back("input has " + std::to_string(input.length()) +
                              " samples, fewer than one frame of " +
                              std::to_string(config.frame_len));
  } else if (frames.dropped > 0) {
    report.warnings.push_back(std::to_string(frames.dropped) + " trailing samples dropped");
  }

  report.frames.resize(frames.frames.size());
  auto run_one = [&](std::size_t i) {
    FrameResult& r = report.frames[i];
    r.index = i;
    r.start_sample = frames.starts[i];
    const auto t0 = std::chrono::steady_clock::now();
    std::optional<SignalMatrix> truth_frame;
    if (truth_frames) truth_frame = truth_frames->frames[i];
    try {
      process_frame(frames.frames[i], truth_frame, true_mixing, config, r);
      r.ok = true;
    } catch (const StageFailure& e) {
      r.ok = false;
      r.failed_stage = e.stage;
      r.error = e.message;
    } catch (const std::exception& e) {
      r.ok = false;
      r.failed_stage = "pipeline";
      r.error = e.what();
    }
    r.timing_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                      .count();
  };

  const std::size_t workers = std::min(config.jobs, report.frames.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < report.frames.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < report.frames.size(); i = next++) run_one(i);
      });
    }
  }
  return report;
}

}  // namespace ebi
