// ebi-unmix: command-line front end for the separation pipeline.

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ebi_unmix/csv_io.hpp"
#include "ebi_unmix/dsp.hpp"
#include "ebi_unmix/error.hpp"
#include "ebi_unmix/metrics.hpp"
#include "ebi_unmix/pipeline.hpp"
#include "ebi_unmix/report.hpp"
#include "ebi_unmix/synth.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitFrameError = 2;
constexpr double kDefaultVarianceThreshold = 0.99;

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("EBI_UNMIX_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(raw, &used);
    if (used == std::string(raw).size()) return v;
  } catch (const std::exception&) {
  }
  throw ebi::Error(ebi::ErrorKind::invalid_input,
                   std::string("EBI_UNMIX_SEED is not an unsigned integer: '") + raw + "'");
}

// Flags that shape the pipeline; shared by `run` and `eval`.
struct PipelineFlags {
  std::string config_path;
  std::optional<std::size_t> frame_len, hop, decimate, components, max_iter, jobs;
  std::optional<double> cutoff_hz, tol;
  std::optional<std::string> filter_position, filter_phase, contrast, orthogonalization, mode;
  std::optional<std::uint64_t> seed;
  std::string explained_variance;
  CLI::Option* explained_variance_opt = nullptr;

  void attach(CLI::App& app) {
    app.add_option("--config", config_path, "JSON config file (same keys as the report config)")
        ->check(CLI::ExistingFile);
    app.add_option("--frame-len", frame_len, "samples per frame [10000]");
    app.add_option("--hop", hop, "samples between frame starts [frame length]");
    app.add_option("--decimate", decimate, "decimation factor [10]");
    app.add_option("--cutoff-hz", cutoff_hz, "low-pass cutoff in Hz at the filter's rate [40]");
    app.add_option("--filter-position", filter_position,
                   "after_decimate (default) or before_decimate");
    app.add_option("--filter-phase", filter_phase, "causal (default) or zero_phase");
    app.add_option("--components", components, "retained principal components [2]");
    explained_variance_opt =
        app.add_option("--explained-variance", explained_variance,
                       "choose k by explained variance; bare flag means 0.99")
            ->expected(0, 1);
    app.add_option("--contrast", contrast, "logcosh (default) or pow3");
    app.add_option("--orthogonalization", orthogonalization, "symmetric (default) or deflation");
    app.add_option("--tol", tol, "FastICA tolerance [1e-6]");
    app.add_option("--max-iter", max_iter, "FastICA iteration cap [200]");
    app.add_option("--seed", seed, "FastICA seed (fallback: EBI_UNMIX_SEED, then 0)");
    app.add_option("--mode", mode, "pca_then_ica (default), pca_only or ica_only");
    app.add_option("--jobs", jobs, "worker threads over frames [1]");
  }

  // Defaults, then the config file, then explicit flags. The environment seed
  // only applies when neither the file nor a flag set one.
  ebi::PipelineConfig resolve() const {
    ebi::PipelineConfig c;
    bool seed_set = false;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      ebi::Json j;
      try {
        j = ebi::Json::parse(in);
      } catch (const ebi::Json::exception& e) {
        throw ebi::Error(ebi::ErrorKind::invalid_input,
                         "cannot parse " + config_path + ": " + e.what());
      }
      ebi::apply_config_json(j, c);
      seed_set = j.contains("seed");
    }
    if (frame_len) c.frame_len = *frame_len;
    if (hop) c.hop = *hop;
    if (decimate) c.decimation_factor = *decimate;
    if (cutoff_hz) c.cutoff_hz = *cutoff_hz;
    if (filter_position) c.filter_position = ebi::parse_filter_position(*filter_position);
    if (filter_phase) c.filter_phase = ebi::parse_filter_phase(*filter_phase);
    if (components) c.retained_components = *components;
    if (explained_variance_opt->count() > 0) {
      c.variance_threshold =
          explained_variance.empty() ? kDefaultVarianceThreshold : std::stod(explained_variance);
    }
    if (contrast) c.ica.contrast = ebi::parse_contrast(*contrast);
    if (orthogonalization) {
      c.ica.orthogonalization = ebi::parse_orthogonalization(*orthogonalization);
    }
    if (tol) c.ica.tolerance = *tol;
    if (max_iter) c.ica.max_iterations = *max_iter;
    if (mode) c.mode = ebi::parse_mode(*mode);
    if (jobs) c.jobs = *jobs;
    if (seed) {
      c.ica.seed = *seed;
    } else if (!seed_set) {
      if (auto e = env_seed()) c.ica.seed = *e;
    }
    c.validate();
    return c;
  }
};

int cmd_run(const PipelineFlags& flags, const std::string& input, const std::string& truth_path,
            const std::string& mixing_path, const std::string& out_dir, std::string stem) {
  const ebi::PipelineConfig config = flags.resolve();
  const ebi::SignalMatrix signal = ebi::read_csv(input);
  std::optional<ebi::SignalMatrix> truth;
  if (!truth_path.empty()) truth = ebi::read_csv(truth_path);
  std::optional<ebi::Matrix> mixing;
  if (!mixing_path.empty()) mixing = ebi::read_matrix_csv(mixing_path).values;
  if (stem.empty()) stem = fs::path(input).stem().string();

  const ebi::RunReport report = ebi::run_pipeline(signal, config, truth, mixing);
  const auto written = ebi::write_run_outputs(report, out_dir, stem);

  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& f : report.frames) {
    std::cout << "frame " << f.index << " @" << f.start_sample << ": ";
    if (!f.ok) {
      std::cout << "ERROR in " << f.failed_stage << ": " << f.error << '\n';
      continue;
    }
    std::cout << "k=" << f.retained << " explained=" << f.explained_variance;
    if (f.convergence) {
      std::cout << " iterations=" << f.convergence->iterations_used
                << (f.convergence->converged ? " converged" : " NOT converged");
    }
    if (f.separation) {
      std::cout << " min|rho|=" << f.separation->min_abs_correlation();
      if (f.separation->amari_index) std::cout << " amari=" << *f.separation->amari_index;
    }
    std::cout << '\n';
  }
  std::cout << "wrote " << written.size() << " files to " << out_dir << '\n';
  return report.has_errors() ? kExitFrameError : kExitOk;
}

int cmd_synth(const ebi::SyntheticScenario& scenario, const std::string& out_dir,
              const std::string& stem) {
  const ebi::SyntheticDataset d = ebi::generate(scenario);
  fs::create_directories(out_dir);
  const fs::path base(out_dir);
  const ebi::Metadata meta{{"seed", std::to_string(scenario.seed)}};
  ebi::write_csv(d.mixtures, base / (stem + ".csv"), meta);
  ebi::write_csv(d.truth, base / (stem + "_truth.csv"), meta);
  ebi::write_matrix_csv(d.mixing, d.truth.channel_labels(), base / (stem + "_mixing.csv"));
  for (const auto& w : d.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "wrote " << (base / (stem + ".csv")).string() << ", " << stem << "_truth.csv, "
            << stem << "_mixing.csv (" << d.mixtures.length() << " samples, "
            << d.mixtures.channels() << " channels)\n";
  return kExitOk;
}

std::optional<std::size_t> metadata_count(const ebi::Metadata& meta, const std::string& key) {
  for (const auto& [k, v] : meta) {
    if (k == key) return static_cast<std::size_t>(std::stoull(v));
  }
  return std::nullopt;
}

// Scores one components CSV against raw truth. When the truth is at the
// input rate it is cut at the frame's start_sample and preprocessed with the
// same settings as the run.
int cmd_eval(const PipelineFlags& flags, const std::string& input, const std::string& truth_path,
             const std::string& out_path) {
  const ebi::CsvDocument comps = ebi::read_csv_document(input);
  ebi::SignalMatrix truth = ebi::read_csv(truth_path);
  const std::size_t n = comps.signal.length();

  if (truth.length() != n || truth.sample_rate_hz() != comps.signal.sample_rate_hz()) {
    ebi::PipelineConfig config = flags.resolve();
    const std::size_t start = metadata_count(comps.metadata, "start_sample").value_or(0);
    if (start + config.frame_len > truth.length()) {
      throw ebi::Error(ebi::ErrorKind::dimension,
                       "truth is too short for a frame starting at sample " +
                           std::to_string(start));
    }
    config.hop = 0;
    const auto segment = truth.with_samples(truth.samples().row_block(start, config.frame_len));
    truth = ebi::preprocess(segment, config).frames.at(0);
  }
  if (truth.length() != n) {
    throw ebi::Error(ebi::ErrorKind::dimension,
                     "preprocessed truth has " + std::to_string(truth.length()) +
                         " samples, components have " + std::to_string(n));
  }

  const auto report = ebi::match_components(comps.signal.samples(), truth.samples());
  const std::string text = ebi::separation_to_json(report).dump(2);
  if (out_path.empty()) {
    std::cout << text << '\n';
  } else {
    std::ofstream out(out_path);
    out << text << '\n';
    if (!out) throw ebi::Error(ebi::ErrorKind::invalid_input, "write failed for " + out_path);
  }
  for (const auto& m : report.matches) {
    std::cerr << comps.signal.channel_labels()[m.estimated] << " -> "
              << truth.channel_labels()[m.truth] << ": rho=" << m.correlation
              << " leakage=" << m.leakage << '\n';
  }
  return kExitOk;
}

int cmd_filter_design(double cutoff_hz, double rate_hz, std::size_t points) {
  const ebi::BiquadCoefficients c =
      ebi::design_filter({2, cutoff_hz, ebi::FilterKind::low_pass}, rate_hz);
  std::cout << "# butterworth low-pass, order 2, cutoff_hz=" << cutoff_hz
            << " rate_hz=" << rate_hz << '\n'
            << "# b0=" << ebi::format_double(c.b0) << " b1=" << ebi::format_double(c.b1)
            << " b2=" << ebi::format_double(c.b2) << '\n'
            << "# a0=1 a1=" << ebi::format_double(c.a1) << " a2=" << ebi::format_double(c.a2)
            << '\n';
  const auto poles = c.poles();
  std::cout << "# poles=" << poles[0].real() << (poles[0].imag() < 0 ? "" : "+")
            << poles[0].imag() << "j," << poles[1].real() << (poles[1].imag() < 0 ? "" : "+")
            << poles[1].imag() << "j stable=" << (c.stable() ? "yes" : "no") << '\n';
  std::cout << "freq_hz,magnitude,magnitude_db,phase_rad\n";
  const double nyquist = rate_hz / 2.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double f = points == 1 ? 0.0 : nyquist * static_cast<double>(i) /
                                             static_cast<double>(points - 1);
    const std::complex<double> h = c.response(f, rate_hz);
    const double mag = std::abs(h);
    std::cout << ebi::format_double(f) << ',' << ebi::format_double(mag) << ','
              << ebi::format_double(20.0 * std::log10(mag)) << ','
              << ebi::format_double(std::arg(h)) << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cardiac/respiratory separation for multichannel bio-impedance recordings"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "frame, decimate, filter, PCA and FastICA a CSV recording");
  PipelineFlags run_flags;
  std::string run_input, run_truth, run_mixing, run_out = ".", run_stem;
  run->add_option("--input", run_input, "input CSV")->required()->check(CLI::ExistingFile);
  run->add_option("--truth", run_truth, "ground-truth sources CSV (same rate and length)")
      ->check(CLI::ExistingFile);
  run->add_option("--mixing", run_mixing, "true mixing matrix CSV, enables the Amari index")
      ->check(CLI::ExistingFile);
  run->add_option("--out-dir", run_out, "output directory [.]");
  run->add_option("--stem", run_stem, "output file prefix [input file stem]");
  run_flags.attach(*run);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic mixture with ground truth");
  ebi::SyntheticScenario scenario;
  std::optional<std::uint64_t> synth_seed;
  std::string synth_out = ".", synth_stem = "synth";
  synth->add_option("--samples", scenario.samples, "samples [25000]");
  synth->add_option("--rate", scenario.rate_hz, "sample rate in Hz [1000]");
  synth->add_option("--seed", synth_seed, "seed (fallback: EBI_UNMIX_SEED, then 0)");
  synth->add_option("--cardiac-hz", scenario.cardiac.fundamental_hz, "heart rate in Hz [1.2]");
  synth->add_option("--cardiac-amplitude", scenario.cardiac.amplitude, "[1]");
  synth->add_option("--jitter-pct", scenario.cardiac.jitter_pct, "beat interval jitter [5]");
  synth->add_option("--resp-hz", scenario.respiratory.fundamental_hz,
                    "breathing rate in Hz [0.25]");
  synth->add_option("--resp-amplitude", scenario.respiratory.amplitude, "[1]");
  synth->add_option("--resp-harmonics", scenario.respiratory.harmonics, "[2]");
  synth->add_option("--noise", scenario.mixture.noise_sigma, "channel noise sigma [0.05]");
  synth->add_option("--correlation", scenario.mixture.correlation_injection,
                    "respiratory modulation of cardiac pulses, in [0, 1) [0]");
  synth->add_option("--out-dir", synth_out, "output directory [.]");
  synth->add_option("--stem", synth_stem, "output file prefix [synth]");

  // eval
  auto* eval = app.add_subcommand("eval", "score a components CSV against ground truth");
  PipelineFlags eval_flags;
  std::string eval_input, eval_truth, eval_out;
  eval->add_option("--input", eval_input, "components CSV written by run")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--truth", eval_truth, "ground-truth sources CSV")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--out", eval_out, "write the JSON here instead of stdout");
  eval_flags.attach(*eval);

  // filter-design
  auto* design = app.add_subcommand("filter-design", "print biquad coefficients and response");
  double design_cutoff = 40.0, design_rate = 100.0;
  std::size_t design_points = 51;
  design->add_option("--cutoff-hz", design_cutoff, "cutoff in Hz [40]");
  design->add_option("--rate", design_rate, "sample rate in Hz [100, i.e. 1000 Hz / 10]");
  design->add_option("--points", design_points, "response table rows, 0 to Nyquist [51]")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and friends exit 0; every usage error maps to 1.
    return app.exit(e) == 0 ? kExitOk : kExitFailure;
  }

  try {
    if (*run) return cmd_run(run_flags, run_input, run_truth, run_mixing, run_out, run_stem);
    if (*synth) {
      if (synth_seed) {
        scenario.seed = *synth_seed;
      } else if (auto e = env_seed()) {
        scenario.seed = *e;
      }
      return cmd_synth(scenario, synth_out, synth_stem);
    }
    if (*eval) return cmd_eval(eval_flags, eval_input, eval_truth, eval_out);
    if (*design) return cmd_filter_design(design_cutoff, design_rate, design_points);
  } catch (const ebi::Error& e) {
    std::cerr << "error (" << ebi::to_string(e.kind()) << "): " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
