#include "ebi_unmix/report.hpp"

#include <fstream>

#include "ebi_unmix/csv_io.hpp"
#include "ebi_unmix/dsp.hpp"
#include "ebi_unmix/error.hpp"

namespace ebi {

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    rows.push_back(Json(std::vector<double>(row.begin(), row.end())));
  }
  return rows;
}

Json convergence_to_json(const ConvergenceReport& c) {
  return Json{{"iterations_used", c.iterations_used},
              {"final_delta", c.final_delta},
              {"converged", c.converged},
              {"per_iteration_deltas", c.per_iteration_deltas}};
}

Json separation_to_json(const SeparationReport& s) {
  Json assignment = Json::array();
  Json correlations = Json::array();
  Json leakage = Json::array();
  for (const auto& m : s.matches) {
    assignment.push_back(Json::array({m.estimated, m.truth}));
    correlations.push_back(m.correlation);
    leakage.push_back(m.leakage);
  }
  Json j{{"assignment", assignment},
         {"correlations", correlations},
         {"leakage", leakage},
         {"min_abs_correlation", s.min_abs_correlation()}};
  j["amari_index"] = s.amari_index ? Json(*s.amari_index) : Json(nullptr);
  return j;
}

Json config_to_json(const PipelineConfig& c) {
  Json j{{"frame_len", c.frame_len},
         {"hop", c.frame_plan().hop},
         {"decimate", c.decimation_factor},
         {"filter_order", c.filter_order},
         {"cutoff_hz", c.cutoff_hz},
         {"filter_position", to_string(c.filter_position)},
         {"filter_phase", to_string(c.filter_phase)},
         {"components", c.retained_components}};
  j["explained_variance"] = c.variance_threshold ? Json(*c.variance_threshold) : Json(nullptr);
  j["contrast"] = to_string(c.ica.contrast);
  j["orthogonalization"] = to_string(c.ica.orthogonalization);
  j["tol"] = c.ica.tolerance;
  j["max_iter"] = c.ica.max_iterations;
  j["seed"] = c.ica.seed;
  j["mode"] = to_string(c.mode);
  return j;
}

void apply_config_json(const Json& j, PipelineConfig& c) {
  if (!j.is_object()) throw Error(ErrorKind::invalid_input, "config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "frame_len") c.frame_len = value.get<std::size_t>();
      else if (key == "hop") c.hop = value.get<std::size_t>();
      else if (key == "decimate") c.decimation_factor = value.get<std::size_t>();
      else if (key == "filter_order") c.filter_order = value.get<int>();
      else if (key == "cutoff_hz") c.cutoff_hz = value.get<double>();
      else if (key == "filter_position") c.filter_position = parse_filter_position(value.get<std::string>());
      else if (key == "filter_phase") c.filter_phase = parse_filter_phase(value.get<std::string>());
      else if (key == "components") c.retained_components = value.get<std::size_t>();
      else if (key == "explained_variance") {
        if (value.is_null()) c.variance_threshold.reset();
        else c.variance_threshold = value.get<double>();
      }
      else if (key == "contrast") c.ica.contrast = parse_contrast(value.get<std::string>());
      else if (key == "orthogonalization") c.ica.orthogonalization = parse_orthogonalization(value.get<std::string>());
      else if (key == "tol") c.ica.tolerance = value.get<double>();
      else if (key == "max_iter") c.ica.max_iterations = value.get<std::size_t>();
      else if (key == "seed") c.ica.seed = value.get<std::uint64_t>();
      else if (key == "mode") c.mode = parse_mode(value.get<std::string>());
      else if (key == "jobs") c.jobs = value.get<std::size_t>();
      else throw Error(ErrorKind::invalid_input, "unknown config key '" + key + "'");
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::invalid_input, std::string("bad config value: ") + e.what());
  }
}

Json report_to_json(const RunReport& report) {
  Json frames = Json::array();
  for (const auto& f : report.frames) {
    Json fj{{"index", f.index}, {"start_sample", f.start_sample}};
    if (!f.ok) {
      fj["status"] = "error";
      fj["stage"] = f.failed_stage;
      fj["error"] = f.error;
    } else {
      fj["status"] = "ok";
      fj["eigenvalues"] = f.eigenvalues;
      fj["explained_variance"] = f.explained_variance;
      fj["retained"] = f.retained;
      fj["W"] = f.unmixing ? matrix_to_json(*f.unmixing) : Json(nullptr);
      fj["A_est"] = f.mixing_estimate ? matrix_to_json(*f.mixing_estimate) : Json(nullptr);
      fj["convergence"] = f.convergence ? convergence_to_json(*f.convergence) : Json(nullptr);
      fj["matching"] = f.separation ? separation_to_json(*f.separation) : Json(nullptr);
    }
    fj["timing_ms"] = f.timing_ms;
    frames.push_back(std::move(fj));
  }
  return Json{{"config", config_to_json(report.config)},
              {"input",
               {{"samples", report.input_samples},
                {"channels", report.input_channels},
                {"dropped_samples", report.dropped_samples}}},
              {"warnings", report.warnings},
              {"frames", std::move(frames)}};
}

Json strip_timing(const Json& j) {
  if (j.is_object()) {
    Json out = Json::object();
    for (const auto& [key, value] : j.items()) {
      if (key != "timing_ms") out[key] = strip_timing(value);
    }
    return out;
  }
  if (j.is_array()) {
    Json out = Json::array();
    for (const auto& v : j) out.push_back(strip_timing(v));
    return out;
  }
  return j;
}

std::vector<std::filesystem::path> write_run_outputs(const RunReport& report,
                                                     const std::filesystem::path& out_dir,
                                                     const std::string& stem) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  for (const auto& f : report.frames) {
    if (!f.ok || !f.components) continue;
    const SignalMatrix& comps = *f.components;
    const std::string prefix = stem + "_f" + std::to_string(f.index);

    const auto comp_path = out_dir / (prefix + "_components.csv");
    write_csv(comps, comp_path,
              {{"frame", std::to_string(f.index)},
               {"start_sample", std::to_string(f.start_sample)}});
    written.push_back(comp_path);

    const Matrix& m = comps.samples();
    const auto ts_path = out_dir / (prefix + "_timeseries.csv");
    {
      std::ofstream out(ts_path);
      out << "time_s";
      for (const auto& l : comps.channel_labels()) out << ',' << l;
      out << '\n';
      for (std::size_t r = 0; r < m.rows(); ++r) {
        out << format_double(static_cast<double>(r) / comps.sample_rate_hz());
        for (std::size_t c = 0; c < m.cols(); ++c) out << ',' << format_double(m(r, c));
        out << '\n';
      }
      if (!out) throw Error(ErrorKind::invalid_input, "write failed for " + ts_path.string());
    }
    written.push_back(ts_path);

    for (std::size_t c = 0; c < m.cols(); ++c) {
      const Periodogram pg = periodogram(m.column(c), comps.sample_rate_hz());
      const auto pg_path = out_dir / (prefix + "_c" + std::to_string(c) + "_periodogram.csv");
      std::ofstream out(pg_path);
      out << "freq_hz,power\n";
      for (std::size_t b = 0; b < pg.freq_hz.size(); ++b) {
        out << format_double(pg.freq_hz[b]) << ',' << format_double(pg.power[b]) << '\n';
      }
      if (!out) throw Error(ErrorKind::invalid_input, "write failed for " + pg_path.string());
      written.push_back(pg_path);
    }
  }

  const auto report_path = out_dir / (stem + "_report.json");
  std::ofstream out(report_path);
  out << report_to_json(report).dump(2) << '\n';
  if (!out) throw Error(ErrorKind::invalid_input, "write failed for " + report_path.string());
  written.push_back(report_path);
  return written;
}

}  // namespace ebi
