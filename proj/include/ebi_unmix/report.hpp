#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "ebi_unmix/fastica.hpp"
#include "ebi_unmix/metrics.hpp"
#include "ebi_unmix/pipeline.hpp"

namespace ebi {

using Json = nlohmann::ordered_json;

Json matrix_to_json(const Matrix& m);
Json convergence_to_json(const ConvergenceReport& c);
Json separation_to_json(const SeparationReport& s);
Json config_to_json(const PipelineConfig& c);

/// Overwrites the fields present in `j` (same keys config_to_json writes).
/// Throws Error(invalid_input) on unknown keys or mistyped values.
void apply_config_json(const Json& j, PipelineConfig& c);

/// Report schema: { config, input, warnings, frames: [ { index, start_sample,
/// status, eigenvalues, explained_variance, retained, W, A_est, convergence,
/// matching, timing_ms } ] }.
Json report_to_json(const RunReport& report);

/// Copy of `j` without any "timing_ms" members, for reproducibility checks.
Json strip_timing(const Json& j);

/// Writes, for every successful frame k:
///   <stem>_f<k>_components.csv          components in the input CSV schema
///   <stem>_f<k>_timeseries.csv          time_s plus one column per component
///   <stem>_f<k>_c<j>_periodogram.csv    freq_hz,power for component j
/// and <stem>_report.json. Returns the paths written.
std::vector<std::filesystem::path> write_run_outputs(const RunReport& report,
                                                     const std::filesystem::path& out_dir,
                                                     const std::string& stem);

}  // namespace ebi
