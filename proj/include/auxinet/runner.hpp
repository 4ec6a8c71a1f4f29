#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "auxinet/config.hpp"

namespace auxinet {

// Process exit codes shared between the library entry points and the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvariant = 1;  // a model guarantee was violated
inline constexpr int kExitConfig = 2;     // bad input before any integration
inline constexpr int kExitRuntime = 3;    // solver/integration failure

struct RunOutcome {
  int exit_code = kExitOk;
  std::string message;      // one line for the terminal
  nlohmann::json analysis;  // mirror of analysis.json; empty on early failure
};

// Executes the configured pipeline and writes the artifact set into out_dir
// (created if missing): config_canonical.json plus, per model, graph/grid
// JSON, state CSVs, analysis.json and render.svg. Never throws; failures are
// mapped onto exit codes. Artifacts contain no wall-clock data, so a rerun
// with the same config and seed is byte-identical.
RunOutcome run_config(const RunConfig& c, const std::string& out_dir);
RunOutcome run_config(const nlohmann::json& doc, const std::string& out_dir);
RunOutcome run_config_file(const std::string& config_path,
                           const std::string& out_dir);

// Sets doc at a dotted path ("params.delta", "sources[0].strength"); the
// value string is parsed as JSON when possible and kept as a string
// otherwise. Missing intermediate objects are created.
void set_config_path(nlohmann::json& doc, const std::string& dotted,
                     const std::string& value);

// Runs the template once per axis value (bounded worker pool), one output
// directory per value under out_root, and writes out_root/sweep_summary.csv.
// Individual failures are recorded per row and do not stop the sweep; the
// return value is the worst per-row exit code.
int run_sweep(const nlohmann::json& base_doc, const std::string& axis,
              const std::vector<std::string>& values,
              const std::string& out_root, int jobs);

// Re-derives the analysis from the artifacts in result_dir and compares it
// with the stored analysis.json. Returns kExitOk when everything matches,
// kExitInvariant on mismatch or violated checks, kExitConfig when artifacts
// are missing or unreadable. Prints one line per check to stdout.
int check_dir(const std::string& result_dir);

}  // namespace auxinet
