// run.hpp — command orchestration: single runs, sweeps, artifact emission.
#pragma once

#include "digirabi/config.hpp"
#include "digirabi/dynamics.hpp"

#include <string>
#include <vector>

namespace digirabi::run {

// In-memory outcome of one command; run() adds the file I/O.
struct RunResult {
  config::json summary;               // versioned summary document
  std::string csv_name;               // empty when the command emits no CSV
  std::string csv;
  dynamics::Trajectory traj;          // simulate commands only
  std::vector<double> fidelity;       // aligned with the trajectory grid
  bool truncation_flagged = false;
  std::vector<std::string> warnings;
};

RunResult run_core(const config::RunSpec& spec);

// Executes the spec and writes summary.json plus the command's CSV into the
// resolved output directory: `out_override` (--out), else spec.out_dir,
// else $DIGIRABI_OUT, else ./out.  Exit codes: 0 success, 1 runtime failure
// or truncation under policy "error", 3 truncation under policy "degraded".
// Config errors surface as std::invalid_argument before any run starts.
int run(const config::RunSpec& spec, const std::string& out_override = "");

// Machine-readable error report on stderr: {"error":{"type":...,"message":...}}.
void emit_error_json(const std::string& type, const std::string& message);

} // namespace digirabi::run
