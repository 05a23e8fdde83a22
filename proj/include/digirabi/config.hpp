// config.hpp — run configuration: parsing, validation, unit conventions.
//
// Configs are flat JSON objects with typed keys.  Every frequency key names
// its unit (_ghz, _mhz, _khz); values are cyclic frequencies nu = omega/2pi
// and are converted to angular rad/ns at the point of use.  The parsed spec
// keeps the config-unit values verbatim so a summary echo re-parses to
// bit-identical settings.
#pragma once

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace digirabi::config {

using json = nlohmann::ordered_json;

// rad/ns per unit of cyclic frequency.
inline constexpr double kGhzToRad = 6.283185307179586476925286766559;
inline constexpr double kMhzToRad = kGhzToRad * 1e-3;
inline constexpr double kKhzToRad = kGhzToRad * 1e-6;

struct SweepAxis {
  std::string key;
  std::vector<json> values;
};

// Fully validated run description.  Frequencies stay in config units here.
struct RunSpec {
  std::string command; // simulate-rabi | simulate-dicke | simulate-dirac |
                       // resources | sweep

  // Lab-frame device family (simulate-rabi only): two-step physical params.
  bool has_physical = false;
  double resonator_ghz = 0;
  double qubit1_ghz = 0;
  double qubit2_ghz = 0;
  double frame_ghz = 0;
  double coupling_mhz = 0;

  // Simulated-model family.
  bool has_simulated = false;
  double rabi_resonator_mhz = 0;
  double rabi_qubit_mhz = 0;
  double rabi_coupling_mhz = 0;
  int dicke_qubits = 1;

  // Dirac family.
  bool has_dirac = false;
  double mass_energy_mhz = 0;
  double light_speed_mhz = 0;

  double kappa_khz = 0;
  double gamma_phi_khz = 0;
  double gamma_minus_khz = 0;

  int fock_cutoff = 0;
  int trotter_steps = 0; // 0 selects exact evolution
  double sim_time_ns = 0;
  int samples = 201; // exact-evolution grid size

  // "excited-vacuum", "ground-vacuum", "fock:<m>", or custom amplitudes
  // (interleaved re,im pairs over the full basis, renormalized after a 1e-8
  // norm check).
  std::string initial_state = "excited-vacuum";
  bool initial_custom = false;
  std::vector<double> initial_amplitudes;

  std::string split = "symmetric"; // or "step2-zero"
  std::string mode = "ideal";      // or "pulsed"
  double pulse_time_ns = 10.0;
  std::string pulse_shape = "sine2"; // or "rect"
  double pulse_amp_scale = 1.0;
  bool pulse_with_jc = false;

  std::string truncation_policy = "degraded"; // degraded | warn | error
  std::string out_dir;
  int workers = 1;

  double epsilon = 0; // resources error budget
  int suzuki_k = 1;

  std::vector<SweepAxis> sweep_axes;
  std::string sweep_command;

  json raw;                          // settings echo, overrides applied
  std::vector<std::string> warnings; // non-fatal parse notes

  bool noisy() const {
    return kappa_khz > 0 || gamma_phi_khz > 0 || gamma_minus_khz > 0;
  }
};

// Parse and validate a config document.  `cli_command` is the subcommand
// the binary was invoked with; it must match an in-config "command" key if
// both are present.  Accepts a previous run's summary.json (descends into
// its "settings" object).  Throws std::invalid_argument on any violation:
// unknown keys, duplicate keys, type errors, missing keys, bad values.
// `overrides` (flag values) are merged into the document before validation,
// so they are echoed in `raw` and re-running the summary reproduces the
// overridden run.
RunSpec parse_config(const std::string& path,
                     const std::string& cli_command = "");
RunSpec parse_config_json(json doc, const std::string& cli_command = "",
                          const json& overrides = json::object());

// Duplicate-checked file read and parse, no validation.  A whitespace-only
// file loads as an empty object.  Errors carry the path.
json load_config_file(const std::string& path);

} // namespace digirabi::config
