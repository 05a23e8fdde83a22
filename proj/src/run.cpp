#include "digirabi/run.hpp"

#include "digirabi/models.hpp"
#include "digirabi/observables.hpp"
#include "digirabi/resources.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <utility>

namespace digirabi::run {
namespace {

namespace dyn = dynamics;
namespace obs = observables;
using config::json;

constexpr size_t kMaxSweepCells = 1000000;

// 17 significant digits: doubles survive a CSV round trip bit-exactly.
std::string fmt(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

double ghz(double v) { return config::kGhzToRad * v; }
double mhz(double v) { return config::kMhzToRad * v; }
double khz(double v) { return config::kKhzToRad * v; }

models::DiracParams dirac_params(const config::RunSpec& s) {
  return {mhz(s.mass_energy_mhz), mhz(s.light_speed_mhz)};
}

// Simulated-frame parameters for any command, in rad/ns.  Physical-device
// configs are mapped down; the mapping warnings were already issued at parse
// time in config units.
models::RabiParams rabi_params(const config::RunSpec& s) {
  if (s.command == "simulate-dirac")
    return models::map_dirac_to_rabi(dirac_params(s));
  if (s.has_physical) {
    const models::PhysicalParams p{ghz(s.resonator_ghz), ghz(s.qubit1_ghz),
                                   ghz(s.qubit2_ghz), ghz(s.frame_ghz),
                                   mhz(s.coupling_mhz)};
    return models::map_physical_to_simulated(p, nullptr);
  }
  return {mhz(s.rabi_resonator_mhz), mhz(s.rabi_qubit_mhz),
          mhz(s.rabi_coupling_mhz)};
}

models::SplitPolicy split_policy(const config::RunSpec& s) {
  return s.split == "step2-zero" ? models::SplitPolicy::Step2Zero
                                 : models::SplitPolicy::Symmetric;
}

QuantumState initial_state(const config::RunSpec& s, const SpaceLayout& lay) {
  if (s.initial_custom) {
    Vec v(lay.dim());
    for (long i = 0; i < lay.dim(); ++i)
      v(i) = cd(s.initial_amplitudes[2 * i], s.initial_amplitudes[2 * i + 1]);
    v /= v.norm(); // parse already checked |norm - 1| <= 1e-8
    return QuantumState::pure(lay, v);
  }
  if (s.initial_state == "ground-vacuum")
    return QuantumState::basis(lay, lay.qubit_dim() - 1, 0);
  if (s.initial_state.rfind("fock:", 0) == 0) {
    const int m = std::stoi(s.initial_state.substr(5));
    return QuantumState::basis(lay, lay.qubit_dim() - 1, m);
  }
  return QuantumState::basis(lay, 0, 0); // excited-vacuum
}

// Continuous reference evolution, evaluated at arbitrary (possibly repeated)
// time stamps.  One eigendecomposition up front.
struct ExactRef {
  SpaceLayout lay;
  Eigen::SelfAdjointEigenSolver<Mat> es;
  Vec c0;

  ExactRef(const Operator& h, const QuantumState& psi0) : lay(h.layout) {
    es.compute(h.mat);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("reference eigendecomposition failed");
    c0 = es.eigenvectors().adjoint() * psi0.psi;
  }

  QuantumState at(double t) const {
    Vec ph(c0.size());
    for (long k = 0; k < c0.size(); ++k)
      ph(k) = std::exp(cd(0, -1) * es.eigenvalues()(k) * t) * c0(k);
    return QuantumState::pure(lay, Vec(es.eigenvectors() * ph));
  }
};

struct SimOutput {
  dyn::Trajectory traj;
  std::vector<double> fidelity;
};

// One simulate-* command.  trotter_steps = 0 runs the target model
// continuously and reports survival fidelity against the initial state;
// digital runs report fidelity against the continuous reference at the same
// simulated time.  Dirac runs evolve the mapped two-step schedule, which
// reproduces Dirac-frame fidelities exactly because the connecting mode
// rotation is time independent.
SimOutput simulate(const config::RunSpec& s) {
  const int n_qubits = s.command == "simulate-dicke" ? s.dicke_qubits : 1;
  const SpaceLayout lay{n_qubits, s.fock_cutoff};
  const models::DickeParams dp{rabi_params(s), n_qubits};
  const QuantumState psi0 = initial_state(s, lay);

  SimOutput out;
  if (s.trotter_steps == 0) {
    const Operator h = s.command == "simulate-dirac"
                           ? models::build_dirac(lay, dirac_params(s))
                           : models::build_dicke(lay, dp);
    std::vector<double> times(s.samples);
    for (int k = 0; k < s.samples; ++k)
      times[k] = s.sim_time_ns * k / (s.samples - 1);
    times.back() = s.sim_time_ns;
    out.traj = dyn::evolve_exact(h, psi0, times);
    out.fidelity.reserve(out.traj.states.size());
    for (const QuantumState& st : out.traj.states)
      out.fidelity.push_back(obs::fidelity(psi0, st));
    return out;
  }

  dyn::PulseOptions pulse;
  pulse.ideal = s.mode == "ideal";
  pulse.shape = s.pulse_shape == "rect" ? dyn::PulseShape::Rect
                                        : dyn::PulseShape::Sine2;
  pulse.duration = s.pulse_time_ns;
  pulse.amp_scale = s.pulse_amp_scale;
  pulse.with_background = s.pulse_with_jc;

  const dyn::ProtocolSchedule sched = dyn::build_schedule(
      lay, dp, split_policy(s), s.trotter_steps, s.sim_time_ns, pulse);

  if (s.noisy()) {
    const dyn::NoiseParams noise{khz(s.kappa_khz), khz(s.gamma_phi_khz),
                                 khz(s.gamma_minus_khz)};
    out.traj = dyn::run_schedule_lindblad(sched, psi0.as_density(), noise);
  } else {
    out.traj = dyn::run_schedule_unitary(sched, psi0);
  }

  if (s.command == "simulate-dirac") {
    // Digital states live in the frame where position is the rotated
    // quadrature; re-read both quadratures accordingly.
    auto& xq = out.traj.series.at("x_quad");
    auto& pq = out.traj.series.at("p_quad");
    for (size_t k = 0; k < out.traj.states.size(); ++k) {
      xq[k] = obs::quadrature(out.traj.states[k], -0.5 * std::numbers::pi);
      pq[k] = obs::quadrature(out.traj.states[k], 0.0);
    }
  }

  const ExactRef ref(models::build_dicke(lay, dp), psi0);
  out.fidelity.reserve(out.traj.states.size());
  for (size_t k = 0; k < out.traj.states.size(); ++k)
    out.fidelity.push_back(
        obs::fidelity(ref.at(out.traj.sim_time[k]), out.traj.states[k]));
  return out;
}

std::string trajectory_csv(const dyn::Trajectory& tr,
                           const std::vector<double>& fid) {
  std::string text =
      "time_ns,sz,n_phot,fidelity,sim_time_ns,lab_time_ns,x_quad,p_quad,"
      "top_fock_pop";
  const bool has_trace = tr.series.count("trace") > 0;
  if (has_trace)
    text += ",trace";
  std::vector<std::string> extra;
  for (int j = 1;; ++j) {
    const std::string key = "sz_" + std::to_string(j);
    if (!tr.series.count(key))
      break;
    extra.push_back(key);
    text += "," + key;
  }
  text += "\n";
  for (size_t k = 0; k < tr.time.size(); ++k) {
    text += fmt(tr.time[k]);
    text += "," + fmt(tr.series.at("sz")[k]);
    text += "," + fmt(tr.series.at("n_phot")[k]);
    text += "," + fmt(fid[k]);
    text += "," + fmt(tr.sim_time[k]);
    text += "," + fmt(tr.lab_time[k]);
    text += "," + fmt(tr.series.at("x_quad")[k]);
    text += "," + fmt(tr.series.at("p_quad")[k]);
    text += "," + fmt(tr.series.at("top_fock_pop")[k]);
    if (has_trace)
      text += "," + fmt(tr.series.at("trace")[k]);
    for (const std::string& key : extra)
      text += "," + fmt(tr.series.at(key)[k]);
    text += "\n";
  }
  return text;
}

json simulate_results(const dyn::Trajectory& tr,
                      const std::vector<double>& fid) {
  json res;
  res["grid_points"] = static_cast<long long>(tr.time.size());
  res["final_time_ns"] = tr.time.back();
  res["final_sim_time_ns"] = tr.sim_time.back();
  res["final_lab_time_ns"] = tr.lab_time.back();
  json fin;
  for (const auto& [key, v] : tr.series)
    fin[key] = v.back();
  res["final"] = fin;
  res["fidelity_final"] = fid.back();
  res["top_fock_max"] = tr.top_fock_max;
  res["truncation_flagged"] = tr.truncation_flagged;
  return res;
}

json resources_results(const config::RunSpec& s) {
  resources::ResourceQuery q;
  q.dicke = {rabi_params(s), s.dicke_qubits};
  q.fock_cutoff = s.fock_cutoff;
  q.t = s.sim_time_ns;
  q.epsilon = s.epsilon;
  q.k = s.suzuki_k;
  json res;
  res["norm_bound"] = resources::dicke_norm_bound(q);
  res["gate_count"] = resources::gate_count_bound(q);
  if (s.trotter_steps >= 1) {
    const SpaceLayout lay{s.dicke_qubits, s.fock_cutoff};
    const models::TwoStep ts =
        models::build_tavis_cummings_steps(q.dicke, split_policy(s));
    res["trotter_error"] = resources::trotter_error_estimate(
        models::materialize(lay, ts.s1), models::materialize(lay, ts.s2),
        s.sim_time_ns, s.trotter_steps);
  }
  return res;
}

std::string axis_cell_text(const json& v) {
  if (v.is_string())
    return v.get<std::string>();
  if (v.is_boolean())
    return v.get<bool>() ? "true" : "false";
  return fmt(v.get<double>());
}

struct CellOutcome {
  bool ok = false;
  std::string error;
  json results;
};

CellOutcome run_sweep_cell(const json& cell) {
  CellOutcome oc;
  try {
    const config::RunSpec cs = config::parse_config_json(cell, "");
    const RunResult r = run_core(cs);
    oc.ok = true;
    oc.results = r.summary.at("results");
  } catch (const std::exception& e) {
    oc.error = e.what();
  }
  return oc;
}

RunResult sweep(const config::RunSpec& s) {
  const auto& axes = s.sweep_axes;
  size_t total = 1;
  for (const auto& ax : axes) {
    if (ax.values.size() > kMaxSweepCells / total)
      throw std::invalid_argument("sweep expands to too many cells");
    total *= ax.values.size();
  }

  json base = s.raw;
  base.erase("sweep");
  base.erase("sweep_command");
  base.erase("workers");
  base.erase("out_dir");
  base["command"] = s.sweep_command;

  // Row-major expansion: the last declared axis varies fastest.
  std::vector<json> cells;
  cells.reserve(total);
  for (size_t i = 0; i < total; ++i) {
    json cell = base;
    size_t rem = i;
    for (size_t a = axes.size(); a-- > 0;) {
      cell[axes[a].key] = axes[a].values[rem % axes[a].values.size()];
      rem /= axes[a].values.size();
    }
    cells.push_back(std::move(cell));
  }

  // Cells are pulled off a shared counter; results land by index, so the
  // output is identical for any worker count.
  std::vector<CellOutcome> outcomes(total);
  std::atomic<size_t> next{0};
  const auto work = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= total)
        return;
      outcomes[i] = run_sweep_cell(cells[i]);
    }
  };
  const int nw = std::max(1, std::min<int>(s.workers, static_cast<int>(total)));
  if (nw == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (int w = 0; w < nw; ++w)
      pool.emplace_back(work);
    for (auto& th : pool)
      th.join();
  }

  const bool res_cmd = s.sweep_command == "resources";
  std::string csv = "cell";
  for (const auto& ax : axes)
    csv += "," + ax.key;
  csv += ",status";
  csv += res_cmd ? ",norm_bound,gate_count,trotter_error"
                 : ",time_ns,sz,n_phot,fidelity,top_fock_pop,"
                   "truncation_flagged";
  csv += "\n";

  json rows = json::array();
  size_t n_ok = 0;
  for (size_t i = 0; i < total; ++i) {
    const CellOutcome& oc = outcomes[i];
    json row;
    row["cell"] = static_cast<long long>(i);
    csv += std::to_string(i);
    {
      size_t rem = i;
      std::vector<std::string> rev(axes.size());
      for (size_t a = axes.size(); a-- > 0;) {
        const json& v = axes[a].values[rem % axes[a].values.size()];
        rem /= axes[a].values.size();
        row[axes[a].key] = v;
        rev[a] = axis_cell_text(v);
      }
      for (const std::string& cell_text : rev)
        csv += "," + cell_text;
    }
    row["status"] = oc.ok ? "ok" : "error";
    csv += oc.ok ? ",ok" : ",error";
    if (oc.ok) {
      ++n_ok;
      row["results"] = oc.results;
      if (res_cmd) {
        csv += "," + fmt(oc.results.at("norm_bound").get<double>());
        csv += "," + fmt(oc.results.at("gate_count").get<double>());
        csv += oc.results.count("trotter_error")
                   ? "," + fmt(oc.results.at("trotter_error").get<double>())
                   : std::string(",");
      } else {
        const json& fin = oc.results.at("final");
        csv += "," + fmt(oc.results.at("final_time_ns").get<double>());
        csv += "," + fmt(fin.at("sz").get<double>());
        csv += "," + fmt(fin.at("n_phot").get<double>());
        csv += "," + fmt(oc.results.at("fidelity_final").get<double>());
        csv += "," + fmt(fin.at("top_fock_pop").get<double>());
        csv += oc.results.at("truncation_flagged").get<bool>() ? ",true"
                                                               : ",false";
      }
    } else {
      row["error"] = oc.error;
      csv += res_cmd ? ",,," : ",,,,,,";
    }
    csv += "\n";
    rows.push_back(std::move(row));
  }

  RunResult r;
  r.csv_name = "sweep.csv";
  r.csv = std::move(csv);
  json res;
  res["cells"] = static_cast<long long>(total);
  res["ok"] = static_cast<long long>(n_ok);
  res["failed"] = static_cast<long long>(total - n_ok);
  json ax_echo = json::array();
  for (const auto& ax : axes)
    ax_echo.push_back(ax.key);
  res["axes"] = ax_echo;
  res["rows"] = std::move(rows);
  r.summary["results"] = std::move(res);
  return r;
}

} // namespace

RunResult run_core(const config::RunSpec& spec) {
  const auto t0 = std::chrono::steady_clock::now();
  RunResult r;

  if (spec.command == "resources") {
    r.summary["results"] = resources_results(spec);
  } else if (spec.command == "sweep") {
    r = sweep(spec);
  } else {
    SimOutput out = simulate(spec);
    r.csv_name = "trajectory.csv";
    r.csv = trajectory_csv(out.traj, out.fidelity);
    r.summary["results"] = simulate_results(out.traj, out.fidelity);
    r.truncation_flagged = out.traj.truncation_flagged;
    r.fidelity = std::move(out.fidelity);
    r.traj = std::move(out.traj);
  }

  r.warnings = spec.warnings;
  if (r.truncation_flagged) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "top Fock level reached population %.3g (threshold %g); "
                  "results are truncation limited, increase fock_cutoff",
                  r.traj.top_fock_max, dyn::kTruncationThreshold);
    r.warnings.push_back(msg);
  }

  json doc;
  doc["schema_version"] = 1;
  doc["command"] = spec.command;
  doc["settings"] = spec.raw;
  doc["results"] = std::move(r.summary["results"]);
  const double wall_ms =
      std::chrono::duration<double, std::milli>(
          std::chrono::steady_clock::now() - t0)
          .count();
  doc["results"]["wall_ms"] = wall_ms;
  doc["warnings"] = r.warnings;
  r.summary = std::move(doc);
  return r;
}

int run(const config::RunSpec& spec, const std::string& out_override) {
  RunResult r = run_core(spec);

  std::filesystem::path dir;
  if (!out_override.empty()) {
    dir = out_override;
  } else if (!spec.out_dir.empty()) {
    dir = spec.out_dir;
  } else if (const char* env = std::getenv("DIGIRABI_OUT")) {
    dir = env;
  } else {
    dir = "out";
  }
  std::filesystem::create_directories(dir);

  if (!r.csv_name.empty()) {
    std::ofstream f(dir / r.csv_name, std::ios::binary);
    f << r.csv;
    if (!f)
      throw std::runtime_error("failed to write " + (dir / r.csv_name).string());
    std::cout << "wrote " << (dir / r.csv_name).string() << "\n";
  }
  {
    std::ofstream f(dir / "summary.json", std::ios::binary);
    f << r.summary.dump(2) << "\n";
    if (!f)
      throw std::runtime_error("failed to write " +
                               (dir / "summary.json").string());
    std::cout << "wrote " << (dir / "summary.json").string() << "\n";
  }
  for (const std::string& w : r.warnings)
    std::cerr << "warning: " << w << "\n";

  if (r.truncation_flagged) {
    if (spec.truncation_policy == "error") {
      emit_error_json("truncation", r.warnings.back());
      return 1;
    }
    if (spec.truncation_policy == "degraded")
      return 3;
  }
  return 0;
}

void emit_error_json(const std::string& type, const std::string& message) {
  json e;
  e["error"] = {{"type", type}, {"message", message}};
  std::cerr << e.dump() << "\n";
}

} // namespace digirabi::run
