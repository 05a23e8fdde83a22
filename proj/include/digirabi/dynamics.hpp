// dynamics.hpp — digital schedules, exact evolution, Lindblad integration.
#pragma once

#include "digirabi/hilbert.hpp"
#include "digirabi/models.hpp"

#include <map>
#include <string>
#include <vector>

namespace digirabi::dynamics {

// Decay rates, rad/ns.  kappa: mode loss, gamma_minus: qubit relaxation,
// gamma_phi: qubit dephasing (each qubit damped independently).
struct NoiseParams {
  double kappa = 0;
  double gamma_phi = 0;
  double gamma_minus = 0;
  bool any() const { return kappa > 0 || gamma_phi > 0 || gamma_minus > 0; }
  void validate() const;
};

enum class PulseShape { Sine2, Rect };

// Collective sigma_x drive envelope; pulse area pi/2 at amp_scale = 1,
// i.e. a pi rotation exp(-i pi sigma_x/2) on every qubit.
struct PulseEnvelope {
  PulseShape shape = PulseShape::Sine2;
  double duration = 0;
  double amp_scale = 1.0;

  double amplitude(double t) const;  // f(t), zero outside [0, duration]
  double cumulative(double t) const; // integral of f over [0, t]
  double peak() const;
};

struct PulseOptions {
  bool ideal = true; // zero-duration exact rotations
  PulseShape shape = PulseShape::Sine2;
  double duration = 10.0;       // ns, used when !ideal
  double amp_scale = 1.0;       // != 1 models a miscalibrated pulse
  bool with_background = false; // keep the interaction on during pulses
  PulseEnvelope envelope() const { return {shape, duration, amp_scale}; }
};

struct Segment {
  bool is_pulse = false;
  int ham = -1;        // interaction: schedule ham index; pulse: background index or -1
  double duration = 0; // lab time, ns; 0 for ideal pulses
};

// One digital run: n_steps repetitions of
//   [H̃1 for tau] [pulse] [H̃2 for tau] [pulse]
// where H̃1/H̃2 are the excitation-conserving step forms evolved between
// pulses and each pulse is the collective pi rotation around x.  Simulated
// time advances at half the lab rate during interaction segments (tau per
// step) and not at all during pulses.
struct ProtocolSchedule {
  SpaceLayout layout;
  std::vector<Operator> hams;     // step forms actually evolved
  std::vector<double> ham_radius; // cached spectral radii, for step control
  std::vector<Segment> segments;
  double tau = 0; // simulated time per step = lab time per interaction segment
  int n_steps = 0;
  double sim_time = 0;
  PulseOptions pulse;

  double lab_duration() const;
};

ProtocolSchedule build_schedule(const SpaceLayout& lay,
                                const models::DickeParams& dp,
                                models::SplitPolicy split, int n_steps,
                                double sim_time, const PulseOptions& pulse);

// Populations below this on the top Fock level are treated as negligible;
// above it the run is flagged as truncation-limited.
inline constexpr double kTruncationThreshold = 1e-4;

// Sampled evolution.  `time` is the primary axis (strictly increasing from
// 0): simulated time when pulses are ideal, laboratory time otherwise.
// `series` holds named observable traces aligned with the grid: sz, n_phot,
// x_quad, p_quad, top_fock_pop, sz_1..sz_N for multi-qubit layouts, and
// trace for density runs.
struct Trajectory {
  std::vector<double> time;
  std::vector<double> sim_time;
  std::vector<double> lab_time;
  std::vector<QuantumState> states;
  std::map<std::string, std::vector<double>> series;
  bool lab_axis = false;
  double top_fock_max = 0;
  bool truncation_flagged = false;
};

// Pure-state run: ideal mode, or pulsed mode without noise.  Ideal mode
// samples the coarse Trotter grid (one point per step); pulsed mode samples
// every segment boundary.  Interaction segments use exact propagators; real
// pulses use the closed-form collective rotation, or RK4 when the
// interaction is kept on.
Trajectory run_schedule_unitary(const ProtocolSchedule& sched,
                                const QuantumState& init);

// Density-matrix run under the master equation
//   drho/dt = -i[H, rho] + kappa D[a] + gamma_phi Σ D[sigma_z_j]
//             + gamma_minus Σ D[sigma_-_j],  D[A]rho = A rho A† - ½{A†A, rho},
// integrated with classic fixed-step RK4,
//   h <= min(T_f/50, segment/200, 0.01/omega_max).
// Requires pulsed mode and a density input.  `times` are lab-time sample
// points (strictly increasing from 0, within the schedule span); empty means
// every segment boundary.
Trajectory run_schedule_lindblad(const ProtocolSchedule& sched,
                                 const QuantumState& init,
                                 const NoiseParams& noise,
                                 const std::vector<double>& times = {});

// Continuous evolution of a pure state under a constant Hamiltonian, sampled
// at the given grid (strictly increasing from 0) via one eigendecomposition.
Trajectory evolve_exact(const Operator& h, const QuantumState& init,
                        const std::vector<double>& times);

// Master-equation right-hand side, written exactly as above (readable form;
// the integrator uses a sparse equivalent).  Input must be a density state.
Mat lindblad_rhs(const QuantumState& rho, const Operator& h,
                 const NoiseParams& noise);

// Numerically integrates the envelope and returns the accumulated angle;
// throws if it deviates from pi/2 by more than 1e-6.
double pulse_unitary_check(const PulseEnvelope& env);

// exp(i omega_tilde t (a†a + Σ sigma_z_j / 2)), diagonal.  Maps lab-frame
// states onto rotating-frame states: psi_rot(t) = U(t) psi_lab(t).
Operator frame_unitary(const SpaceLayout& lay, double omega_tilde, double t);

// Applies frame_unitary to a state.  Single-qubit layouts only.
QuantumState frame_transform(const QuantumState& s, double omega_tilde,
                             double t);

// Π_j exp(-i pi sigma_x_j / 2) = (-i)^N X_1...X_N, the ideal pulse.
Operator ideal_pulse_unitary(const SpaceLayout& lay);

// Number of equal RK4 substeps for a span under the step rule.
int substep_count(double duration, double omega_max, bool is_pulse,
                  double pulse_duration);

} // namespace digirabi::dynamics
