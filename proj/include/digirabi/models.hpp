// models.hpp — device/simulated Hamiltonians, parameter maps, two-step split.
//
// All frequencies are angular, in rad/ns (omega = 2*pi*nu with nu in GHz).
#pragma once

#include "digirabi/hilbert.hpp"

#include <utility>
#include <vector>

namespace digirabi::models {

// Laboratory-frame device parameters: resonator at omega_r, qubit switchable
// between omega_q1 (step 1) and omega_q2 (step 2), rotating frame at
// omega_tilde, exchange coupling g.  Detunings are always recomputed:
// Δr = omega_r - omega_tilde, Δq^(i) = (omega_q_i - omega_tilde)/2.
struct PhysicalParams {
  double omega_r = 0;
  double omega_q1 = 0;
  double omega_q2 = 0;
  double omega_tilde = 0;
  double g = 0;
  void validate() const; // finite; frequencies >= 0; g > 0
};

// Simulated Rabi model parameters.  Negative frequencies are algebraically
// valid (inverted regimes); callers that map from hardware attach warnings
// instead of rejecting, and g = 0 is allowed as the commuting limit.
struct RabiParams {
  double omega_r = 0; // mode frequency omega_r^R
  double omega_q = 0; // qubit frequency omega_q^R
  double g = 0;       // coupling g^R
  void validate() const;
};

// Collective model: N identical qubits, homogeneous coupling.
struct DickeParams {
  RabiParams rabi;
  int n_qubits = 1;
  void validate() const;
};

// 1+1d Dirac particle: H = mc^2 sigma_z + c p sigma_x, with the momentum
// quadrature p = i(a^dag - a)/sqrt(2).
struct DiracParams {
  double mass_energy = 0; // m c^2, rad/ns
  double light_speed = 0; // c, in units where x and p are dimensionless
  void validate() const;
};

// How the simulated qubit frequency is distributed over the two steps.
// Effective step frequencies satisfy wq1 - wq2 = omega_q^R.
//   Symmetric: +omega_q^R/2 and -omega_q^R/2 (default; frame-centered).
//   Step2Zero: omega_q^R and 0 (step 2 runs exactly on the frame).
enum class SplitPolicy { Symmetric, Step2Zero };

std::pair<double, double> split_effective_freqs(double omega_q, SplitPolicy p);

// One interaction step of the digital decomposition:
//   H = omega_mode a†a + (omega_qubit/2) Σ σz_j + g Σ coupling_j
// coupling_j = a†σ⁻_j + aσ⁺_j   (anti = false, excitation-conserving)
//            = a†σ⁺_j + aσ⁻_j   (anti = true)
// omega_qubit is signed; step 2 of the split carries -wq2.
struct StepSpec {
  double omega_mode = 0;
  double omega_qubit = 0;
  double g = 0;
  bool anti = false;
};

struct TwoStep {
  StepSpec s1, s2;
};

// Split with materialize(s1) + materialize(s2) == the full model exactly.
TwoStep decompose_rabi(const RabiParams& rp,
                       SplitPolicy split = SplitPolicy::Symmetric);

// N-qubit generalization; the same specs materialize collectively on an
// N-qubit layout (Tavis-Cummings couplings).
TwoStep build_tavis_cummings_steps(const DickeParams& dp,
                                   SplitPolicy split = SplitPolicy::Symmetric);

Operator materialize(const SpaceLayout& lay, const StepSpec& s);

// The excitation-conserving Hamiltonian the hardware actually runs for an
// anti step; conjugation by the collective pi rotation around x recovers
// materialize(s).  Identity for non-anti steps.
StepSpec rotating_frame_form(const StepSpec& s);

// H = omega_r a†a + (omega_q1/2) σz + g (a†σ⁻ + aσ⁺), single qubit.
Operator build_jc_lab(const SpaceLayout& lay, const PhysicalParams& p);

// Same model in the rotating frame, with the step's qubit frequency:
//   H̃ = Δr a†a + Δq^(step) σz + g (a†σ⁻ + aσ⁺),  step in {1, 2}.
Operator build_jc_rotating(const SpaceLayout& lay, const PhysicalParams& p,
                           int step);

// Δr a†a - Δq^(2) σz + g (a†σ⁺ + aσ⁻); equals the conjugation of the step-2
// rotating JC Hamiltonian by exp(-i pi sigma_x/2).
Operator build_anti_jc_rotating(const SpaceLayout& lay, const PhysicalParams& p);

// H_R = omega_r a†a + (omega_q/2) σz + g σx (a† + a), single qubit.
Operator build_rabi(const SpaceLayout& lay, const RabiParams& rp);

// Collective version: omega_r a†a + Σ_j (omega_q/2) σz_j + Σ_j g σx_j (a†+a).
Operator build_dicke(const SpaceLayout& lay, const DickeParams& dp);

// Dirac Hamiltonian in the mode-rotated frame where the protocol's
// quadratures become position and momentum.  Equals V H_R V† with
// V = mode_phase_rotation(pi/2) and the map_dirac_to_rabi parameters.
Operator build_dirac(const SpaceLayout& lay, const DiracParams& dp);

// Diagonal mode rotation exp(i phi a†a).
Operator mode_phase_rotation(const SpaceLayout& lay, double phi);

// omega_r^R = 2(omega_r - omega_tilde), omega_q^R = omega_q1 - omega_q2,
// g^R = g.  Appends a warning per negative simulated frequency.
RabiParams map_physical_to_simulated(const PhysicalParams& p,
                                     std::vector<std::string>* warnings = nullptr);

// Device constraints for the inverse map: the resonator frequency is fixed
// by hardware and the coupling is not tunable (must equal g^R).
struct FixedDevice {
  double omega_r = 0;
  double g = 0;
};

// omega_tilde = omega_r - omega_r^R/2; qubit frequencies per the split
// policy.  Round-trips through map_physical_to_simulated exactly.
PhysicalParams map_simulated_to_physical(const RabiParams& rp,
                                         const FixedDevice& fixed,
                                         SplitPolicy split = SplitPolicy::Symmetric);

// omega_r^R = 0, omega_q^R = 2 m c^2, g^R = c / sqrt(2).
RabiParams map_dirac_to_rabi(const DiracParams& dp);

} // namespace digirabi::models
