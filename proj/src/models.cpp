#include "digirabi/models.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace digirabi::models {

namespace {
const cd kI(0.0, 1.0);

void require_finite(double v, const char* name) {
  if (!std::isfinite(v))
    throw std::invalid_argument(std::string(name) + " must be finite");
}

void require_single_qubit(const SpaceLayout& lay, const char* what) {
  if (lay.n_qubits != 1)
    throw std::invalid_argument(std::string(what) + " needs a single-qubit layout");
}
} // namespace

void PhysicalParams::validate() const {
  require_finite(omega_r, "omega_r");
  require_finite(omega_q1, "omega_q1");
  require_finite(omega_q2, "omega_q2");
  require_finite(omega_tilde, "omega_tilde");
  require_finite(g, "g");
  if (omega_r < 0 || omega_q1 < 0 || omega_q2 < 0 || omega_tilde < 0)
    throw std::invalid_argument("device frequencies must be non-negative");
  if (!(g > 0)) throw std::invalid_argument("device coupling must be positive");
}

void RabiParams::validate() const {
  require_finite(omega_r, "omega_r");
  require_finite(omega_q, "omega_q");
  require_finite(g, "g");
  if (g < 0) throw std::invalid_argument("coupling must be >= 0");
}

void DickeParams::validate() const {
  rabi.validate();
  if (n_qubits < 1) throw std::invalid_argument("n_qubits must be >= 1");
}

void DiracParams::validate() const {
  require_finite(mass_energy, "mass_energy");
  require_finite(light_speed, "light_speed");
  if (mass_energy < 0) throw std::invalid_argument("mass_energy must be >= 0");
  if (!(light_speed > 0)) throw std::invalid_argument("light_speed must be > 0");
}

std::pair<double, double> split_effective_freqs(double omega_q, SplitPolicy p) {
  switch (p) {
    case SplitPolicy::Symmetric: return {0.5 * omega_q, -0.5 * omega_q};
    case SplitPolicy::Step2Zero: return {omega_q, 0.0};
  }
  throw std::logic_error("unknown split policy");
}

TwoStep decompose_rabi(const RabiParams& rp, SplitPolicy split) {
  rp.validate();
  auto [wq1, wq2] = split_effective_freqs(rp.omega_q, split);
  TwoStep ts;
  ts.s1 = {0.5 * rp.omega_r, wq1, rp.g, false};
  ts.s2 = {0.5 * rp.omega_r, -wq2, rp.g, true};
  return ts;
}

TwoStep build_tavis_cummings_steps(const DickeParams& dp, SplitPolicy split) {
  dp.validate();
  return decompose_rabi(dp.rabi, split);
}

Operator materialize(const SpaceLayout& lay, const StepSpec& s) {
  lay.validate();
  Mat h = s.omega_mode * make_number(lay).mat +
          0.5 * s.omega_qubit * make_collective(lay, Pauli::Z).mat;
  const Mat a = make_destroy(lay).mat;
  const Mat adag = a.adjoint();
  for (int j = 0; j < lay.n_qubits; ++j) {
    const Mat sm = make_pauli(lay, j, Pauli::Minus).mat;
    const Mat sp = make_pauli(lay, j, Pauli::Plus).mat;
    if (s.anti)
      h += s.g * (adag * sp + a * sm);
    else
      h += s.g * (adag * sm + a * sp);
  }
  return Operator(lay, std::move(h));
}

StepSpec rotating_frame_form(const StepSpec& s) {
  if (!s.anti) return s;
  // sigma_x conjugation flips sigma_z and swaps sigma_+/sigma_-.
  return {s.omega_mode, -s.omega_qubit, s.g, false};
}

Operator build_jc_lab(const SpaceLayout& lay, const PhysicalParams& p) {
  p.validate();
  require_single_qubit(lay, "build_jc_lab");
  return materialize(lay, {p.omega_r, p.omega_q1, p.g, false});
}

Operator build_jc_rotating(const SpaceLayout& lay, const PhysicalParams& p,
                           int step) {
  p.validate();
  require_single_qubit(lay, "build_jc_rotating");
  if (step != 1 && step != 2) throw std::invalid_argument("step must be 1 or 2");
  const double omega_q = step == 1 ? p.omega_q1 : p.omega_q2;
  // The sigma_z coefficient is Δq = (omega_q - omega_tilde)/2, i.e. a
  // StepSpec qubit frequency of omega_q - omega_tilde.
  return materialize(
      lay, {p.omega_r - p.omega_tilde, omega_q - p.omega_tilde, p.g, false});
}

Operator build_anti_jc_rotating(const SpaceLayout& lay, const PhysicalParams& p) {
  p.validate();
  require_single_qubit(lay, "build_anti_jc_rotating");
  return materialize(
      lay, {p.omega_r - p.omega_tilde, -(p.omega_q2 - p.omega_tilde), p.g, true});
}

Operator build_rabi(const SpaceLayout& lay, const RabiParams& rp) {
  rp.validate();
  require_single_qubit(lay, "build_rabi");
  return build_dicke(lay, {rp, 1});
}

Operator build_dicke(const SpaceLayout& lay, const DickeParams& dp) {
  dp.validate();
  lay.validate();
  if (lay.n_qubits != dp.n_qubits)
    throw std::invalid_argument("layout qubit count does not match parameters");
  Mat h = dp.rabi.omega_r * make_number(lay).mat +
          0.5 * dp.rabi.omega_q * make_collective(lay, Pauli::Z).mat;
  const Mat quad = make_destroy(lay).mat + make_create(lay).mat;
  for (int j = 0; j < lay.n_qubits; ++j)
    h += dp.rabi.g * make_pauli(lay, j, Pauli::X).mat * quad;
  return Operator(lay, std::move(h));
}

Operator build_dirac(const SpaceLayout& lay, const DiracParams& dp) {
  dp.validate();
  require_single_qubit(lay, "build_dirac");
  const Mat a = make_destroy(lay).mat;
  const Mat p = kI * (a.adjoint() - a) / std::sqrt(2.0);
  Mat h = dp.mass_energy * make_pauli(lay, 0, Pauli::Z).mat +
          dp.light_speed * make_pauli(lay, 0, Pauli::X).mat * p;
  return Operator(lay, std::move(h));
}

Operator mode_phase_rotation(const SpaceLayout& lay, double phi) {
  lay.validate();
  Vec d(lay.dim());
  for (int q = 0; q < lay.qubit_dim(); ++q)
    for (int m = 0; m < lay.mode_dim(); ++m)
      d(lay.index(q, m)) = std::exp(kI * (phi * m));
  Operator out(lay, Mat(d.asDiagonal()));
  out.unitary = true;
  return out;
}

RabiParams map_physical_to_simulated(const PhysicalParams& p,
                                     std::vector<std::string>* warnings) {
  p.validate();
  RabiParams rp;
  rp.omega_r = 2.0 * (p.omega_r - p.omega_tilde);
  rp.omega_q = p.omega_q1 - p.omega_q2;
  rp.g = p.g;
  if (warnings) {
    if (rp.omega_r < 0)
      warnings->push_back(
          "frame sits above the resonator: simulated mode frequency is negative");
    if (rp.omega_q < 0)
      warnings->push_back(
          "qubit frequencies are inverted: simulated qubit frequency is negative");
  }
  return rp;
}

PhysicalParams map_simulated_to_physical(const RabiParams& rp,
                                         const FixedDevice& fixed,
                                         SplitPolicy split) {
  rp.validate();
  require_finite(fixed.omega_r, "omega_r");
  if (fixed.g != rp.g)
    throw std::invalid_argument("device coupling must equal the simulated coupling");
  auto [wq1, wq2] = split_effective_freqs(rp.omega_q, split);
  PhysicalParams p;
  p.omega_r = fixed.omega_r;
  p.omega_tilde = fixed.omega_r - 0.5 * rp.omega_r;
  p.omega_q1 = p.omega_tilde + wq1;
  p.omega_q2 = p.omega_tilde + wq2;
  p.g = fixed.g;
  p.validate();
  return p;
}

RabiParams map_dirac_to_rabi(const DiracParams& dp) {
  dp.validate();
  RabiParams rp;
  rp.omega_r = 0.0;
  rp.omega_q = 2.0 * dp.mass_energy;
  rp.g = dp.light_speed / std::sqrt(2.0);
  return rp;
}

} // namespace digirabi::models
