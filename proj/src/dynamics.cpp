#include "digirabi/dynamics.hpp"

#include "digirabi/observables.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace digirabi::dynamics {

namespace {

const cd kI(0.0, 1.0);
using SpMat = Eigen::SparseMatrix<cd>;

// Step rule: h <= min(T_f/50, segment/200, 0.01/omega_max).
constexpr double kSegmentDivisor = 200.0;
constexpr double kPhaseBudget = 0.01;
constexpr double kPulseDivisor = 50.0;
constexpr double kMaxSubsteps = 5e7;

SpMat sparse(const Mat& m) { return m.sparseView(); }

double step_size(double seg_duration, double omega_max, bool is_pulse,
                 double pulse_duration) {
  double h = seg_duration / kSegmentDivisor;
  if (omega_max > 0) h = std::min(h, kPhaseBudget / omega_max);
  if (is_pulse && pulse_duration > 0)
    h = std::min(h, pulse_duration / kPulseDivisor);
  return h;
}

int chunk_substeps(double span, double h, long seg_index) {
  const double n = std::ceil(span / h);
  if (!(n >= 1) || n > kMaxSubsteps)
    throw std::runtime_error("integrator step-size failure in segment " +
                             std::to_string(seg_index) + ": " +
                             std::to_string(n) + " substeps for span " +
                             std::to_string(span) + " ns");
  return static_cast<int>(n);
}

void check_grid(const std::vector<double>& times) {
  if (times.empty()) throw std::invalid_argument("empty time grid");
  if (times.front() != 0.0)
    throw std::invalid_argument("time grid must start at 0");
  for (size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1]))
      throw std::invalid_argument("time grid must be strictly increasing");
}

void record_state(Trajectory& tr, QuantumState&& q, double sim, double lab) {
  namespace obs = observables;
  tr.sim_time.push_back(sim);
  tr.lab_time.push_back(lab);
  tr.time.push_back(tr.lab_axis ? lab : sim);
  const QuantumState& s = tr.states.emplace_back(std::move(q));
  auto& se = tr.series;
  se["sz"].push_back(obs::qubit_inversion(s));
  if (s.layout.n_qubits > 1)
    for (int j = 0; j < s.layout.n_qubits; ++j)
      se["sz_" + std::to_string(j + 1)].push_back(obs::qubit_inversion(s, j));
  se["n_phot"].push_back(obs::photon_number(s));
  se["x_quad"].push_back(obs::quadrature(s, 0.0));
  se["p_quad"].push_back(obs::quadrature(s, 0.5 * std::numbers::pi));
  const double top = obs::top_fock_population(s);
  se["top_fock_pop"].push_back(top);
  if (s.density) se["trace"].push_back(s.trace());
  tr.top_fock_max = std::max(tr.top_fock_max, top);
  tr.truncation_flagged = tr.top_fock_max > kTruncationThreshold;
}

} // namespace

void NoiseParams::validate() const {
  for (double v : {kappa, gamma_phi, gamma_minus})
    if (!std::isfinite(v) || v < 0)
      throw std::invalid_argument("decay rates must be finite and >= 0");
}

double PulseEnvelope::amplitude(double t) const {
  if (duration <= 0) throw std::logic_error("pulse envelope needs a positive duration");
  if (t < 0 || t > duration) return 0.0;
  const double pi = std::numbers::pi;
  switch (shape) {
    case PulseShape::Sine2: {
      const double s = std::sin(pi * t / duration);
      return amp_scale * (pi / duration) * s * s;
    }
    case PulseShape::Rect:
      return amp_scale * pi / (2.0 * duration);
  }
  throw std::logic_error("unknown pulse shape");
}

double PulseEnvelope::cumulative(double t) const {
  if (duration <= 0) throw std::logic_error("pulse envelope needs a positive duration");
  t = std::clamp(t, 0.0, duration);
  const double pi = std::numbers::pi;
  switch (shape) {
    case PulseShape::Sine2: {
      const double a = amp_scale * pi / duration;
      return a * (0.5 * t - duration / (4.0 * pi) * std::sin(2.0 * pi * t / duration));
    }
    case PulseShape::Rect:
      return amp_scale * pi / (2.0 * duration) * t;
  }
  throw std::logic_error("unknown pulse shape");
}

double PulseEnvelope::peak() const {
  if (duration <= 0) throw std::logic_error("pulse envelope needs a positive duration");
  const double pi = std::numbers::pi;
  return shape == PulseShape::Sine2 ? amp_scale * pi / duration
                                    : amp_scale * pi / (2.0 * duration);
}

int substep_count(double duration, double omega_max, bool is_pulse,
                  double pulse_duration) {
  if (duration <= 0) return 0;
  return chunk_substeps(
      duration, step_size(duration, omega_max, is_pulse, pulse_duration), -1);
}

double pulse_unitary_check(const PulseEnvelope& env) {
  if (!(env.duration > 0) || !std::isfinite(env.duration))
    throw std::invalid_argument("pulse envelope needs a positive duration");
  if (!(env.amp_scale > 0) || !std::isfinite(env.amp_scale))
    throw std::invalid_argument("pulse amplitude scale must be positive");
  // Composite Simpson; the envelopes here are smooth enough that 1e4
  // intervals put the quadrature error far below the 1e-6 gate.
  constexpr int n = 10000;
  const double h = env.duration / n;
  double sum = env.amplitude(0.0) + env.amplitude(env.duration);
  for (int k = 1; k < n; ++k) sum += env.amplitude(k * h) * (k % 2 ? 4.0 : 2.0);
  const double theta = sum * h / 3.0;
  const double target = 0.5 * std::numbers::pi;
  if (std::abs(theta - target) > 1e-6)
    throw std::invalid_argument("pulse area " + std::to_string(theta) +
                                " rad is not the flip angle pi/2");
  return theta;
}

double ProtocolSchedule::lab_duration() const {
  double total = 0;
  for (const Segment& s : segments) total += s.duration;
  return total;
}

ProtocolSchedule build_schedule(const SpaceLayout& lay,
                                const models::DickeParams& dp,
                                models::SplitPolicy split, int n_steps,
                                double sim_time, const PulseOptions& pulse) {
  lay.validate();
  dp.validate();
  if (lay.n_qubits != dp.n_qubits)
    throw std::invalid_argument("layout qubit count does not match parameters");
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  if (!(sim_time > 0) || !std::isfinite(sim_time))
    throw std::invalid_argument("sim_time must be > 0");
  if (!pulse.ideal) {
    if (!(pulse.duration > 0))
      throw std::invalid_argument("finite pulses need a positive duration");
    pulse_unitary_check(pulse.envelope());
  }

  const models::TwoStep ts = models::build_tavis_cummings_steps(dp, split);
  ProtocolSchedule s;
  s.layout = lay;
  s.hams.push_back(models::materialize(lay, models::rotating_frame_form(ts.s1)));
  s.hams.push_back(models::materialize(lay, models::rotating_frame_form(ts.s2)));
  for (const Operator& h : s.hams) s.ham_radius.push_back(spectral_radius(h));
  s.tau = sim_time / n_steps;
  s.n_steps = n_steps;
  s.sim_time = sim_time;
  s.pulse = pulse;
  const double pdur = pulse.ideal ? 0.0 : pulse.duration;
  for (int k = 0; k < n_steps; ++k) {
    s.segments.push_back({false, 0, s.tau});
    s.segments.push_back({true, pulse.with_background ? 0 : -1, pdur});
    s.segments.push_back({false, 1, s.tau});
    s.segments.push_back({true, pulse.with_background ? 1 : -1, pdur});
  }
  return s;
}

Operator ideal_pulse_unitary(const SpaceLayout& lay) {
  lay.validate();
  const Mat block = -kI * pauli_block(Pauli::X);
  Mat u = Mat::Identity(1, 1);
  for (int j = 0; j < lay.n_qubits; ++j) u = kron(u, block);
  u = kron(u, Mat::Identity(lay.mode_dim(), lay.mode_dim()));
  Operator out(lay, std::move(u));
  out.unitary = true;
  return out;
}

Operator frame_unitary(const SpaceLayout& lay, double omega_tilde, double t) {
  lay.validate();
  Vec d(lay.dim());
  for (int q = 0; q < lay.qubit_dim(); ++q) {
    // bit value 0 is |e> (+1 under sigma_z)
    const int sz_sum = lay.n_qubits - 2 * std::popcount(static_cast<unsigned>(q));
    for (int m = 0; m < lay.mode_dim(); ++m) {
      const double lam = m + 0.5 * sz_sum;
      d(lay.index(q, m)) = std::exp(kI * (omega_tilde * t * lam));
    }
  }
  Operator out(lay, Mat(d.asDiagonal()));
  out.unitary = true;
  return out;
}

QuantumState frame_transform(const QuantumState& s, double omega_tilde,
                             double t) {
  if (s.layout.n_qubits != 1)
    throw std::invalid_argument("frame transform is single-qubit only");
  const Mat u = frame_unitary(s.layout, omega_tilde, t).mat;
  if (s.density)
    return QuantumState::mixed(s.layout, Mat(u * s.rho * u.adjoint()));
  return QuantumState::pure(s.layout, Vec(u * s.psi));
}

Trajectory evolve_exact(const Operator& h, const QuantumState& init,
                        const std::vector<double>& times) {
  if (init.density)
    throw std::invalid_argument("evolve_exact requires a pure state");
  if (!(h.layout == init.layout))
    throw std::invalid_argument("state and Hamiltonian layouts differ");
  if (!h.hermitian)
    throw std::invalid_argument("evolve_exact requires a hermitian generator");
  check_grid(times);

  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h.mat + h.mat.adjoint()));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed");
  const Vec c = es.eigenvectors().adjoint() * init.psi;

  Trajectory tr;
  Vec ph(c.size());
  for (double t : times) {
    for (long k = 0; k < c.size(); ++k)
      ph(k) = std::exp(-kI * es.eigenvalues()(k) * t) * c(k);
    record_state(tr, QuantumState::pure(init.layout, es.eigenvectors() * ph),
                 t, t);
  }
  return tr;
}

Mat lindblad_rhs(const QuantumState& rho, const Operator& h,
                 const NoiseParams& noise) {
  noise.validate();
  if (!rho.density)
    throw std::invalid_argument("lindblad_rhs requires a density state");
  if (!(rho.layout == h.layout))
    throw std::invalid_argument("state and Hamiltonian layouts differ");
  const SpaceLayout& lay = rho.layout;
  const Mat& r = rho.rho;
  Mat y = -kI * (h.mat * r - r * h.mat);
  auto dissipate = [&](const Mat& a, double rate) {
    if (rate <= 0) return;
    const Mat ada = a.adjoint() * a;
    y += rate * (a * r * a.adjoint() - 0.5 * (ada * r + r * ada));
  };
  dissipate(make_destroy(lay).mat, noise.kappa);
  for (int j = 0; j < lay.n_qubits; ++j) {
    dissipate(make_pauli(lay, j, Pauli::Z).mat, noise.gamma_phi);
    dissipate(make_pauli(lay, j, Pauli::Minus).mat, noise.gamma_minus);
  }
  return y;
}

namespace {

// Sparse machinery for the master-equation integrator: the Hamiltonian and
// the anticommutator halves fold into K = H - (i/2) G with
// G = Σ rate A†A, so one RHS costs a handful of sparse-dense products.
struct LindbladFast {
  std::vector<SpMat> k, kadj; // per schedule ham
  SpMat k_free, kadj_free;    // background-free pulse: K = -(i/2) G
  SpMat x;                    // collective sigma_x
  SpMat a, adag;
  std::vector<SpMat> sz, sm, sp;
  NoiseParams noise;

  LindbladFast(const ProtocolSchedule& sched, const NoiseParams& nz)
      : noise(nz) {
    const SpaceLayout& lay = sched.layout;
    const long d = lay.dim();
    Mat g = Mat::Zero(d, d);
    if (noise.kappa > 0) {
      const Mat am = make_destroy(lay).mat;
      a = sparse(am);
      adag = sparse(Mat(am.adjoint()));
      g += noise.kappa * make_number(lay).mat;
    }
    for (int j = 0; j < lay.n_qubits; ++j) {
      if (noise.gamma_phi > 0)
        sz.push_back(sparse(make_pauli(lay, j, Pauli::Z).mat));
      if (noise.gamma_minus > 0) {
        const Mat smj = make_pauli(lay, j, Pauli::Minus).mat;
        sm.push_back(sparse(smj));
        sp.push_back(sparse(Mat(smj.adjoint())));
        g += noise.gamma_minus * Mat(smj.adjoint() * smj);
      }
    }
    // (sigma_z)† sigma_z = I per qubit
    if (noise.gamma_phi > 0)
      g += noise.gamma_phi * lay.n_qubits * Mat::Identity(d, d);
    for (const Operator& h : sched.hams) {
      const Mat km = h.mat - 0.5 * kI * g;
      k.push_back(sparse(km));
      kadj.push_back(sparse(Mat(km.adjoint())));
    }
    const Mat kf = -0.5 * kI * g;
    k_free = sparse(kf);
    kadj_free = sparse(Mat(kf.adjoint()));
    x = sparse(make_collective(lay, Pauli::X).mat);
  }

  // drho/dt = -i(K rho - rho K†) + sandwich terms (+ pulse drive).
  Mat rhs(const Mat& rho, const SpMat& kk, const SpMat& ka, double drive) const {
    Mat y = -kI * (kk * rho - rho * ka);
    if (drive != 0.0) y += (-kI * drive) * (x * rho - rho * x);
    if (noise.kappa > 0) y += noise.kappa * Mat(Mat(a * rho) * adag);
    for (const SpMat& s : sz) y += noise.gamma_phi * Mat(Mat(s * rho) * s);
    for (size_t j = 0; j < sm.size(); ++j)
      y += noise.gamma_minus * Mat(Mat(sm[j] * rho) * sp[j]);
    return y;
  }
};

// Classic RK4 over [0, span] in nsub equal steps; `rhs_at` receives the
// local time offset (for pulse envelopes).
template <typename Y, typename Rhs>
void rk4_span(Y& y, double span, int nsub, Rhs&& rhs_at) {
  const double h = span / nsub;
  Y k1, k2, k3, k4;
  for (int s = 0; s < nsub; ++s) {
    const double t0 = s * h;
    k1 = rhs_at(y, t0);
    k2 = rhs_at(Y(y + 0.5 * h * k1), t0 + 0.5 * h);
    k3 = rhs_at(Y(y + 0.5 * h * k2), t0 + 0.5 * h);
    k4 = rhs_at(Y(y + h * k3), t0 + h);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
}

} // namespace

Trajectory run_schedule_unitary(const ProtocolSchedule& sched,
                                const QuantumState& init) {
  if (!(sched.layout == init.layout))
    throw std::invalid_argument("state layout does not match schedule");
  if (init.density)
    throw std::invalid_argument("unitary run requires a pure state");
  const SpaceLayout& lay = sched.layout;

  Trajectory tr;
  tr.lab_axis = !sched.pulse.ideal;

  double sim = 0, lab = 0;
  Vec psi = init.psi;
  record_state(tr, QuantumState::pure(lay, psi), sim, lab);

  std::vector<Mat> prop;
  for (const Operator& h : sched.hams)
    prop.push_back(propagator(h, sched.tau).mat);
  const Mat kick = ideal_pulse_unitary(lay).mat;

  // Finite pulses without background: closed-form collective x rotation from
  // one eigendecomposition.  With background: RK4 on the state vector.
  Eigen::SelfAdjointEigenSolver<Mat> xev;
  SpMat x_sp;
  if (!sched.pulse.ideal) {
    const Mat xc = make_collective(lay, Pauli::X).mat;
    if (sched.pulse.with_background)
      x_sp = sparse(xc);
    else
      xev.compute(xc);
  }
  auto rot_x = [&](double theta) {
    Vec ph(lay.dim());
    for (long k = 0; k < ph.size(); ++k)
      ph(k) = std::exp(-kI * theta * xev.eigenvalues()(k));
    return Mat(xev.eigenvectors() * ph.asDiagonal() * xev.eigenvectors().adjoint());
  };

  const PulseEnvelope env = sched.pulse.envelope();
  long seg_idx = 0;
  for (const Segment& seg : sched.segments) {
    if (!seg.is_pulse) {
      psi = prop[seg.ham] * psi;
      sim += 0.5 * seg.duration;
      lab += seg.duration;
    } else if (sched.pulse.ideal) {
      psi = kick * psi; // zero duration
    } else if (!sched.pulse.with_background) {
      psi = rot_x(env.cumulative(seg.duration)) * psi;
      lab += seg.duration;
    } else {
      const SpMat hbg = sparse(sched.hams[seg.ham].mat);
      const double wmax = env.peak() * lay.n_qubits + sched.ham_radius[seg.ham];
      const int nsub = substep_count(seg.duration, wmax, true, seg.duration);
      rk4_span(psi, seg.duration, nsub, [&](const Vec& v, double tl) {
        return Vec(-kI * (hbg * v + env.amplitude(tl) * (x_sp * v)));
      });
      lab += seg.duration;
    }
    ++seg_idx;
    // Ideal mode samples the coarse Trotter grid; pulsed mode every boundary.
    if (sched.pulse.ideal ? (seg_idx % 4 == 0) : true)
      record_state(tr, QuantumState::pure(lay, psi), sim, lab);
  }
  return tr;
}

Trajectory run_schedule_lindblad(const ProtocolSchedule& sched,
                                 const QuantumState& init,
                                 const NoiseParams& noise,
                                 const std::vector<double>& times) {
  if (!(sched.layout == init.layout))
    throw std::invalid_argument("state layout does not match schedule");
  if (sched.pulse.ideal)
    throw std::invalid_argument("master-equation runs require pulsed mode");
  if (!init.density)
    throw std::invalid_argument("master-equation runs require a density state");
  noise.validate();
  const SpaceLayout& lay = sched.layout;

  const double total = sched.lab_duration();
  const double tol = 1e-9 * std::max(1.0, total);
  if (!times.empty()) {
    check_grid(times);
    if (times.back() > total + tol)
      throw std::invalid_argument("sample times extend past the schedule");
  }

  Trajectory tr;
  tr.lab_axis = true;

  Mat rho = init.rho;
  const LindbladFast fast(sched, noise);
  const PulseEnvelope env = sched.pulse.envelope();
  auto snapshot = [&] {
    return QuantumState::mixed(lay, Mat(0.5 * (rho + rho.adjoint())));
  };

  double sim = 0, lab = 0;
  size_t next = 0;
  record_state(tr, snapshot(), sim, lab);
  if (!times.empty()) ++next; // times[0] == 0 already recorded

  long seg_idx = 0;
  for (const Segment& seg : sched.segments) {
    const bool bg = seg.ham >= 0;
    const SpMat& kk = seg.is_pulse ? (bg ? fast.k[seg.ham] : fast.k_free)
                                   : fast.k[seg.ham];
    const SpMat& ka = seg.is_pulse ? (bg ? fast.kadj[seg.ham] : fast.kadj_free)
                                   : fast.kadj[seg.ham];
    const double wmax =
        seg.is_pulse
            ? env.peak() * lay.n_qubits + (bg ? sched.ham_radius[seg.ham] : 0.0)
            : sched.ham_radius[seg.ham];
    const double h = step_size(seg.duration, wmax, seg.is_pulse, seg.duration);
    const double sim_rate = seg.is_pulse ? 0.0 : 0.5;
    const double seg_start = lab;
    const double seg_end = seg_start + seg.duration;

    double local = 0;
    auto advance_to = [&](double target) {
      const double span = target - local;
      if (span <= tol) return;
      const int nsub = chunk_substeps(span, h, seg_idx);
      rk4_span(rho, span, nsub, [&](const Mat& r, double tl) {
        return fast.rhs(r, kk, ka, seg.is_pulse ? env.amplitude(local + tl) : 0.0);
      });
      local = target;
    };

    if (times.empty()) {
      advance_to(seg.duration);
      sim += sim_rate * seg.duration;
      lab = seg_end;
      record_state(tr, snapshot(), sim, lab);
    } else {
      while (next < times.size() && times[next] <= seg_end + tol) {
        advance_to(std::clamp(times[next] - seg_start, 0.0, seg.duration));
        record_state(tr, snapshot(), sim + sim_rate * local, times[next]);
        ++next;
      }
      advance_to(seg.duration);
      sim += sim_rate * seg.duration;
      lab = seg_end;
    }
    ++seg_idx;
  }
  return tr;
}

} // namespace digirabi::dynamics
