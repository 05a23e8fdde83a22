#include "digirabi/hilbert.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace digirabi {

namespace {
const cd kI(0.0, 1.0);

bool is_hermitian(const Mat& m, double tol) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}
} // namespace

long SpaceLayout::index(int qubit_bits, int fock) const {
  if (qubit_bits < 0 || qubit_bits >= qubit_dim())
    throw std::invalid_argument("qubit_bits out of range");
  if (fock < 0 || fock > fock_cutoff)
    throw std::invalid_argument("fock level out of range");
  return static_cast<long>(qubit_bits) * mode_dim() + fock;
}

void SpaceLayout::validate() const {
  if (n_qubits < 1) throw std::invalid_argument("need at least one qubit");
  if (fock_cutoff < 0) throw std::invalid_argument("fock_cutoff must be >= 0");
  if (n_qubits > 20) throw std::invalid_argument("qubit register too large");
  if (dim() > (1L << 22))
    throw std::invalid_argument("composite dimension too large for dense storage");
}

Operator::Operator(const SpaceLayout& lay, Mat m) : layout(lay), mat(std::move(m)) {
  lay.validate();
  if (mat.rows() != layout.dim() || mat.cols() != layout.dim())
    throw std::invalid_argument("operator shape does not match layout");
  hermitian = is_hermitian(mat, kHermTol);
}

QuantumState QuantumState::pure(const SpaceLayout& lay, Vec v) {
  lay.validate();
  if (v.size() != lay.dim())
    throw std::invalid_argument("state length does not match layout");
  if (std::abs(v.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("pure state is not normalized");
  QuantumState s;
  s.layout = lay;
  s.psi = std::move(v);
  return s;
}

QuantumState QuantumState::mixed(const SpaceLayout& lay, Mat r) {
  lay.validate();
  if (r.rows() != lay.dim() || r.cols() != lay.dim())
    throw std::invalid_argument("density shape does not match layout");
  if (std::abs(r.trace().real() - 1.0) > 1e-9 || std::abs(r.trace().imag()) > 1e-10)
    throw std::invalid_argument("density matrix trace is not 1");
  if (!is_hermitian(r, 1e-10))
    throw std::invalid_argument("density matrix is not hermitian");
  QuantumState s;
  s.layout = lay;
  s.density = true;
  s.rho = std::move(r);
  return s;
}

QuantumState QuantumState::basis(const SpaceLayout& lay, int qubit_bits, int fock) {
  Vec v = Vec::Zero(lay.dim());
  v(lay.index(qubit_bits, fock)) = 1.0;
  return pure(lay, std::move(v));
}

QuantumState QuantumState::as_density() const {
  if (density) return *this;
  return mixed(layout, psi * psi.adjoint());
}

double QuantumState::trace() const {
  return density ? rho.trace().real() : psi.squaredNorm();
}

double QuantumState::min_eigenvalue() const {
  if (!density) throw std::logic_error("min_eigenvalue requires a density matrix");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho + rho.adjoint()),
                                        Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Mat pauli_block(Pauli p) {
  Mat m = Mat::Zero(2, 2);
  switch (p) {
    case Pauli::X: m << 0, 1, 1, 0; break;
    case Pauli::Y: m << 0, -kI, kI, 0; break;
    case Pauli::Z: m << 1, 0, 0, -1; break;
    case Pauli::Plus: m << 0, 1, 0, 0; break;  // |e><g|
    case Pauli::Minus: m << 0, 0, 1, 0; break; // |g><e|
  }
  return m;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Operator make_identity(const SpaceLayout& lay) {
  lay.validate();
  return Operator(lay, Mat::Identity(lay.dim(), lay.dim()));
}

Operator make_destroy(const SpaceLayout& lay) {
  lay.validate();
  const int md = lay.mode_dim();
  Mat a = Mat::Zero(md, md);
  for (int m = 1; m < md; ++m) a(m - 1, m) = std::sqrt(static_cast<double>(m));
  return Operator(lay, kron(Mat::Identity(lay.qubit_dim(), lay.qubit_dim()), a));
}

Operator make_create(const SpaceLayout& lay) {
  Operator a = make_destroy(lay);
  return Operator(lay, a.mat.adjoint());
}

Operator make_number(const SpaceLayout& lay) {
  lay.validate();
  const int md = lay.mode_dim();
  Mat n = Mat::Zero(md, md);
  for (int m = 0; m < md; ++m) n(m, m) = static_cast<double>(m);
  return Operator(lay, kron(Mat::Identity(lay.qubit_dim(), lay.qubit_dim()), n));
}

Operator make_pauli(const SpaceLayout& lay, int qubit, Pauli p) {
  lay.validate();
  if (qubit < 0 || qubit >= lay.n_qubits)
    throw std::invalid_argument("qubit index out of range");
  const long left = 1L << qubit;
  const long right = 1L << (lay.n_qubits - 1 - qubit);
  Mat m = kron(Mat::Identity(left, left), pauli_block(p));
  m = kron(m, Mat::Identity(right * lay.mode_dim(), right * lay.mode_dim()));
  return Operator(lay, std::move(m));
}

Operator make_collective(const SpaceLayout& lay, Pauli p) {
  Mat sum = Mat::Zero(lay.dim(), lay.dim());
  for (int j = 0; j < lay.n_qubits; ++j) sum += make_pauli(lay, j, p).mat;
  return Operator(lay, std::move(sum));
}

Operator embed_and_add(const std::vector<std::pair<cd, Operator>>& terms) {
  if (terms.empty()) throw std::invalid_argument("empty term list");
  const SpaceLayout lay = terms.front().second.layout;
  Mat sum = Mat::Zero(lay.dim(), lay.dim());
  for (const auto& [c, op] : terms) {
    if (!(op.layout == lay)) throw std::invalid_argument("term layouts differ");
    sum += c * op.mat;
  }
  return Operator(lay, std::move(sum));
}

cd expectation(const QuantumState& s, const Operator& a) {
  if (!(s.layout == a.layout))
    throw std::invalid_argument("state and operator layouts differ");
  if (s.density) {
    // tr(rho A) = sum_ij A_ij rho_ji, quadratic instead of a full product.
    return (a.mat.array() * s.rho.transpose().array()).sum();
  }
  return s.psi.dot(a.mat * s.psi); // Eigen dot conjugates the left factor
}

Operator propagator(const Operator& h, double t) {
  if (!h.hermitian)
    throw std::invalid_argument("propagator requires a hermitian generator");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h.mat + h.mat.adjoint()));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed");
  Vec phases(es.eigenvalues().size());
  for (long k = 0; k < phases.size(); ++k)
    phases(k) = std::exp(-kI * es.eigenvalues()(k) * t);
  Mat u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  Operator out(h.layout, std::move(u));
  const double dev =
      (out.mat.adjoint() * out.mat - Mat::Identity(out.dim(), out.dim()))
          .cwiseAbs()
          .maxCoeff();
  if (dev > kUnitaryTol)
    throw std::runtime_error("propagator failed the unitarity check");
  out.unitary = true;
  return out;
}

double spectral_radius(const Operator& h) {
  if (!h.hermitian)
    throw std::invalid_argument("spectral_radius requires a hermitian operator");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h.mat + h.mat.adjoint()),
                                        Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_norm(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a.adjoint() * a, Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues().maxCoeff();
  return top > 0 ? std::sqrt(top) : 0.0;
}

} // namespace digirabi
