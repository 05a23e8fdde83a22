// hilbert.hpp — composite qubit⊗mode space: layouts, states, operators.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>
#include <vector>

namespace digirabi {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr double kHermTol = 1e-12;    // max-abs tolerance for A == A†
inline constexpr double kUnitaryTol = 1e-10; // max-abs tolerance for U†U == I

// Basis convention: qubit 1 is the leftmost tensor factor, the mode is the
// rightmost.  Each qubit orders (|e>, |g>), so sigma_z = diag(+1, -1) and the
// all-excited ⊗ vacuum state has index 0.  Fock levels run 0..fock_cutoff.
struct SpaceLayout {
  int n_qubits = 1;
  int fock_cutoff = 1;

  int qubit_dim() const { return 1 << n_qubits; }
  int mode_dim() const { return fock_cutoff + 1; }
  long dim() const { return static_cast<long>(qubit_dim()) * mode_dim(); }

  // qubit_bits: bit (n_qubits-1-j) holds qubit j's state, 0 = |e>, 1 = |g>.
  long index(int qubit_bits, int fock) const;

  void validate() const; // throws std::invalid_argument
  bool operator==(const SpaceLayout& o) const {
    return n_qubits == o.n_qubits && fock_cutoff == o.fock_cutoff;
  }
};

// Dense operator tagged with the layout it acts on.  `hermitian` is measured
// at construction; `unitary` only when a factory asserts it (the check is
// cubic in the dimension).
struct Operator {
  SpaceLayout layout;
  Mat mat;
  bool hermitian = false;
  bool unitary = false;

  Operator() = default;
  Operator(const SpaceLayout& lay, Mat m);

  long dim() const { return mat.rows(); }
};

// Pure state (column vector) or density matrix on a layout.  Construction
// checks normalization (pure) or unit trace + hermiticity (density);
// positivity is cubic-cost and checked separately via min_eigenvalue().
struct QuantumState {
  SpaceLayout layout;
  bool density = false;
  Vec psi; // valid when !density
  Mat rho; // valid when density

  static QuantumState pure(const SpaceLayout& lay, Vec v);
  static QuantumState mixed(const SpaceLayout& lay, Mat r);

  // Product basis state: qubits per `qubit_bits`, mode in |fock>.
  static QuantumState basis(const SpaceLayout& lay, int qubit_bits, int fock);

  QuantumState as_density() const;
  double trace() const;          // 1 for pure states by construction
  double min_eigenvalue() const; // density only
};

enum class Pauli { X, Y, Z, Plus, Minus };

Mat pauli_block(Pauli p); // 2x2 matrix in the (|e>, |g>) basis

// Single-site operators embedded in the full space.
Operator make_identity(const SpaceLayout& lay);
Operator make_destroy(const SpaceLayout& lay);                   // a
Operator make_create(const SpaceLayout& lay);                    // a†
Operator make_number(const SpaceLayout& lay);                    // a†a
Operator make_pauli(const SpaceLayout& lay, int qubit, Pauli p); // 0-based
Operator make_collective(const SpaceLayout& lay, Pauli p);       // Σ_j pauli_j

// Weighted operator sum Σ c_k A_k; flags re-measured on the result.
Operator embed_and_add(const std::vector<std::pair<cd, Operator>>& terms);

// Kronecker product, row-major convention matching SpaceLayout::index.
Mat kron(const Mat& a, const Mat& b);

// <psi|A|psi> or tr(rho A); imaginary part is rounding noise for hermitian A.
cd expectation(const QuantumState& s, const Operator& a);

// exp(-i H t) via Hermitian eigendecomposition; result is flagged unitary
// and verified against kUnitaryTol.
Operator propagator(const Operator& h, double t);

double spectral_radius(const Operator& h); // max |eigenvalue|, hermitian only
double spectral_norm(const Mat& a);        // largest singular value

} // namespace digirabi
