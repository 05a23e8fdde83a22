// resources.hpp — norm, gate-count, and Trotter-error bounds.
#pragma once

#include "digirabi/hilbert.hpp"
#include "digirabi/models.hpp"

namespace digirabi::resources {

// Inputs for the scaling bounds: model, Fock truncation M, simulated time,
// error budget, and fractal depth k of the product formula (k >= 2 is only
// ever evaluated in the bound, never executed).
struct ResourceQuery {
  models::DickeParams dicke;
  int fock_cutoff = 1; // M
  double t = 0;        // simulated time, ns
  double epsilon = 0;  // dimensionless error budget
  int k = 1;
  void validate() const;
};

// omega_r^R M + N (omega_q^R + 2|g^R| sqrt(M+1)); dominates the spectral
// radius of the truncated collective Hamiltonian.
double dicke_norm_bound(const ResourceQuery& q);

// 2 * 5^{2k} * (2 t Lambda)^{1+1/2k} / epsilon^{1/2k} with Lambda the norm
// bound above.  Real-valued; callers may ceil.
double gate_count_bound(const ResourceQuery& q);

// First-order product-formula error bound (t^2 / 2n) * ||[H1, H2]||_2.
double trotter_error_estimate(const Operator& h1, const Operator& h2,
                              double t, int n);

} // namespace digirabi::resources
