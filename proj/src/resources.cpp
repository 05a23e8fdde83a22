#include "digirabi/resources.hpp"

#include <cmath>
#include <stdexcept>

namespace digirabi::resources {

void ResourceQuery::validate() const {
  dicke.validate();
  if (fock_cutoff < 0)
    throw std::invalid_argument("fock_cutoff must be >= 0");
  if (!std::isfinite(t) || t < 0)
    throw std::invalid_argument("time must be finite and >= 0");
  if (!std::isfinite(epsilon) || !(epsilon > 0))
    throw std::invalid_argument("error budget must be > 0");
  if (k < 1) throw std::invalid_argument("fractal depth must be >= 1");
}

double dicke_norm_bound(const ResourceQuery& q) {
  q.validate();
  const models::RabiParams& r = q.dicke.rabi;
  const double m = q.fock_cutoff;
  return r.omega_r * m +
         q.dicke.n_qubits * (r.omega_q + 2.0 * std::abs(r.g) * std::sqrt(m + 1.0));
}

double gate_count_bound(const ResourceQuery& q) {
  const double lambda = dicke_norm_bound(q); // validates
  if (q.t == 0) return 0.0;
  const double exponent = 1.0 + 1.0 / (2.0 * q.k);
  return 2.0 * std::pow(5.0, 2.0 * q.k) *
         std::pow(2.0 * q.t * lambda, exponent) /
         std::pow(q.epsilon, 1.0 / (2.0 * q.k));
}

double trotter_error_estimate(const Operator& h1, const Operator& h2,
                              double t, int n) {
  if (!(h1.layout == h2.layout))
    throw std::invalid_argument("operator layouts differ");
  if (!h1.hermitian || !h2.hermitian)
    throw std::invalid_argument("trotter estimate requires hermitian inputs");
  if (!std::isfinite(t) || t < 0)
    throw std::invalid_argument("time must be finite and >= 0");
  if (n < 1) throw std::invalid_argument("step count must be >= 1");
  const Mat comm = h1.mat * h2.mat - h2.mat * h1.mat;
  return t * t / (2.0 * n) * spectral_norm(comm);
}

} // namespace digirabi::resources
