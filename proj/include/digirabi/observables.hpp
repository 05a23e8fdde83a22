// observables.hpp — measured quantities: fidelity, populations, quadratures,
// collapse/revival diagnostics.
#pragma once

#include "digirabi/hilbert.hpp"

#include <vector>

namespace digirabi::observables {

// |<a|b>|^2 for two pure states, <psi|rho|psi> for pure/density pairs.
// Density/density pairs are rejected (Uhlmann fidelity is out of scope).
double fidelity(const QuantumState& a, const QuantumState& b);

struct FidelitySeries {
  std::vector<double> times;
  std::vector<double> values; // in [0, 1 + 1e-9]
};

// Pointwise fidelity between two state lists sampled on the same grid.
FidelitySeries fidelity_series(const std::vector<double>& times,
                               const std::vector<QuantumState>& a,
                               const std::vector<QuantumState>& b);

// <a†a>
double photon_number(const QuantumState& s);

// <sigma_z> of one qubit, and the collective mean Σ_j <sigma_z_j> / N.
double qubit_inversion(const QuantumState& s, int qubit);
double qubit_inversion(const QuantumState& s);

// <x_theta> with x_theta = (a e^{-i theta} + a† e^{i theta})/sqrt(2);
// theta = 0 gives x, theta = pi/2 gives p (normalized so [x, p] = i).
double quadrature(const QuantumState& s, double theta);

// Total population of the top Fock level |M> (truncation monitor).
double top_fock_population(const QuantumState& s);

// Local maxima whose topographic prominence exceeds prominence_frac times
// the series range, plus the mean inter-peak spacing.  Fewer than two peaks
// leave the period absent.
struct RevivalInfo {
  std::vector<int> peak_indices;
  std::vector<double> peak_times;
  bool has_period = false;
  double period = 0;
};

RevivalInfo revival_diagnostics(const std::vector<double>& times,
                                const std::vector<double>& series,
                                double prominence_frac = 0.05);

} // namespace digirabi::observables
