#include "digirabi/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace digirabi::observables {

double fidelity(const QuantumState& a, const QuantumState& b) {
  if (!(a.layout == b.layout))
    throw std::invalid_argument("state layouts differ");
  if (a.density && b.density)
    throw std::invalid_argument("fidelity between two density matrices is not supported");
  if (!a.density && !b.density) return std::norm(a.psi.dot(b.psi));
  const QuantumState& p = a.density ? b : a;
  const QuantumState& d = a.density ? a : b;
  return p.psi.dot(d.rho * p.psi).real();
}

FidelitySeries fidelity_series(const std::vector<double>& times,
                               const std::vector<QuantumState>& a,
                               const std::vector<QuantumState>& b) {
  if (times.size() != a.size() || a.size() != b.size())
    throw std::invalid_argument("fidelity_series inputs differ in length");
  FidelitySeries fs;
  fs.times = times;
  fs.values.reserve(a.size());
  for (size_t k = 0; k < a.size(); ++k) fs.values.push_back(fidelity(a[k], b[k]));
  return fs;
}

// The scalar observables below use the index structure directly (the mode
// index is contiguous within each qubit configuration), costing O(dim)
// instead of building a dim^2 operator per call.

double photon_number(const QuantumState& s) {
  const int md = s.layout.mode_dim();
  double n = 0;
  if (s.density) {
    for (long i = 0; i < s.layout.dim(); ++i)
      n += static_cast<double>(i % md) * s.rho(i, i).real();
  } else {
    for (long i = 0; i < s.layout.dim(); ++i)
      n += static_cast<double>(i % md) * std::norm(s.psi(i));
  }
  return n;
}

double qubit_inversion(const QuantumState& s, int qubit) {
  const SpaceLayout& lay = s.layout;
  if (qubit < 0 || qubit >= lay.n_qubits)
    throw std::invalid_argument("qubit index out of range");
  const int md = lay.mode_dim();
  const int shift = lay.n_qubits - 1 - qubit;
  double z = 0;
  for (long i = 0; i < lay.dim(); ++i) {
    const int bit = (static_cast<int>(i / md) >> shift) & 1; // 0 = |e>
    const double sign = bit ? -1.0 : 1.0;
    z += sign * (s.density ? s.rho(i, i).real() : std::norm(s.psi(i)));
  }
  return z;
}

double qubit_inversion(const QuantumState& s) {
  double z = 0;
  for (int j = 0; j < s.layout.n_qubits; ++j) z += qubit_inversion(s, j);
  return z / s.layout.n_qubits;
}

double quadrature(const QuantumState& s, double theta) {
  const SpaceLayout& lay = s.layout;
  const int md = lay.mode_dim();
  // <a> = sum over q, m>=1 of sqrt(m) * <(q,m-1)| . |(q,m)>
  cd a(0, 0);
  for (int q = 0; q < lay.qubit_dim(); ++q)
    for (int m = 1; m < md; ++m) {
      const long hi = lay.index(q, m), lo = lay.index(q, m - 1);
      const double root = std::sqrt(static_cast<double>(m));
      a += root * (s.density ? s.rho(hi, lo) : std::conj(s.psi(lo)) * s.psi(hi));
    }
  return std::sqrt(2.0) * (a * std::exp(cd(0, -theta))).real();
}

double top_fock_population(const QuantumState& s) {
  const SpaceLayout& lay = s.layout;
  double p = 0;
  for (int q = 0; q < lay.qubit_dim(); ++q) {
    const long i = lay.index(q, lay.fock_cutoff);
    p += s.density ? s.rho(i, i).real() : std::norm(s.psi(i));
  }
  return p;
}

RevivalInfo revival_diagnostics(const std::vector<double>& times,
                                const std::vector<double>& series,
                                double prominence_frac) {
  if (times.size() != series.size())
    throw std::invalid_argument("times and series differ in length");
  if (prominence_frac < 0)
    throw std::invalid_argument("prominence fraction must be >= 0");
  RevivalInfo info;
  const long n = static_cast<long>(series.size());
  if (n < 3) return info;

  const double lo = *std::min_element(series.begin(), series.end());
  const double hi = *std::max_element(series.begin(), series.end());
  const double range = hi - lo;
  if (range <= 0) return info; // constant series: no peaks
  const double threshold = prominence_frac * range;

  for (long i = 1; i + 1 < n; ++i) {
    if (!(series[i] > series[i - 1] && series[i] > series[i + 1])) continue;
    // Topographic prominence: lowest point on the way to the nearest higher
    // ground on each side (or the series edge).
    double left_min = series[i];
    for (long k = i - 1; k >= 0 && series[k] <= series[i]; --k)
      left_min = std::min(left_min, series[k]);
    double right_min = series[i];
    for (long k = i + 1; k < n && series[k] <= series[i]; ++k)
      right_min = std::min(right_min, series[k]);
    if (series[i] - std::max(left_min, right_min) >= threshold) {
      info.peak_indices.push_back(static_cast<int>(i));
      info.peak_times.push_back(times[i]);
    }
  }

  if (info.peak_times.size() >= 2) {
    double spacing = 0;
    for (size_t k = 1; k < info.peak_times.size(); ++k)
      spacing += info.peak_times[k] - info.peak_times[k - 1];
    info.period = spacing / (info.peak_times.size() - 1);
    info.has_period = true;
  }
  return info;
}

} // namespace digirabi::observables
