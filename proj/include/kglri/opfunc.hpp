#pragma once

#include <vector>

#include "kglri/field.hpp"

namespace kglri {

// Scalar coefficient functions of the integrator, m = h*omega >= 0:
//
//   sinc(m) = sin(m)/m
//   Phi1(m) = sinc(m)/2
//   Phi2(m) = (cos(m) + sinc(m))/2
//   Psi1(m) = (sinc(m) - cos(m)) / (2 m^2)
//   Psi2(m) = (1 - cos(m) - (m/2) sin(m)) / m^4
//
// Each has a removable singularity at m = 0 (limits 1, 1/2, 1, 1/6, 1/24).
// Near zero the direct formulas cancel (quadratically for Psi1, quartically
// for Psi2), so below a per-function threshold we switch to a truncated even
// Taylor series:
//
//   sinc: 4 terms, truncation < 3e-38 at tau
//   Psi1: sum_j (-1)^j (j+1) m^(2j)/(2j+3)!, 7 terms, truncation < 3e-28
//   Psi2: sum_j (-1)^j (j+1) m^(2j)/(2j+4)!, 9 terms, truncation < 4e-26
//
// The thresholds below keep both the series truncation and the direct
// formula's cancellation error under 1e-13 absolute at the switch point.
namespace opfunc {

inline constexpr double kSincTau = 1e-4;
inline constexpr double kPsi1Tau = 0.1;
inline constexpr double kPsi2Tau = 0.5;

double sinc(double m);
double phi1(double m);
double phi2(double m);
double psi1(double m);
double psi2(double m);

// Both branches, exposed so threshold continuity can be checked directly.
double sinc_direct(double m);
double sinc_series(double m);
double psi1_direct(double m);
double psi1_series(double m);
double psi2_direct(double m);
double psi2_series(double m);

// psi2 with an explicit switch threshold (selftest corruption hook).
double psi2_with_threshold(double m, double tau);

}  // namespace opfunc

// Per-mode multiplier arrays for one stepsize h, evaluated at m = h*omega.
// omega_sinc is the symbol of A*h*sinc(h sqrt(A)), i.e. omega^2*h*sinc(h*omega).
// Immutable after build and shareable across threads.
struct CoefficientSet {
  double h = 0.0;
  std::vector<double> cos_h;
  std::vector<double> sinc_h;
  std::vector<double> phi1;
  std::vector<double> phi2;
  std::vector<double> psi1;
  std::vector<double> psi2;
  std::vector<double> omega_sinc;
};

CoefficientSet build_coefficients(const SymbolTable& symbols, double h);

}  // namespace kglri
