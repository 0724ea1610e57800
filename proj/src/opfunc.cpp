#include "kglri/opfunc.hpp"

#include <cmath>
#include <stdexcept>

namespace kglri {
namespace opfunc {

double sinc_direct(double m) { return std::sin(m) / m; }

double sinc_series(double m) {
  double m2 = m * m;
  return 1.0 + m2 * (-1.0 / 6.0 + m2 * (1.0 / 120.0 + m2 * (-1.0 / 5040.0)));
}

double sinc(double m) {
  return std::abs(m) < kSincTau ? sinc_series(m) : sinc_direct(m);
}

double phi1(double m) { return 0.5 * sinc(m); }

double phi2(double m) { return 0.5 * (std::cos(m) + sinc(m)); }

double psi1_direct(double m) {
  return (sinc_direct(m) - std::cos(m)) / (2.0 * m * m);
}

double psi1_series(double m) {
  // (j+1)/(2j+3)! for j = 0..6
  static constexpr double c[7] = {
      1.0 / 6.0,           -2.0 / 120.0,         3.0 / 5040.0,
      -4.0 / 362880.0,     5.0 / 39916800.0,     -6.0 / 6227020800.0,
      7.0 / 1307674368000.0};
  double m2 = m * m, acc = c[6];
  for (int j = 5; j >= 0; --j) acc = c[j] + m2 * acc;
  return acc;
}

double psi1(double m) {
  return std::abs(m) < kPsi1Tau ? psi1_series(m) : psi1_direct(m);
}

double psi2_direct(double m) {
  return (1.0 - std::cos(m) - 0.5 * m * std::sin(m)) / (m * m * m * m);
}

double psi2_series(double m) {
  // (j+1)/(2j+4)! for j = 0..8
  static constexpr double c[9] = {1.0 / 24.0,
                                  -2.0 / 720.0,
                                  3.0 / 40320.0,
                                  -4.0 / 3628800.0,
                                  5.0 / 479001600.0,
                                  -6.0 / 87178291200.0,
                                  7.0 / 20922789888000.0,
                                  -8.0 / 6402373705728000.0,
                                  9.0 / 2432902008176640000.0};
  double m2 = m * m, acc = c[8];
  for (int j = 7; j >= 0; --j) acc = c[j] + m2 * acc;
  return acc;
}

double psi2_with_threshold(double m, double tau) {
  return std::abs(m) < tau ? psi2_series(m) : psi2_direct(m);
}

double psi2(double m) { return psi2_with_threshold(m, kPsi2Tau); }

}  // namespace opfunc

CoefficientSet build_coefficients(const SymbolTable& symbols, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("build_coefficients: h must be > 0");
  const std::size_t n = symbols.omega.size();
  CoefficientSet c;
  c.h = h;
  c.cos_h.resize(n);
  c.sinc_h.resize(n);
  c.phi1.resize(n);
  c.phi2.resize(n);
  c.psi1.resize(n);
  c.psi2.resize(n);
  c.omega_sinc.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = symbols.omega[i];
    const double m = h * w;
    const double s = opfunc::sinc(m);
    c.cos_h[i] = std::cos(m);
    c.sinc_h[i] = s;
    c.phi1[i] = 0.5 * s;
    c.phi2[i] = 0.5 * (c.cos_h[i] + s);
    c.psi1[i] = opfunc::psi1(m);
    c.psi2[i] = opfunc::psi2(m);
    c.omega_sinc[i] = w * w * h * s;
  }
  return c;
}

}  // namespace kglri
