#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "kglri/grid.hpp"

namespace kglri {

// Truncated Fourier coefficients of a real periodic function. Coefficients
// are stored in FFT order (row-major over axes, modes 0..n/2-1,-n/2..-1 per
// axis) with respect to the basis e^{i xi_phys . x}, so coeffs[0] is the mean
// of the function. Real fields satisfy u_hat(-xi) = conj(u_hat(xi)).
struct SpectralField {
  TorusGrid grid;
  std::vector<std::complex<double>> coeffs;

  SpectralField() = default;
  explicit SpectralField(const TorusGrid& g) : grid(g), coeffs(g.size()) {}
};

// Per-mode frequencies omega_xi = sqrt(rho + |xi_phys|^2), the spectral
// symbol of sqrt(-Laplace + rho). FFT-ordered, immutable after construction.
struct SymbolTable {
  TorusGrid grid;
  double rho = 0.0;
  std::vector<double> omega;
};

inline SymbolTable make_symbols(const TorusGrid& grid, double rho) {
  if (rho < 0.0) throw std::invalid_argument("symbols: rho must be >= 0");
  SymbolTable t;
  t.grid = grid;
  t.rho = rho;
  t.omega.resize(grid.size());
  for (std::size_t i = 0; i < t.omega.size(); ++i) {
    auto idx = unflatten(grid, i);
    double k2 = 0.0;
    for (int k = 0; k < grid.dim; ++k) {
      double w = grid.wavenumber(idx[k]);
      k2 += w * w;
    }
    t.omega[i] = std::sqrt(rho + k2);
  }
  return t;
}

}  // namespace kglri
