#pragma once

#include <memory>
#include <span>
#include <vector>

#include "kglri/fft.hpp"
#include "kglri/field.hpp"

namespace kglri {

// Transform context for one grid: FFT plans plus the per-axis phase tables
// that anchor coefficients to the e^{i xi_phys . x} basis (so the xi = 0
// coefficient is the mean of the function regardless of where the box
// starts). Immutable after construction and shareable across threads.
class SpectralContext {
 public:
  explicit SpectralContext(const TorusGrid& grid);

  const TorusGrid& grid() const { return grid_; }

  // Collocation values -> Fourier coefficients. The result is made exactly
  // Hermitian-symmetric, so downstream real-even multipliers keep it so.
  SpectralField to_spectral(std::span<const double> values) const;

  // Fourier coefficients -> collocation values. Throws if the imaginary
  // residue exceeds 1e-12 relative to the largest sample, which indicates
  // coefficients that no longer describe a real function.
  std::vector<double> to_physical(const SpectralField& field) const;

  // Spectral partial derivative along one axis (multiplier i*xi_phys).
  // The unpaired Nyquist mode is zeroed to keep the derivative real.
  SpectralField derivative(const SpectralField& field, int axis) const;

  // Pointwise |grad u|^2 on the grid, summed over axes.
  std::vector<double> gradient_squared(const SpectralField& field) const;

 private:
  TorusGrid grid_;
  std::shared_ptr<const FftEngine> fft_;
  // phase_[axis][index] = e^{-i wavenumber(index) a}
  std::vector<std::vector<std::complex<double>>> phase_;
};

// ||f||_{H^nu} = sqrt( L^d sum (1+|xi_phys|^2)^nu |f_hat(xi)|^2 ), nu >= 0.
// nu = 0 is the L^2 norm.
double sobolev_norm(const SpectralField& field, double nu);

// Diagonal operator: out_hat(xi) = sigma(xi) * f_hat(xi). sigma must be
// FFT-ordered and real; even symbols preserve Hermitian symmetry exactly.
SpectralField apply_symbol(const SpectralField& field,
                           std::span<const double> sigma);

// Largest |conj(u_hat(-xi)) - u_hat(xi)| over all mode pairs.
double hermitian_defect(const SpectralField& field);

// Force exact Hermitian symmetry by averaging mode pairs in place.
void symmetrize(SpectralField& field);

// Truncate to a coarser grid over the same box (modes |xi| < n_coarse/2,
// coarse Nyquist zeroed). The L^2-orthogonal projection in coefficient form.
SpectralField restrict_to(const SpectralField& field, const TorusGrid& coarse);

// Zero all modes with any axis |mode| > n/3 (the 2/3 dealiasing rule).
void dealias(SpectralField& field);

bool all_finite(const SpectralField& field);
double max_abs(const SpectralField& field);

}  // namespace kglri
