#include "kglri/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kglri {

namespace {

// Partner flat index of the mode -xi.
std::size_t conjugate_index(const TorusGrid& g, std::size_t flat) {
  auto idx = unflatten(g, flat);
  std::array<int, 3> mirror{0, 0, 0};
  for (int k = 0; k < g.dim; ++k) mirror[k] = idx[k] == 0 ? 0 : g.n - idx[k];
  return flatten(g, mirror);
}

}  // namespace

SpectralContext::SpectralContext(const TorusGrid& grid)
    : grid_(grid), fft_(std::make_shared<FftEngine>(grid)) {
  phase_.resize(grid.dim);
  const bool symmetric_box = grid.a == -grid.b;
  for (int k = 0; k < grid.dim; ++k) {
    phase_[k].resize(grid.n);
    for (int i = 0; i < grid.n; ++i) {
      if (symmetric_box) {
        // e^{-i (2 pi m / L)(-L/2)} = e^{i pi m} = (-1)^m, exact.
        phase_[k][i] = (grid.mode(i) % 2 == 0) ? 1.0 : -1.0;
      } else {
        double arg = -grid.wavenumber(i) * grid.a;
        phase_[k][i] = {std::cos(arg), std::sin(arg)};
      }
    }
  }
}

SpectralField SpectralContext::to_spectral(std::span<const double> values) const {
  if (values.size() != grid_.size())
    throw std::invalid_argument("to_spectral: array shape does not match grid");
  std::vector<std::complex<double>> buf(values.begin(), values.end());
  SpectralField out(grid_);
  fft_->forward(buf.data(), out.coeffs.data());
  const double scale = 1.0 / static_cast<double>(grid_.size());
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) {
    auto idx = unflatten(grid_, i);
    std::complex<double> p = phase_[0][idx[0]];
    for (int k = 1; k < grid_.dim; ++k) p *= phase_[k][idx[k]];
    out.coeffs[i] *= p * scale;
  }
  symmetrize(out);
  return out;
}

std::vector<double> SpectralContext::to_physical(const SpectralField& field) const {
  if (field.grid != grid_)
    throw std::invalid_argument("to_physical: field grid does not match context");
  std::vector<std::complex<double>> buf(field.coeffs.size());
  for (std::size_t i = 0; i < buf.size(); ++i) {
    auto idx = unflatten(grid_, i);
    std::complex<double> p = phase_[0][idx[0]];
    for (int k = 1; k < grid_.dim; ++k) p *= phase_[k][idx[k]];
    buf[i] = field.coeffs[i] * std::conj(p);
  }
  std::vector<std::complex<double>> phys(buf.size());
  fft_->backward(buf.data(), phys.data());

  double scale = 0.0, imax = 0.0;
  for (const auto& z : phys) {
    scale = std::max(scale, std::abs(z.real()));
    imax = std::max(imax, std::abs(z.imag()));
  }
  if (imax > 1e-12 * std::max(scale, 1e-100))
    throw std::runtime_error(
        "to_physical: imaginary residue exceeds tolerance (coefficients are "
        "not Hermitian-symmetric; upstream corruption)");
  std::vector<double> out(phys.size());
  for (std::size_t i = 0; i < phys.size(); ++i) out[i] = phys[i].real();
  return out;
}

SpectralField SpectralContext::derivative(const SpectralField& field,
                                          int axis) const {
  if (field.grid != grid_)
    throw std::invalid_argument("derivative: field grid does not match context");
  if (axis < 0 || axis >= grid_.dim)
    throw std::invalid_argument("derivative: axis out of range");
  SpectralField out(grid_);
  for (std::size_t i = 0; i < field.coeffs.size(); ++i) {
    auto idx = unflatten(grid_, i);
    if (grid_.is_nyquist(idx[axis])) {
      out.coeffs[i] = 0.0;
      continue;
    }
    double w = grid_.wavenumber(idx[axis]);
    out.coeffs[i] = std::complex<double>(0.0, w) * field.coeffs[i];
  }
  return out;
}

std::vector<double> SpectralContext::gradient_squared(
    const SpectralField& field) const {
  std::vector<double> acc(grid_.size(), 0.0);
  for (int axis = 0; axis < grid_.dim; ++axis) {
    std::vector<double> d = to_physical(derivative(field, axis));
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += d[i] * d[i];
  }
  return acc;
}

double sobolev_norm(const SpectralField& field, double nu) {
  if (nu < 0.0) throw std::invalid_argument("sobolev_norm: nu must be >= 0");
  const TorusGrid& g = field.grid;
  double boxvol = 1.0;
  for (int k = 0; k < g.dim; ++k) boxvol *= g.length();
  double sum = 0.0;
  for (std::size_t i = 0; i < field.coeffs.size(); ++i) {
    auto idx = unflatten(g, i);
    double k2 = 0.0;
    for (int k = 0; k < g.dim; ++k) {
      double w = g.wavenumber(idx[k]);
      k2 += w * w;
    }
    sum += std::pow(1.0 + k2, nu) * std::norm(field.coeffs[i]);
  }
  return std::sqrt(boxvol * sum);
}

SpectralField apply_symbol(const SpectralField& field,
                           std::span<const double> sigma) {
  if (sigma.size() != field.coeffs.size())
    throw std::invalid_argument("apply_symbol: multiplier shape mismatch");
  SpectralField out(field.grid);
  for (std::size_t i = 0; i < sigma.size(); ++i)
    out.coeffs[i] = sigma[i] * field.coeffs[i];
  return out;
}

double hermitian_defect(const SpectralField& field) {
  const TorusGrid& g = field.grid;
  double worst = 0.0;
  for (std::size_t i = 0; i < field.coeffs.size(); ++i) {
    std::size_t j = conjugate_index(g, i);
    if (j < i) continue;
    worst = std::max(worst,
                     std::abs(std::conj(field.coeffs[j]) - field.coeffs[i]));
  }
  return worst;
}

void symmetrize(SpectralField& field) {
  const TorusGrid& g = field.grid;
  for (std::size_t i = 0; i < field.coeffs.size(); ++i) {
    std::size_t j = conjugate_index(g, i);
    if (j == i) {
      field.coeffs[i] = field.coeffs[i].real();
    } else if (j > i) {
      std::complex<double> avg =
          0.5 * (field.coeffs[i] + std::conj(field.coeffs[j]));
      field.coeffs[i] = avg;
      field.coeffs[j] = std::conj(avg);
    }
  }
}

SpectralField restrict_to(const SpectralField& field, const TorusGrid& coarse) {
  const TorusGrid& fine = field.grid;
  if (coarse.dim != fine.dim || coarse.a != fine.a || coarse.b != fine.b ||
      coarse.n > fine.n)
    throw std::invalid_argument("restrict_to: incompatible grids");
  SpectralField out(coarse);
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) {
    auto idx = unflatten(coarse, i);
    std::array<int, 3> fidx{0, 0, 0};
    bool keep = true;
    for (int k = 0; k < coarse.dim; ++k) {
      if (coarse.is_nyquist(idx[k])) {
        keep = false;
        break;
      }
      int m = coarse.mode(idx[k]);
      fidx[k] = m >= 0 ? m : fine.n + m;
    }
    out.coeffs[i] = keep ? field.coeffs[flatten(fine, fidx)] : 0.0;
  }
  return out;
}

void dealias(SpectralField& field) {
  const TorusGrid& g = field.grid;
  const int cutoff = g.n / 3;
  for (std::size_t i = 0; i < field.coeffs.size(); ++i) {
    auto idx = unflatten(g, i);
    for (int k = 0; k < g.dim; ++k) {
      if (std::abs(g.mode(idx[k])) > cutoff) {
        field.coeffs[i] = 0.0;
        break;
      }
    }
  }
}

bool all_finite(const SpectralField& field) {
  for (const auto& z : field.coeffs)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

double max_abs(const SpectralField& field) {
  double m = 0.0;
  for (const auto& z : field.coeffs)
    m = std::max({m, std::abs(z.real()), std::abs(z.imag())});
  return m;
}

}  // namespace kglri
