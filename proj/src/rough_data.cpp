#include "kglri/rough_data.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "kglri/spectral.hpp"

namespace kglri {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double to_unit(std::uint64_t u) {
  return static_cast<double>(u >> 11) * 0x1.0p-53;
}

// Uniform complex draw in [0,1)x[0,1) keyed by (seed, stream, mode vector).
// The draw is attached to the canonical representative of the +/-xi pair
// (first nonzero component positive) and conjugated for the mirror, which
// makes the coefficient field Hermitian by construction. xi = 0 gets a real
// draw.
std::complex<double> mode_draw(std::uint64_t seed, std::uint64_t stream,
                               const std::array<int, 3>& xi, int dim) {
  bool zero = true, flip = false;
  for (int k = 0; k < dim; ++k) {
    if (xi[k] != 0) {
      zero = false;
      flip = xi[k] < 0;
      break;
    }
  }
  std::uint64_t s = mix64(seed ^ 0x8c6f5a3d1b2e4f07ULL);
  s = mix64(s ^ stream);
  for (int k = 0; k < dim; ++k) {
    std::int64_t c = flip ? -xi[k] : xi[k];
    s = mix64(s ^ static_cast<std::uint64_t>(c));
  }
  double re = to_unit(mix64(s ^ 1));
  double im = zero ? 0.0 : to_unit(mix64(s ^ 2));
  return {re, flip ? -im : im};
}

int norm_band(int dim) {
  switch (dim) {
    case 1: return 65536;
    case 2: return 1024;
    default: return 128;
  }
}

struct Envelope {
  double exponent;  // (1+|xi_phys|^2)^{-exponent/2}
  std::uint64_t stream;
};

// H^s norm (squared, per unit box volume) of the raw draw field over the
// fixed band: sum over band modes of (1+|xi_phys|^2)^s |Z env|^2.
double band_norm_sq(std::uint64_t seed, const Envelope& env, double s,
                    const TorusGrid& grid) {
  const int half = norm_band(grid.dim) / 2;
  const double k0 = 2.0 * kPi / grid.length();
  const int lo = -(half - 1), hi = half - 1;
  const int lo1 = grid.dim > 1 ? lo : 0, hi1 = grid.dim > 1 ? hi : 0;
  const int lo2 = grid.dim > 2 ? lo : 0, hi2 = grid.dim > 2 ? hi : 0;
  std::array<int, 3> xi{0, 0, 0};
  double total = 0.0;
  for (int i = lo; i <= hi; ++i) {
    xi[0] = i;
    for (int j = lo1; j <= hi1; ++j) {
      xi[1] = j;
      for (int k = lo2; k <= hi2; ++k) {
        xi[2] = k;
        double k2 = 0.0;
        for (int a = 0; a < grid.dim; ++a) k2 += (k0 * xi[a]) * (k0 * xi[a]);
        double w = 1.0 + k2;
        double amp2 = std::norm(mode_draw(seed, env.stream, xi, grid.dim)) *
                      std::pow(w, -env.exponent);
        total += std::pow(w, s) * amp2;
      }
    }
  }
  return total;
}

SpectralField fill_field(std::uint64_t seed, const Envelope& env, double scale,
                         const TorusGrid& grid) {
  SpectralField f(grid);
  const double k0 = 2.0 * kPi / grid.length();
  const int band_half = norm_band(grid.dim) / 2;
  for (std::size_t flat = 0; flat < f.coeffs.size(); ++flat) {
    auto idx = unflatten(grid, flat);
    std::array<int, 3> xi{0, 0, 0};
    bool skip = false;
    for (int k = 0; k < grid.dim; ++k) {
      if (grid.is_nyquist(idx[k])) {
        skip = true;
        break;
      }
      xi[k] = grid.mode(idx[k]);
      if (std::abs(xi[k]) >= band_half) skip = true;
    }
    if (skip) {
      f.coeffs[flat] = 0.0;
      continue;
    }
    double k2 = 0.0;
    for (int a = 0; a < grid.dim; ++a) k2 += (k0 * xi[a]) * (k0 * xi[a]);
    f.coeffs[flat] = mode_draw(seed, env.stream, xi, grid.dim) *
                     (std::pow(1.0 + k2, -0.5 * env.exponent) * scale);
  }
  return f;
}

}  // namespace

RoughData rough_data(double theta, std::uint64_t seed, const TorusGrid& grid) {
  if (!(theta > 0.5))
    throw std::invalid_argument("rough_data: theta must be > 1/2");
  double boxvol = 1.0;
  for (int k = 0; k < grid.dim; ++k) boxvol *= grid.length();

  Envelope env_u{theta + 0.5, 0x75u};
  Envelope env_v{theta - 0.5, 0x76u};
  double nu = std::sqrt(boxvol * band_norm_sq(seed, env_u, theta, grid));
  double nv = std::sqrt(boxvol * band_norm_sq(seed, env_v, theta - 1.0, grid));

  RoughData d;
  d.theta = theta;
  d.seed = seed;
  d.u0 = fill_field(seed, env_u, 1.0 / nu, grid);
  d.v0 = fill_field(seed, env_v, 1.0 / nv, grid);
  return d;
}

RoughData single_mode_data(const TorusGrid& grid) {
  RoughData d;
  d.theta = std::numeric_limits<double>::infinity();
  d.seed = 0;
  d.u0 = SpectralField(grid);
  d.v0 = SpectralField(grid);
  std::array<int, 3> plus{1, 0, 0}, minus{grid.n - 1, 0, 0};
  d.u0.coeffs[flatten(grid, plus)] = 0.5;
  d.u0.coeffs[flatten(grid, minus)] = 0.5;
  return d;
}

}  // namespace kglri
