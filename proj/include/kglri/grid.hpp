#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace kglri {

// Uniform collocation grid on the periodic box [a,b]^dim with n points per
// axis. Nodes are x_j = a + j*(b-a)/n; x_n is identified with x_0.
struct TorusGrid {
  int dim = 1;    // 1, 2 or 3
  int n = 0;      // points per axis, even, >= 4
  double a = 0.0;
  double b = 0.0;

  double length() const { return b - a; }
  double spacing() const { return length() / n; }

  std::size_t size() const {
    std::size_t s = 1;
    for (int k = 0; k < dim; ++k) s *= static_cast<std::size_t>(n);
    return s;
  }

  // Signed integer mode for an FFT-ordered index along one axis:
  // 0,1,...,n/2-1,-n/2,...,-1.
  int mode(int index) const { return index < n / 2 ? index : index - n; }

  bool is_nyquist(int index) const { return index == n / 2; }

  // Physical wavenumber 2*pi*mode/L of an FFT-ordered axis index.
  double wavenumber(int index) const {
    return 2.0 * 3.14159265358979323846 * mode(index) / length();
  }

  double node(int index) const { return a + index * spacing(); }

  bool operator==(const TorusGrid&) const = default;
};

inline TorusGrid make_grid(int dim, int n, double a, double b) {
  if (dim < 1 || dim > 3)
    throw std::invalid_argument("grid: dim must be 1, 2 or 3");
  if (n < 4 || n % 2 != 0)
    throw std::invalid_argument("grid: n must be even and >= 4");
  if (!(b > a)) throw std::invalid_argument("grid: requires b > a");
  return TorusGrid{dim, n, a, b};
}

// Decompose a flat row-major index into per-axis FFT indices.
inline std::array<int, 3> unflatten(const TorusGrid& g, std::size_t flat) {
  std::array<int, 3> idx{0, 0, 0};
  for (int k = g.dim - 1; k >= 0; --k) {
    idx[k] = static_cast<int>(flat % g.n);
    flat /= g.n;
  }
  return idx;
}

inline std::size_t flatten(const TorusGrid& g, const std::array<int, 3>& idx) {
  std::size_t flat = 0;
  for (int k = 0; k < g.dim; ++k)
    flat = flat * g.n + static_cast<std::size_t>(idx[k]);
  return flat;
}

}  // namespace kglri
