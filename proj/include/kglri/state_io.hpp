#pragma once

#include <string>

#include "kglri/state.hpp"

namespace kglri {

// Versioned little-endian binary state file:
//   bytes 0..7   magic "KGLRIST1"
//   u32          format version (1)
//   u32          dimension d
//   u32          points per axis n_x
//   u32          reserved (0)
//   f64          a, b, rho, t
//   f64 pairs    (re, im) of u_hat, row-major FFT mode order, n_x^d entries
//   f64 pairs    (re, im) of v_hat, same layout
// Binary round trips are bit-exact.
void write_state(const std::string& path, const State& state, double rho);

struct LoadedState {
  State state;
  double rho = 0.0;
};

LoadedState read_state(const std::string& path);

}  // namespace kglri
