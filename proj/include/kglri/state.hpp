#pragma once

#include "kglri/field.hpp"

namespace kglri {

// Solution pair (u, v) ~ (u, du/dt) at time t, both on one grid.
struct State {
  double t = 0.0;
  SpectralField u;
  SpectralField v;
};

}  // namespace kglri
