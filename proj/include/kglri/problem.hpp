#pragma once

#include <span>
#include <string>

#include "kglri/field.hpp"

namespace kglri {

enum class NonlinKind { Zero, Sine, Cubic };

// Pointwise nonlinearity f with derivatives f', f'' and antiderivative F
// (F' = f, F(0) = 0). The sine and zero entries have globally bounded
// derivatives; the cubic entry does not and is flagged accordingly (it is
// well behaved only on bounded states).
struct Nonlinearity {
  NonlinKind kind = NonlinKind::Zero;
  std::string name = "zero";
  double lambda = 1.0;       // cubic coefficient
  bool globally_bounded = true;
  bool has_antiderivative = true;

  double f(double u) const;
  double df(double u) const;
  double d2f(double u) const;
  double F(double u) const;  // throws if has_antiderivative is false

  void map_f(std::span<const double> in, std::span<double> out) const;
  void map_df(std::span<const double> in, std::span<double> out) const;
  void map_d2f(std::span<const double> in, std::span<double> out) const;
};

// name in {zero, sine, cubic}; lambda applies to cubic only.
Nonlinearity catalogue(const std::string& name, double lambda = 1.0);

struct Problem {
  TorusGrid grid;
  double rho = 0.0;
  Nonlinearity nl;
};

}  // namespace kglri
