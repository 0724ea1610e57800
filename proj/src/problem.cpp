#include "kglri/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace kglri {

double Nonlinearity::f(double u) const {
  switch (kind) {
    case NonlinKind::Zero: return 0.0;
    case NonlinKind::Sine: return std::sin(u);
    case NonlinKind::Cubic: return lambda * u * u * u;
  }
  return 0.0;
}

double Nonlinearity::df(double u) const {
  switch (kind) {
    case NonlinKind::Zero: return 0.0;
    case NonlinKind::Sine: return std::cos(u);
    case NonlinKind::Cubic: return 3.0 * lambda * u * u;
  }
  return 0.0;
}

double Nonlinearity::d2f(double u) const {
  switch (kind) {
    case NonlinKind::Zero: return 0.0;
    case NonlinKind::Sine: return -std::sin(u);
    case NonlinKind::Cubic: return 6.0 * lambda * u;
  }
  return 0.0;
}

double Nonlinearity::F(double u) const {
  if (!has_antiderivative)
    throw std::runtime_error("nonlinearity '" + name +
                             "' has no registered antiderivative");
  switch (kind) {
    case NonlinKind::Zero: return 0.0;
    case NonlinKind::Sine: return 1.0 - std::cos(u);
    case NonlinKind::Cubic: return 0.25 * lambda * u * u * u * u;
  }
  return 0.0;
}

void Nonlinearity::map_f(std::span<const double> in, std::span<double> out) const {
  switch (kind) {
    case NonlinKind::Zero:
      for (std::size_t i = 0; i < in.size(); ++i) out[i] = 0.0;
      break;
    case NonlinKind::Sine:
      for (std::size_t i = 0; i < in.size(); ++i) out[i] = std::sin(in[i]);
      break;
    case NonlinKind::Cubic:
      for (std::size_t i = 0; i < in.size(); ++i)
        out[i] = lambda * in[i] * in[i] * in[i];
      break;
  }
}

void Nonlinearity::map_df(std::span<const double> in, std::span<double> out) const {
  switch (kind) {
    case NonlinKind::Zero:
      for (std::size_t i = 0; i < in.size(); ++i) out[i] = 0.0;
      break;
    case NonlinKind::Sine:
      for (std::size_t i = 0; i < in.size(); ++i) out[i] = std::cos(in[i]);
      break;
    case NonlinKind::Cubic:
      for (std::size_t i = 0; i < in.size(); ++i)
        out[i] = 3.0 * lambda * in[i] * in[i];
      break;
  }
}

void Nonlinearity::map_d2f(std::span<const double> in, std::span<double> out) const {
  switch (kind) {
    case NonlinKind::Zero:
      for (std::size_t i = 0; i < in.size(); ++i) out[i] = 0.0;
      break;
    case NonlinKind::Sine:
      for (std::size_t i = 0; i < in.size(); ++i) out[i] = -std::sin(in[i]);
      break;
    case NonlinKind::Cubic:
      for (std::size_t i = 0; i < in.size(); ++i) out[i] = 6.0 * lambda * in[i];
      break;
  }
}

Nonlinearity catalogue(const std::string& name, double lambda) {
  Nonlinearity nl;
  nl.name = name;
  nl.lambda = lambda;
  if (name == "zero") {
    nl.kind = NonlinKind::Zero;
  } else if (name == "sine") {
    nl.kind = NonlinKind::Sine;
  } else if (name == "cubic") {
    nl.kind = NonlinKind::Cubic;
    nl.globally_bounded = false;
  } else {
    throw std::invalid_argument("unknown nonlinearity '" + name +
                                "' (expected zero, sine or cubic)");
  }
  return nl;
}

}  // namespace kglri
