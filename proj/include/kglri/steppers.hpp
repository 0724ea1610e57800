#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kglri/opfunc.hpp"
#include "kglri/problem.hpp"
#include "kglri/spectral.hpp"
#include "kglri/state.hpp"

namespace kglri {

enum class Method { Lri3, Etdrk3, Gautschi2, Strang2, Rk4Ref };

Method method_from_name(const std::string& name);
std::string method_name(Method m);

// Non-finite coefficients encountered during stepping.
class BlowupError : public std::runtime_error {
 public:
  BlowupError(std::size_t step, const std::deque<double>& history);
  std::size_t step_index() const { return step_; }

 private:
  std::size_t step_;
};

// Exact flow of the linear equation u_tt + A u = 0 over time t:
//   u(t) = cos(t w) u0 + t sinc(t w) v0
//   v(t) = -t w^2 sinc(t w) u0 + cos(t w) v0
State linear_flow(const State& s, const SymbolTable& symbols, double t);

struct StepperOptions {
  bool dealias = false;
};

// One-step integrator bound to a fixed (problem, grid, stepsize). Steppers
// hold references to the context, symbols and problem; callers keep those
// alive. step() advances (u, v) by h and leaves t untouched (evolve assigns
// t = t0 + k h to avoid accumulating increments).
class TimeStepper {
 public:
  TimeStepper(const SpectralContext& ctx, const SymbolTable& symbols,
              const Problem& problem, double h, const StepperOptions& opts);
  virtual ~TimeStepper() = default;

  virtual void step(State& s) = 0;
  virtual Method method() const = 0;

  double stepsize() const { return h_; }
  const Problem& problem() const { return problem_; }
  const SpectralContext& context() const { return ctx_; }
  const SymbolTable& symbols() const { return symbols_; }

 protected:
  // Nonlinear term evaluated on the grid and transformed back, optionally
  // filtered by the 2/3 rule.
  SpectralField interpolate(const std::vector<double>& values) const;

  const SpectralContext& ctx_;
  const SymbolTable& symbols_;
  const Problem& problem_;
  double h_;
  StepperOptions opts_;
};

std::unique_ptr<TimeStepper> make_stepper(Method method,
                                          const SpectralContext& ctx,
                                          const SymbolTable& symbols,
                                          const Problem& problem, double h,
                                          const StepperOptions& opts = {});

struct EvolveOptions {
  int sample_every = 0;      // 0: keep no intermediate samples
  bool diagnostics = false;  // record per-sample norms
  bool with_energy = false;  // add energy to diagnostics when available
};

struct DiagnosticsRow {
  double t = 0.0;
  double h1_u = 0.0;
  double l2_v = 0.0;
  std::optional<double> energy;
};

struct EvolveResult {
  State final_state;
  std::vector<State> samples;
  std::vector<DiagnosticsRow> diagnostics;
  bool energy_skipped = false;  // energy requested but no antiderivative
};

// Repeated stepping to t_end = s0.t + n h (n integral within roundoff).
// Throws BlowupError with the step index and recent max-coefficient history
// if the state turns non-finite.
EvolveResult evolve(const State& s0, double t_end, TimeStepper& stepper,
                    const EvolveOptions& opts = {});

// Method-independent reference: classical RK4 on the spectrally discretized
// first-order system u' = v, v' = -A u + f(u). h_fine must respect the
// explicit stability limit 2*sqrt(2)/omega_max, enforced at construction.
State rk4ref_evolve(const State& s0, double t_end, double h_fine,
                    const SpectralContext& ctx, const SymbolTable& symbols,
                    const Problem& problem);

// E = int( (v^2 + |grad u|^2 + rho u^2)/2 - F(u) ) dx with F' = f. Conserved
// by the exact flow; used to measure integrator drift. Throws if the
// nonlinearity has no registered antiderivative.
double energy(const State& s, const Problem& problem,
              const SpectralContext& ctx);

}  // namespace kglri
