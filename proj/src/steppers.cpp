#include "kglri/steppers.hpp"

#include <cmath>
#include <sstream>

namespace kglri {

namespace {

// phi-function diagonals for the exponential baseline, theta = tau*omega:
//   p1 = (1-cos t)/t^2, p2 = (t-sin t)/t^3, p3 = (t^2/2-1+cos t)/t^4
// p1 is evaluated through the half-angle identity (no cancellation); p2 and
// p3 cancel cubically/quartically and switch to their even Taylor series
// below 0.1 and 0.5 respectively.
double p1_phi(double t) {
  double s = opfunc::sinc(0.5 * t);
  return 0.5 * s * s;
}

double p2_phi(double t) {
  if (std::abs(t) < 0.1) {
    static constexpr double c[7] = {1.0 / 6.0,
                                    -1.0 / 120.0,
                                    1.0 / 5040.0,
                                    -1.0 / 362880.0,
                                    1.0 / 39916800.0,
                                    -1.0 / 6227020800.0,
                                    1.0 / 1307674368000.0};
    double t2 = t * t, acc = c[6];
    for (int j = 5; j >= 0; --j) acc = c[j] + t2 * acc;
    return acc;
  }
  return (t - std::sin(t)) / (t * t * t);
}

double p3_phi(double t) {
  if (std::abs(t) < 0.5) {
    static constexpr double c[9] = {1.0 / 24.0,
                                    -1.0 / 720.0,
                                    1.0 / 40320.0,
                                    -1.0 / 3628800.0,
                                    1.0 / 479001600.0,
                                    -1.0 / 87178291200.0,
                                    1.0 / 20922789888000.0,
                                    -1.0 / 6402373705728000.0,
                                    1.0 / 2432902008176640000.0};
    double t2 = t * t, acc = c[8];
    for (int j = 7; j >= 0; --j) acc = c[j] + t2 * acc;
    return acc;
  }
  return (0.5 * t * t - 1.0 + std::cos(t)) / (t * t * t * t);
}

struct FiniteScan {
  double max_abs = 0.0;
  bool finite = true;
};

void scan_field(const SpectralField& f, FiniteScan& s) {
  for (const auto& z : f.coeffs) {
    double re = z.real(), im = z.imag();
    if (!std::isfinite(re) || !std::isfinite(im)) s.finite = false;
    s.max_abs = std::fmax(s.max_abs, std::fmax(std::fabs(re), std::fabs(im)));
  }
}

}  // namespace

Method method_from_name(const std::string& name) {
  if (name == "lri3") return Method::Lri3;
  if (name == "etdrk3") return Method::Etdrk3;
  if (name == "gautschi2") return Method::Gautschi2;
  if (name == "strang2") return Method::Strang2;
  if (name == "rk4ref") return Method::Rk4Ref;
  throw std::invalid_argument("unknown method '" + name + "'");
}

std::string method_name(Method m) {
  switch (m) {
    case Method::Lri3: return "lri3";
    case Method::Etdrk3: return "etdrk3";
    case Method::Gautschi2: return "gautschi2";
    case Method::Strang2: return "strang2";
    case Method::Rk4Ref: return "rk4ref";
  }
  return "?";
}

BlowupError::BlowupError(std::size_t step, const std::deque<double>& history)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "non-finite state at step " << step
           << "; recent max-coefficient history:";
        for (double v : history) os << " " << v;
        return os.str();
      }()),
      step_(step) {}

State linear_flow(const State& s, const SymbolTable& symbols, double t) {
  State out;
  out.t = s.t + t;
  out.u = SpectralField(s.u.grid);
  out.v = SpectralField(s.v.grid);
  for (std::size_t i = 0; i < symbols.omega.size(); ++i) {
    double w = symbols.omega[i];
    double m = t * w;
    double c = std::cos(m);
    double ts = t * opfunc::sinc(m);
    out.u.coeffs[i] = c * s.u.coeffs[i] + ts * s.v.coeffs[i];
    out.v.coeffs[i] = -w * w * ts * s.u.coeffs[i] + c * s.v.coeffs[i];
  }
  return out;
}

TimeStepper::TimeStepper(const SpectralContext& ctx, const SymbolTable& symbols,
                         const Problem& problem, double h,
                         const StepperOptions& opts)
    : ctx_(ctx), symbols_(symbols), problem_(problem), h_(h), opts_(opts) {
  if (!(h > 0.0)) throw std::invalid_argument("stepper: h must be > 0");
  if (symbols.grid != ctx.grid() || problem.grid != ctx.grid())
    throw std::invalid_argument("stepper: grid mismatch");
}

SpectralField TimeStepper::interpolate(const std::vector<double>& values) const {
  SpectralField f = ctx_.to_spectral(values);
  if (opts_.dealias) dealias(f);
  return f;
}

namespace {

class Lri3Stepper final : public TimeStepper {
 public:
  Lri3Stepper(const SpectralContext& ctx, const SymbolTable& symbols,
              const Problem& problem, double h, const StepperOptions& opts)
      : TimeStepper(ctx, symbols, problem, h, opts),
        coeffs_(build_coefficients(symbols, h)) {}

  Method method() const override { return Method::Lri3; }

  void step(State& s) override {
    const std::size_t n = s.u.coeffs.size();
    const double rho = problem_.rho;
    const Nonlinearity& nl = problem_.nl;

    // Physical-space ingredients, shared by all nonlinear products.
    std::vector<double> u = ctx_.to_physical(s.u);
    std::vector<double> v = ctx_.to_physical(s.v);
    std::vector<double> gsq = ctx_.gradient_squared(s.u);

    std::vector<double> fu(n), dfu(n), d2fu(n);
    nl.map_f(u, fu);
    nl.map_df(u, dfu);
    nl.map_d2f(u, d2fu);

    std::vector<double> fpv(n), f1(n), fpf(n);
    for (std::size_t i = 0; i < n; ++i) {
      fpv[i] = dfu[i] * v[i];
      f1[i] = d2fu[i] * (v[i] * v[i] - gsq[i]) + rho * (fu[i] - dfu[i] * u[i]);
      fpf[i] = dfu[i] * fu[i];
    }

    // One forward transform per product; d+2 inverse transforms above.
    SpectralField Fu = interpolate(fu);
    SpectralField Fpv = interpolate(fpv);
    SpectralField F1 = interpolate(f1);
    SpectralField Fpf = interpolate(fpf);

    const double h = h_, h2 = h * h, h3 = h2 * h, h4 = h3 * h;
    const CoefficientSet& c = coeffs_;
    for (std::size_t i = 0; i < n; ++i) {
      auto un = s.u.coeffs[i];
      auto vn = s.v.coeffs[i];
      s.u.coeffs[i] = c.cos_h[i] * un + h * c.sinc_h[i] * vn +
                      h2 * c.phi1[i] * Fu.coeffs[i] +
                      h3 * c.psi1[i] * Fpv.coeffs[i] +
                      h4 * c.psi2[i] * F1.coeffs[i];
      s.v.coeffs[i] = -c.omega_sinc[i] * un + c.cos_h[i] * vn +
                      h * c.phi2[i] * Fu.coeffs[i] +
                      h2 * c.phi1[i] * Fpv.coeffs[i] +
                      h3 * c.psi1[i] * (F1.coeffs[i] + Fpf.coeffs[i]);
    }
  }

 private:
  CoefficientSet coeffs_;
};

// Cox-Matthews three-stage exponential Runge-Kutta (nodes 0, 1/2, 1) on the
// first-order system W' = Lambda W + (0, f(u)). The phi functions of the
// skew operator reduce per mode to 2x2 blocks in (cos, sinc, p1, p2, p3).
class Etdrk3Stepper final : public TimeStepper {
 public:
  Etdrk3Stepper(const SpectralContext& ctx, const SymbolTable& symbols,
                const Problem& problem, double h, const StepperOptions& opts)
      : TimeStepper(ctx, symbols, problem, h, opts) {
    const std::size_t n = symbols.omega.size();
    cos_h.resize(n); sinc_h.resize(n); cos_h2.resize(n); sinc_h2.resize(n);
    p1_h2.resize(n); p1_h.resize(n); p2_h.resize(n); p3_h.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      double w = symbols.omega[i];
      double th = h * w, th2 = 0.5 * h * w;
      cos_h[i] = std::cos(th);
      sinc_h[i] = opfunc::sinc(th);
      cos_h2[i] = std::cos(th2);
      sinc_h2[i] = opfunc::sinc(th2);
      p1_h2[i] = p1_phi(th2);
      p1_h[i] = p1_phi(th);
      p2_h[i] = p2_phi(th);
      p3_h[i] = p3_phi(th);
    }
  }

  Method method() const override { return Method::Etdrk3; }

  void step(State& s) override {
    const std::size_t n = s.u.coeffs.size();
    const double h = h_, hh = 0.5 * h;

    SpectralField k1 = nonlin(s.u);

    // a = E_{h/2} W + (h/2) phi1((h/2) Lambda) (0, k1)
    SpectralField au(s.u.grid), av(s.u.grid);
    for (std::size_t i = 0; i < n; ++i) {
      double w = symbols_.omega[i];
      au.coeffs[i] = cos_h2[i] * s.u.coeffs[i] + hh * sinc_h2[i] * s.v.coeffs[i] +
                     hh * hh * p1_h2[i] * k1.coeffs[i];
      av.coeffs[i] = -hh * w * w * sinc_h2[i] * s.u.coeffs[i] +
                     cos_h2[i] * s.v.coeffs[i] + hh * sinc_h2[i] * k1.coeffs[i];
    }
    SpectralField k2 = nonlin(au);

    // b = E_h W + h phi1(h Lambda) (0, 2 k2 - k1)
    SpectralField bu(s.u.grid);
    for (std::size_t i = 0; i < n; ++i) {
      auto g = 2.0 * k2.coeffs[i] - k1.coeffs[i];
      bu.coeffs[i] = cos_h[i] * s.u.coeffs[i] + h * sinc_h[i] * s.v.coeffs[i] +
                     h * h * p1_h[i] * g;
    }
    SpectralField k3 = nonlin(bu);

    for (std::size_t i = 0; i < n; ++i) {
      double w = symbols_.omega[i];
      double w1u = 4.0 * p3_h[i] - 3.0 * p2_h[i] + p1_h[i];
      double w2u = -8.0 * p3_h[i] + 4.0 * p2_h[i];
      double w3u = 4.0 * p3_h[i] - p2_h[i];
      double w1v = 4.0 * p2_h[i] - 3.0 * p1_h[i] + sinc_h[i];
      double w2v = -8.0 * p2_h[i] + 4.0 * p1_h[i];
      double w3v = 4.0 * p2_h[i] - p1_h[i];
      auto un = s.u.coeffs[i];
      auto vn = s.v.coeffs[i];
      s.u.coeffs[i] = cos_h[i] * un + h * sinc_h[i] * vn +
                      h * h * (w1u * k1.coeffs[i] + w2u * k2.coeffs[i] +
                               w3u * k3.coeffs[i]);
      s.v.coeffs[i] = -h * w * w * sinc_h[i] * un + cos_h[i] * vn +
                      h * (w1v * k1.coeffs[i] + w2v * k2.coeffs[i] +
                           w3v * k3.coeffs[i]);
    }
  }

 private:
  SpectralField nonlin(const SpectralField& u_hat) {
    std::vector<double> u = ctx_.to_physical(u_hat);
    std::vector<double> fu(u.size());
    problem_.nl.map_f(u, fu);
    return interpolate(fu);
  }

  std::vector<double> cos_h, sinc_h, cos_h2, sinc_h2;
  std::vector<double> p1_h2, p1_h, p2_h, p3_h;
};

// One-step Gautschi-type trigonometric integrator with the sinc^2(h w / 2)
// filter on the force and velocity weights chosen for second order:
//   u1 = cos u + h sinc v + (h^2/2) sinc^2(h w/2) g(u_n)
//   v1 = -h w^2 sinc u + cos v
//        + (h/2) [ sinc^2(h w/2) g(u_n) + (2 sinc - sinc^2(h w/2)) g(u1) ]
class Gautschi2Stepper final : public TimeStepper {
 public:
  Gautschi2Stepper(const SpectralContext& ctx, const SymbolTable& symbols,
                   const Problem& problem, double h, const StepperOptions& opts)
      : TimeStepper(ctx, symbols, problem, h, opts) {
    const std::size_t n = symbols.omega.size();
    cos_h.resize(n); sinc_h.resize(n); filter.resize(n); w1.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      double th = h * symbols.omega[i];
      cos_h[i] = std::cos(th);
      sinc_h[i] = opfunc::sinc(th);
      double q = opfunc::sinc(0.5 * th);
      filter[i] = q * q;
      w1[i] = 2.0 * sinc_h[i] - filter[i];
    }
  }

  Method method() const override { return Method::Gautschi2; }

  void step(State& s) override {
    const std::size_t n = s.u.coeffs.size();
    const double h = h_;
    SpectralField g0 = nonlin(s.u);
    SpectralField u1(s.u.grid);
    for (std::size_t i = 0; i < n; ++i)
      u1.coeffs[i] = cos_h[i] * s.u.coeffs[i] + h * sinc_h[i] * s.v.coeffs[i] +
                     0.5 * h * h * filter[i] * g0.coeffs[i];
    SpectralField g1 = nonlin(u1);
    for (std::size_t i = 0; i < n; ++i) {
      double w = symbols_.omega[i];
      s.v.coeffs[i] = -h * w * w * sinc_h[i] * s.u.coeffs[i] +
                      cos_h[i] * s.v.coeffs[i] +
                      0.5 * h * (filter[i] * g0.coeffs[i] + w1[i] * g1.coeffs[i]);
    }
    s.u = std::move(u1);
  }

 private:
  SpectralField nonlin(const SpectralField& u_hat) {
    std::vector<double> u = ctx_.to_physical(u_hat);
    std::vector<double> fu(u.size());
    problem_.nl.map_f(u, fu);
    return interpolate(fu);
  }

  std::vector<double> cos_h, sinc_h, filter, w1;
};

// Half kick, exact linear drift, half kick. Symmetric and time reversible.
class Strang2Stepper final : public TimeStepper {
 public:
  Strang2Stepper(const SpectralContext& ctx, const SymbolTable& symbols,
                 const Problem& problem, double h, const StepperOptions& opts)
      : TimeStepper(ctx, symbols, problem, h, opts) {
    const std::size_t n = symbols.omega.size();
    cos_h.resize(n);
    sinc_h.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      double th = h * symbols.omega[i];
      cos_h[i] = std::cos(th);
      sinc_h[i] = opfunc::sinc(th);
    }
  }

  Method method() const override { return Method::Strang2; }

  void step(State& s) override {
    const std::size_t n = s.u.coeffs.size();
    const double h = h_;
    SpectralField g = nonlin(s.u);
    for (std::size_t i = 0; i < n; ++i)
      s.v.coeffs[i] += 0.5 * h * g.coeffs[i];
    for (std::size_t i = 0; i < n; ++i) {
      double w = symbols_.omega[i];
      auto un = s.u.coeffs[i];
      auto vn = s.v.coeffs[i];
      s.u.coeffs[i] = cos_h[i] * un + h * sinc_h[i] * vn;
      s.v.coeffs[i] = -h * w * w * sinc_h[i] * un + cos_h[i] * vn;
    }
    g = nonlin(s.u);
    for (std::size_t i = 0; i < n; ++i)
      s.v.coeffs[i] += 0.5 * h * g.coeffs[i];
  }

 private:
  SpectralField nonlin(const SpectralField& u_hat) {
    std::vector<double> u = ctx_.to_physical(u_hat);
    std::vector<double> fu(u.size());
    problem_.nl.map_f(u, fu);
    return interpolate(fu);
  }

  std::vector<double> cos_h, sinc_h;
};

class Rk4Stepper final : public TimeStepper {
 public:
  Rk4Stepper(const SpectralContext& ctx, const SymbolTable& symbols,
             const Problem& problem, double h, const StepperOptions& opts)
      : TimeStepper(ctx, symbols, problem, h, opts) {
    double wmax = 0.0;
    for (double w : symbols.omega) wmax = std::max(wmax, w);
    const double limit = 2.0 * std::sqrt(2.0);
    if (h * wmax > limit) {
      std::ostringstream os;
      os << "rk4ref: h = " << h << " exceeds the explicit stability limit "
         << limit / wmax << " (2*sqrt(2)/omega_max, omega_max = " << wmax
         << ")";
      throw std::invalid_argument(os.str());
    }
  }

  Method method() const override { return Method::Rk4Ref; }

  void step(State& s) override {
    const double h = h_;
    Deriv k1 = rhs(s.u, s.v);
    Deriv k2 = rhs(shift(s.u, k1.du, 0.5 * h), shift(s.v, k1.dv, 0.5 * h));
    Deriv k3 = rhs(shift(s.u, k2.du, 0.5 * h), shift(s.v, k2.dv, 0.5 * h));
    Deriv k4 = rhs(shift(s.u, k3.du, h), shift(s.v, k3.dv, h));
    const double w6 = h / 6.0;
    for (std::size_t i = 0; i < s.u.coeffs.size(); ++i) {
      s.u.coeffs[i] += w6 * (k1.du.coeffs[i] + 2.0 * k2.du.coeffs[i] +
                             2.0 * k3.du.coeffs[i] + k4.du.coeffs[i]);
      s.v.coeffs[i] += w6 * (k1.dv.coeffs[i] + 2.0 * k2.dv.coeffs[i] +
                             2.0 * k3.dv.coeffs[i] + k4.dv.coeffs[i]);
    }
  }

 private:
  struct Deriv {
    SpectralField du, dv;
  };

  Deriv rhs(const SpectralField& u, const SpectralField& v) {
    Deriv d{v, SpectralField(u.grid)};
    std::vector<double> up = ctx_.to_physical(u);
    std::vector<double> fu(up.size());
    problem_.nl.map_f(up, fu);
    SpectralField fhat = interpolate(fu);
    for (std::size_t i = 0; i < u.coeffs.size(); ++i) {
      double w = symbols_.omega[i];
      d.dv.coeffs[i] = -w * w * u.coeffs[i] + fhat.coeffs[i];
    }
    return d;
  }

  static SpectralField shift(const SpectralField& base, const SpectralField& dir,
                             double scale) {
    SpectralField out(base.grid);
    for (std::size_t i = 0; i < base.coeffs.size(); ++i)
      out.coeffs[i] = base.coeffs[i] + scale * dir.coeffs[i];
    return out;
  }
};

}  // namespace

std::unique_ptr<TimeStepper> make_stepper(Method method,
                                          const SpectralContext& ctx,
                                          const SymbolTable& symbols,
                                          const Problem& problem, double h,
                                          const StepperOptions& opts) {
  switch (method) {
    case Method::Lri3:
      return std::make_unique<Lri3Stepper>(ctx, symbols, problem, h, opts);
    case Method::Etdrk3:
      return std::make_unique<Etdrk3Stepper>(ctx, symbols, problem, h, opts);
    case Method::Gautschi2:
      return std::make_unique<Gautschi2Stepper>(ctx, symbols, problem, h, opts);
    case Method::Strang2:
      return std::make_unique<Strang2Stepper>(ctx, symbols, problem, h, opts);
    case Method::Rk4Ref:
      return std::make_unique<Rk4Stepper>(ctx, symbols, problem, h, opts);
  }
  throw std::invalid_argument("make_stepper: bad method");
}

EvolveResult evolve(const State& s0, double t_end, TimeStepper& stepper,
                    const EvolveOptions& opts) {
  const double h = stepper.stepsize();
  const double span = t_end - s0.t;
  if (span < 0.0) throw std::invalid_argument("evolve: t_end before state time");
  const auto n = static_cast<std::size_t>(std::llround(span / h));
  if (std::abs(static_cast<double>(n) * h - span) >
      1e-9 * std::max(1.0, std::abs(span)))
    throw std::invalid_argument("evolve: t_end is not an integer number of steps");

  EvolveResult result;
  result.final_state = s0;
  State& s = result.final_state;
  const bool want_energy =
      opts.with_energy && stepper.problem().nl.has_antiderivative;
  result.energy_skipped = opts.with_energy && !want_energy;

  auto record = [&](const State& at) {
    if (!opts.diagnostics) return;
    DiagnosticsRow row;
    row.t = at.t;
    row.h1_u = sobolev_norm(at.u, 1.0);
    row.l2_v = sobolev_norm(at.v, 0.0);
    if (want_energy)
      row.energy = energy(at, stepper.problem(), stepper.context());
    result.diagnostics.push_back(row);
  };
  record(s);

  std::deque<double> history;
  for (std::size_t k = 0; k < n; ++k) {
    stepper.step(s);
    s.t = s0.t + static_cast<double>(k + 1) * h;

    FiniteScan scan;
    scan_field(s.u, scan);
    scan_field(s.v, scan);
    history.push_back(scan.max_abs);
    if (history.size() > 8) history.pop_front();
    if (!scan.finite) throw BlowupError(k, history);

    if (opts.sample_every > 0 &&
        ((k + 1) % static_cast<std::size_t>(opts.sample_every) == 0 ||
         k + 1 == n)) {
      result.samples.push_back(s);
      record(s);
    }
  }
  if (opts.diagnostics && result.diagnostics.size() < 2 && n > 0) record(s);
  return result;
}

State rk4ref_evolve(const State& s0, double t_end, double h_fine,
                    const SpectralContext& ctx, const SymbolTable& symbols,
                    const Problem& problem) {
  auto stepper = make_stepper(Method::Rk4Ref, ctx, symbols, problem, h_fine);
  return evolve(s0, t_end, *stepper).final_state;
}

double energy(const State& s, const Problem& problem,
              const SpectralContext& ctx) {
  std::vector<double> u = ctx.to_physical(s.u);
  std::vector<double> v = ctx.to_physical(s.v);
  std::vector<double> gsq = ctx.gradient_squared(s.u);
  const TorusGrid& g = s.u.grid;
  double cell = 1.0;
  for (int k = 0; k < g.dim; ++k) cell *= g.spacing();
  double total = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    total += 0.5 * (v[i] * v[i] + gsq[i] + problem.rho * u[i] * u[i]) -
             problem.nl.F(u[i]);
  }
  return cell * total;
}

}  // namespace kglri
