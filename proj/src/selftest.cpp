#include "kglri/selftest.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "kglri/harness.hpp"
#include "kglri/opfunc.hpp"
#include "kglri/rough_data.hpp"
#include "kglri/steppers.hpp"

namespace kglri {

namespace {

struct Battery {
  std::ostream& os;
  int failures = 0;

  void check(const std::string& name, bool ok, const std::string& detail) {
    os << (ok ? "[ ok ] " : "[FAIL] ") << std::left << std::setw(38) << name
       << " " << detail << "\n";
    if (!ok) ++failures;
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(2) << v;
  return os.str();
}

}  // namespace

int run_selftest(std::ostream& os, const SelftestOptions& opts) {
  Battery bat{os};

  {
    // Frozen extended-precision reference values.
    struct Row {
      double (*fn)(double);
      double m, want;
      const char* name;
    };
    const Row rows[] = {
        {opfunc::sinc, 1.0, 0.84147098480789650665, "sinc(1)"},
        {opfunc::phi1, 1.0, 0.42073549240394825333, "phi1(1)"},
        {opfunc::phi2, 1.0, 0.69088664533801811203, "phi2(1)"},
        {opfunc::psi1, 1.0, 0.15058433946987839463, "psi1(1)"},
        {opfunc::psi2, 1.0, 0.038962201727912029273, "psi2(1)"},
        {opfunc::psi1, 0.0, 1.0 / 6.0, "psi1(0)"},
        {opfunc::psi2, 0.0, 1.0 / 24.0, "psi2(0)"},
    };
    double worst = 0.0;
    for (const auto& r : rows)
      worst = std::max(worst, std::abs(r.fn(r.m) - r.want));
    bat.check("opfunc spot values", worst <= 1e-14,
              "max abs dev " + fmt(worst));
  }

  {
    double tau = opts.corrupt_psi2_threshold ? 5.0 : opfunc::kPsi2Tau;
    double jump_sinc = std::abs(opfunc::sinc_direct(opfunc::kSincTau) -
                                opfunc::sinc_series(opfunc::kSincTau));
    double jump_psi1 = std::abs(opfunc::psi1_direct(opfunc::kPsi1Tau) -
                                opfunc::psi1_series(opfunc::kPsi1Tau));
    double jump_psi2 =
        std::abs(opfunc::psi2_direct(tau) - opfunc::psi2_series(tau));
    double worst = std::max({jump_sinc, jump_psi1, jump_psi2});
    bat.check("branch continuity at thresholds", worst <= 1e-12,
              "max switch jump " + fmt(worst));
  }

  {
    // Uniform bound certificates on a coarse scan.
    double worst = 0.0;
    bool ok = true;
    for (int i = 0; i <= 20000; ++i) {
      double m = 50.0 * i / 20000.0;
      double phi1 = opfunc::phi1(m), phi2 = opfunc::phi2(m);
      double mp1 = m * opfunc::psi1(m), mp2 = m * m * opfunc::psi2(m);
      worst = std::max({worst, std::abs(phi1) - 0.5, std::abs(phi2) - 1.0,
                        std::abs(mp1) - 1.0, std::abs(mp2) - 1.0});
      ok = ok && std::abs(phi1) <= 0.5 + 1e-12 && std::abs(phi2) <= 1.0 + 1e-12 &&
           std::abs(mp1) <= 1.0 && std::abs(mp2) <= 1.0;
    }
    bat.check("coefficient bound certificates", ok,
              "max bound excess " + fmt(worst));
  }

  TorusGrid grid = make_grid(1, 64, -3.14159265358979323846,
                             3.14159265358979323846);
  SpectralContext ctx(grid);

  {
    // Parseval and transform round trip on mode-keyed random data.
    RoughData d = rough_data(2.0, 42, grid);
    std::vector<double> w = ctx.to_physical(d.u0);
    double quad = 0.0;
    for (double x : w) quad += x * x;
    quad *= grid.spacing();
    double l2 = sobolev_norm(d.u0, 0.0);
    double dev = std::abs(l2 * l2 - quad) / quad;
    bat.check("Parseval vs grid quadrature", dev <= 1e-10,
              "rel dev " + fmt(dev));

    SpectralField back = ctx.to_spectral(w);
    double worst = 0.0;
    for (std::size_t i = 0; i < back.coeffs.size(); ++i)
      worst = std::max(worst, std::abs(back.coeffs[i] - d.u0.coeffs[i]));
    bat.check("transform round trip", worst <= 1e-12, "max dev " + fmt(worst));
  }

  Problem zero_problem{grid, 1.0, catalogue("zero")};
  SymbolTable symbols = make_symbols(grid, zero_problem.rho);

  {
    // Every stepper reproduces the exact linear flow when f = 0.
    RoughData d = rough_data(2.0, 7, grid);
    State s0{0.0, d.u0, d.v0};
    State exact = linear_flow(s0, symbols, 1.0);
    double worst = 0.0;
    for (Method m : {Method::Lri3, Method::Etdrk3, Method::Gautschi2,
                     Method::Strang2}) {
      auto st = make_stepper(m, ctx, symbols, zero_problem, 1.0 / 16.0);
      State fin = evolve(s0, 1.0, *st).final_state;
      worst = std::max(worst, error_metric(fin, exact));
    }
    bat.check("linear exactness (f = 0)", worst <= 1e-11,
              "max err " + fmt(worst));
  }

  Problem sine_problem{grid, 1.0, catalogue("sine")};

  {
    // One-step defect against the fine-step RK4 oracle drops ~16x per halving.
    RoughData d = single_mode_data(grid);
    State s0{0.0, d.u0, d.v0};
    auto defect = [&](double h) {
      auto st = make_stepper(Method::Lri3, ctx, symbols, sine_problem, h);
      State one = evolve(s0, h, *st).final_state;
      State ref = rk4ref_evolve(s0, h, h / 64.0, ctx, symbols, sine_problem);
      return error_metric(one, ref);
    };
    double r = defect(1.0 / 16.0) / defect(1.0 / 32.0);
    bat.check("one-step defect ratio", r > 10.0 && r < 22.0,
              "ratio " + fmt(r));
  }

  {
    // Zero state is a fixed point when f(0) = 0.
    State s{0.0, SpectralField(grid), SpectralField(grid)};
    auto st = make_stepper(Method::Lri3, ctx, symbols, sine_problem, 0.1);
    State fin = evolve(s, 1.0, *st).final_state;
    double worst = std::max(max_abs(fin.u), max_abs(fin.v));
    bat.check("zero-state fixed point", worst == 0.0, "max coeff " + fmt(worst));
  }

  {
    // Energy diagnostic skips gracefully without an antiderivative.
    Problem p = sine_problem;
    p.nl.has_antiderivative = false;
    RoughData d = single_mode_data(grid);
    State s0{0.0, d.u0, d.v0};
    auto st = make_stepper(Method::Lri3, ctx, symbols, p, 0.05);
    EvolveOptions eo;
    eo.diagnostics = true;
    eo.with_energy = true;
    EvolveResult r = evolve(s0, 0.1, *st, eo);
    bat.check("energy diagnostic graceful skip",
              r.energy_skipped && !r.diagnostics.empty(),
              r.energy_skipped ? "skip noted" : "skip flag missing");
  }

  os << (bat.failures == 0 ? "selftest: all checks passed\n"
                           : "selftest: FAILURES: " +
                                 std::to_string(bat.failures) + "\n");
  return bat.failures;
}

}  // namespace kglri
