#include <doctest.h>

#include <cmath>

#include "kglri/harness.hpp"
#include "kglri/rough_data.hpp"
#include "kglri/steppers.hpp"

using namespace kglri;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Setup {
  TorusGrid grid;
  SpectralContext ctx;
  SymbolTable symbols;
  Problem problem;

  Setup(int n, double rho, const std::string& nl, double lambda = 1.0)
      : grid(make_grid(1, n, -kPi, kPi)),
        ctx(grid),
        symbols(make_symbols(grid, rho)),
        problem{grid, rho, catalogue(nl, lambda)} {}
};

State rough_state(const TorusGrid& g, double theta, std::uint64_t seed) {
  RoughData d = rough_data(theta, seed, g);
  return State{0.0, std::move(d.u0), std::move(d.v0)};
}

State cos_state(const TorusGrid& g) {
  RoughData d = single_mode_data(g);
  return State{0.0, std::move(d.u0), std::move(d.v0)};
}

const Method kOneStepMethods[] = {Method::Lri3, Method::Etdrk3,
                                  Method::Gautschi2, Method::Strang2};

}  // namespace

TEST_CASE("all steppers reproduce the exact linear flow when f = 0") {
  Setup s(64, 1.0, "zero");
  State s0 = rough_state(s.grid, 2.0, 3);
  State exact = linear_flow(s0, s.symbols, 1.0);
  for (Method m : kOneStepMethods) {
    CAPTURE(method_name(m));
    for (int k : {2, 5}) {
      auto st = make_stepper(m, s.ctx, s.symbols, s.problem, std::pow(2.0, -k));
      State fin = evolve(s0, 1.0, *st).final_state;
      CHECK(error_metric(fin, exact) <= 1e-12);
    }
  }
}

TEST_CASE("zero state is a fixed point for every stepper when f(0) = 0") {
  Setup s(32, 1.0, "sine");
  State zero{0.0, SpectralField(s.grid), SpectralField(s.grid)};
  for (Method m : kOneStepMethods) {
    auto st = make_stepper(m, s.ctx, s.symbols, s.problem, 0.125);
    State fin = evolve(zero, 1.0, *st).final_state;
    CHECK(max_abs(fin.u) == 0.0);
    CHECK(max_abs(fin.v) == 0.0);
  }
}

TEST_CASE("lri3 one-step defect against rk4ref is fourth order") {
  Setup s(32, 1.0, "sine");
  State s0 = cos_state(s.grid);
  auto defect = [&](double h) {
    auto st = make_stepper(Method::Lri3, s.ctx, s.symbols, s.problem, h);
    State one = evolve(s0, h, *st).final_state;
    State ref = rk4ref_evolve(s0, h, h / 64.0, s.ctx, s.symbols, s.problem);
    return error_metric(one, ref);
  };
  double d3 = defect(std::pow(2.0, -3));
  double d4 = defect(std::pow(2.0, -4));
  double d5 = defect(std::pow(2.0, -5));
  CHECK(d3 / d4 > 12.0);
  CHECK(d3 / d4 < 20.0);
  CHECK(d4 / d5 > 12.0);
  CHECK(d4 / d5 < 20.0);
}

TEST_CASE("rk4ref matches the exact rotation on a single mode") {
  Setup s(32, 1.0, "zero");
  State s0 = cos_state(s.grid);
  State exact = linear_flow(s0, s.symbols, 1.0);
  State ref = rk4ref_evolve(s0, 1.0, 1e-4, s.ctx, s.symbols, s.problem);
  CHECK(error_metric(ref, exact) <= 1e-10);
}

TEST_CASE("rk4ref self-convergence is fourth order") {
  Setup s(32, 1.0, "sine");
  State s0 = cos_state(s.grid);
  State fine = rk4ref_evolve(s0, 1.0, 1.0 / 512.0, s.ctx, s.symbols, s.problem);
  State mid = rk4ref_evolve(s0, 1.0, 1.0 / 64.0, s.ctx, s.symbols, s.problem);
  State coarse = rk4ref_evolve(s0, 1.0, 1.0 / 32.0, s.ctx, s.symbols, s.problem);
  double e_coarse = error_metric(coarse, fine);
  double e_mid = error_metric(mid, fine);
  double ratio = e_coarse / e_mid;
  CHECK(ratio > 11.0);
  CHECK(ratio < 21.0);
}

TEST_CASE("rk4ref rejects stepsizes above the stability limit") {
  Setup s(256, 0.0, "zero");  // omega_max = 128
  CHECK_THROWS_WITH_AS(
      (void)make_stepper(Method::Rk4Ref, s.ctx, s.symbols, s.problem, 0.1),
      doctest::Contains("stability limit"), std::invalid_argument);
}

TEST_CASE("strang2 is time reversible") {
  Setup s(32, 0.0, "sine");
  State s0 = rough_state(s.grid, 3.0, 11);
  const double h = 1.0 / 16.0;
  auto fwd = make_stepper(Method::Strang2, s.ctx, s.symbols, s.problem, h);
  State mid = evolve(s0, 0.5, *fwd).final_state;
  // Stepping the reversed state (v -> -v) returns to the start.
  State rev = mid;
  for (auto& c : rev.v.coeffs) c = -c;
  rev.t = 0.0;
  State back = evolve(rev, 0.5, *fwd).final_state;
  for (auto& c : back.v.coeffs) c = -c;
  back.t = 0.0;
  CHECK(error_metric(back, s0) <= 1e-11);
}

TEST_CASE("evolve bookkeeping") {
  Setup s(32, 1.0, "sine");
  State s0 = rough_state(s.grid, 2.0, 13);

  SUBCASE("zero steps returns the initial state unchanged") {
    auto st = make_stepper(Method::Lri3, s.ctx, s.symbols, s.problem, 0.25);
    State fin = evolve(s0, 0.0, *st).final_state;
    CHECK(fin.t == s0.t);
    for (std::size_t i = 0; i < fin.u.coeffs.size(); ++i)
      CHECK(fin.u.coeffs[i] == s0.u.coeffs[i]);
  }

  SUBCASE("t_end must be an integer number of steps") {
    auto st = make_stepper(Method::Lri3, s.ctx, s.symbols, s.problem, 0.3);
    CHECK_THROWS_AS(evolve(s0, 1.0, *st), std::invalid_argument);
  }

  SUBCASE("composition is bit-for-bit: evolve(T) == evolve(T/2) twice") {
    auto st = make_stepper(Method::Lri3, s.ctx, s.symbols, s.problem, 1.0 / 16);
    State whole = evolve(s0, 1.0, *st).final_state;
    State half = evolve(s0, 0.5, *st).final_state;
    State again = evolve(half, 1.0, *st).final_state;
    for (std::size_t i = 0; i < whole.u.coeffs.size(); ++i) {
      CHECK(whole.u.coeffs[i] == again.u.coeffs[i]);
      CHECK(whole.v.coeffs[i] == again.v.coeffs[i]);
    }
  }

  SUBCASE("final time is t0 + n h") {
    auto st = make_stepper(Method::Lri3, s.ctx, s.symbols, s.problem, 1.0 / 8);
    State fin = evolve(s0, 1.0, *st).final_state;
    CHECK(fin.t == 1.0);
  }

  SUBCASE("sampling cadence") {
    auto st = make_stepper(Method::Lri3, s.ctx, s.symbols, s.problem, 0.125);
    EvolveOptions opts;
    opts.sample_every = 2;
    EvolveResult r = evolve(s0, 1.0, *st, opts);
    CHECK(r.samples.size() == 4);  // steps 2, 4, 6, 8
    CHECK(r.samples.back().t == 1.0);
  }
}

TEST_CASE("lri3 agrees with rk4ref at small h on the sine problem") {
  Setup s(64, 0.0, "sine");
  State s0 = rough_state(s.grid, 4.0, 17);
  auto st = make_stepper(Method::Lri3, s.ctx, s.symbols, s.problem,
                         std::pow(2.0, -8));
  State fin = evolve(s0, 1.0, *st).final_state;
  State ref = rk4ref_evolve(s0, 1.0, std::pow(2.0, -13), s.ctx, s.symbols,
                            s.problem);
  CHECK(error_metric(fin, ref) <= 1e-5);
}

TEST_CASE("blow-up is detected and reported with the step index") {
  // Focusing cubic with a large coefficient and coarse steps diverges fast.
  Setup s(32, 0.0, "cubic", 4000.0);
  State s0 = cos_state(s.grid);
  auto st = make_stepper(Method::Strang2, s.ctx, s.symbols, s.problem, 0.5);
  try {
    evolve(s0, 64.0, *st);
    FAIL("expected BlowupError");
  } catch (const BlowupError& e) {
    CHECK(std::string(e.what()).find("non-finite state at step") !=
          std::string::npos);
    CHECK(std::string(e.what()).find("history") != std::string::npos);
  }
}

TEST_CASE("energy") {
  SUBCASE("zero state with the sine problem has zero energy") {
    Setup s(32, 0.0, "sine");
    State zero{0.0, SpectralField(s.grid), SpectralField(s.grid)};
    CHECK(energy(zero, s.problem, s.ctx) == doctest::Approx(0.0));
  }

  SUBCASE("u = 0, v = c, rho = 0, f = 0 gives c^2 L / 2") {
    Setup s(32, 0.0, "zero");
    State st{0.0, SpectralField(s.grid), SpectralField(s.grid)};
    st.v.coeffs[0] = 3.0;  // constant v = 3
    CHECK(energy(st, s.problem, s.ctx) ==
          doctest::Approx(0.5 * 9.0 * 2.0 * kPi).epsilon(1e-12));
  }

  SUBCASE("rk4ref at tiny h conserves energy to 1e-8 relative") {
    Setup s(32, 1.0, "sine");
    State s0 = cos_state(s.grid);
    double e0 = energy(s0, s.problem, s.ctx);
    State fin = rk4ref_evolve(s0, 1.0, 1.0 / 4096.0, s.ctx, s.symbols,
                              s.problem);
    double e1 = energy(fin, s.problem, s.ctx);
    CHECK(std::abs(e1 - e0) <= 1e-8 * std::abs(e0));
  }

  SUBCASE("missing antiderivative throws") {
    Setup s(32, 0.0, "sine");
    Problem p = s.problem;
    p.nl.has_antiderivative = false;
    State s0 = cos_state(s.grid);
    CHECK_THROWS_AS(energy(s0, p, s.ctx), std::runtime_error);
  }
}

TEST_CASE("linear exactness holds over many steps within n * 1e-13") {
  Setup s(64, 1.0, "zero");
  State s0 = rough_state(s.grid, 2.0, 19);
  State exact = linear_flow(s0, s.symbols, 1.0);
  auto st = make_stepper(Method::Lri3, s.ctx, s.symbols, s.problem,
                         std::pow(2.0, -8));
  State fin = evolve(s0, 1.0, *st).final_state;
  CHECK(error_metric(fin, exact) <= 256 * 1e-13);
}
