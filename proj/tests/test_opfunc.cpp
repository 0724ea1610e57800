#include <doctest.h>

#include <cmath>

#include "kglri/opfunc.hpp"

using namespace kglri;

namespace {

// Frozen 60-digit reference values (mpmath, direct formulas).
struct Frozen {
  double m;
  double sinc, phi1, phi2, psi1, psi2;
};

const Frozen kFrozen[] = {
    {0.0, 1.0, 0.5, 1.0, 0.16666666666666666667, 0.041666666666666666667},
    {0.25, 0.98961583701809171839, 0.49480791850904585919,
     0.97926412936436825127, 0.16562732245957547394, 0.041493345930201511884},
    {0.5, 0.95885107720840600055, 0.47942553860420300027,
     0.91821681954938935833, 0.16253703063606656886, 0.040976855337224541046},
    {1.0, 0.84147098480789650665, 0.42073549240394825333,
     0.69088664533801811203, 0.15058433946987839463, 0.038962201727912029273},
    {2.5, 0.23938885764158259762, 0.11969442882079129881,
     -0.28087737895267555861, 0.083242597855081304996, 0.02695816794667489529},
    {3.141592653589793, 3.8981718325193755985e-17, 1.9490859162596877993e-17,
     -0.49999999999999998051, 0.050660591821168891646,
     0.020531964509368671605},
    {10.0, -0.05440211108893698134, -0.02720105554446849067,
     -0.4467368200826947168, 0.0039233470899375773546,
     0.00045591770835233015193},
    {50.125, -0.0027934331263165761156, -0.0013967165631582880578,
     0.49367756211581696459, -0.00019759916726572935868,
     5.5746419924060167696e-7},
    {100.0, -0.0050636564110975879366, -0.0025318282055487939683,
     0.42862760793829317308, -0.000043369126434939076102,
     2.5455963183200255749e-7},
};

}  // namespace

TEST_CASE("coefficient functions match the extended-precision table") {
  for (const auto& row : kFrozen) {
    CAPTURE(row.m);
    CHECK(opfunc::sinc(row.m) == doctest::Approx(row.sinc).epsilon(1e-13));
    CHECK(opfunc::phi1(row.m) == doctest::Approx(row.phi1).epsilon(1e-13));
    CHECK(opfunc::phi2(row.m) == doctest::Approx(row.phi2).epsilon(1e-13));
    CHECK(std::abs(opfunc::psi1(row.m) - row.psi1) <= 1e-13);
    CHECK(std::abs(opfunc::psi2(row.m) - row.psi2) <= 1e-13);
  }
}

TEST_CASE("removable singularities take their limit values") {
  CHECK(opfunc::sinc(0.0) == 1.0);
  CHECK(opfunc::phi1(0.0) == 0.5);
  CHECK(opfunc::phi2(0.0) == 1.0);
  CHECK(opfunc::psi1(0.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(opfunc::psi2(0.0) == doctest::Approx(1.0 / 24.0).epsilon(1e-15));
}

TEST_CASE("branch switches are continuous") {
  CHECK(std::abs(opfunc::sinc_direct(opfunc::kSincTau) -
                 opfunc::sinc_series(opfunc::kSincTau)) <= 1e-13);
  CHECK(std::abs(opfunc::psi1_direct(opfunc::kPsi1Tau) -
                 opfunc::psi1_series(opfunc::kPsi1Tau)) <= 1e-13);
  CHECK(std::abs(opfunc::psi2_direct(opfunc::kPsi2Tau) -
                 opfunc::psi2_series(opfunc::kPsi2Tau)) <= 1e-12);
}

TEST_CASE("scan has no jumps and respects the uniform bounds") {
  const int n = 200000;
  double prev_phi2 = opfunc::phi2(0.0);
  for (int i = 0; i <= n; ++i) {
    double m = 100.0 * i / n;
    double phi1 = opfunc::phi1(m);
    double phi2 = opfunc::phi2(m);
    double psi1 = opfunc::psi1(m);
    double psi2 = opfunc::psi2(m);
    REQUIRE(std::abs(phi1) <= 0.5 + 1e-12);
    REQUIRE(std::abs(phi2) <= 1.0 + 1e-12);
    REQUIRE(std::abs(m * psi1) <= 1.0);
    REQUIRE(std::abs(m * m * psi2) <= 1.0);
    // |d phi2/dm| < 1, so adjacent samples differ by < 6e-4 on this grid.
    REQUIRE(std::abs(phi2 - prev_phi2) < 6e-4);
    prev_phi2 = phi2;
  }
}

TEST_CASE("build_coefficients fills the per-mode tables from the scalars") {
  TorusGrid grid = make_grid(1, 16, -3.14159265358979323846,
                             3.14159265358979323846);

  SUBCASE("rho = 0 zero mode hits the limit row") {
    SymbolTable t = make_symbols(grid, 0.0);
    CoefficientSet c = build_coefficients(t, 0.5);
    CHECK(c.cos_h[0] == 1.0);
    CHECK(c.sinc_h[0] == 1.0);
    CHECK(c.phi1[0] == 0.5);
    CHECK(c.phi2[0] == 1.0);
    CHECK(c.psi1[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(c.psi2[0] == doctest::Approx(1.0 / 24.0).epsilon(1e-15));
    CHECK(c.omega_sinc[0] == 0.0);
  }

  SUBCASE("rho = 1, h = 1: zero mode has m = 1") {
    SymbolTable t = make_symbols(grid, 1.0);
    CoefficientSet c = build_coefficients(t, 1.0);
    CHECK(c.sinc_h[0] == doctest::Approx(0.84147098480789650665));
    CHECK(c.phi1[0] == doctest::Approx(0.42073549240394825333));
    CHECK(c.phi2[0] == doctest::Approx(0.69088664533801811203));
    CHECK(c.psi1[0] == doctest::Approx(0.15058433946987839463));
    CHECK(c.psi2[0] == doctest::Approx(0.038962201727912029273));
  }

  SUBCASE("cos^2 + (m sinc)^2 = 1 mode-wise") {
    SymbolTable t = make_symbols(grid, 0.3);
    double h = 0.37;
    CoefficientSet c = build_coefficients(t, h);
    for (std::size_t i = 0; i < t.omega.size(); ++i) {
      double m = h * t.omega[i];
      double s = m * c.sinc_h[i];  // = sin(m)
      CHECK(c.cos_h[i] * c.cos_h[i] + s * s == doctest::Approx(1.0).epsilon(1e-14));
    }
  }

  SUBCASE("h must be positive") {
    SymbolTable t = make_symbols(grid, 0.0);
    CHECK_THROWS_AS(build_coefficients(t, 0.0), std::invalid_argument);
  }
}
