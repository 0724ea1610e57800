#include <doctest.h>

#include <cmath>
#include <random>

#include "kglri/harness.hpp"

using namespace kglri;

namespace {

constexpr double kPi = 3.14159265358979323846;

State make_pair_state(const TorusGrid& g, std::uint64_t seed) {
  RoughData d = rough_data(2.0, seed, g);
  return State{1.0, std::move(d.u0), std::move(d.v0)};
}

}  // namespace

TEST_CASE("error_metric") {
  TorusGrid g = make_grid(1, 64, -kPi, kPi);
  State ref = make_pair_state(g, 2);

  SUBCASE("identical states give zero") {
    CHECK(error_metric(ref, ref) == 0.0);
  }

  SUBCASE("doubling u gives exactly 1 in the H1 part") {
    State num = ref;
    for (auto& c : num.u.coeffs) c *= 2.0;
    CHECK(error_metric(num, ref) == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("perturbing u only gives ||d||_H1 / ||u||_H1") {
    State num = ref;
    SpectralField delta(g);
    delta.coeffs[2] = {1e-3, 0.0};
    delta.coeffs[g.size() - 2] = {1e-3, 0.0};
    for (std::size_t i = 0; i < delta.coeffs.size(); ++i)
      num.u.coeffs[i] += delta.coeffs[i];
    double want = sobolev_norm(delta, 1.0) / sobolev_norm(ref.u, 1.0);
    CHECK(error_metric(num, ref) == doctest::Approx(want).epsilon(1e-12));
  }

  SUBCASE("metric is homogeneous in the difference") {
    State num1 = ref, num2 = ref;
    num1.u.coeffs[3] += 1e-4;
    num1.u.coeffs[g.size() - 3] += 1e-4;
    num2.u.coeffs[3] += 3e-4;
    num2.u.coeffs[g.size() - 3] += 3e-4;
    CHECK(error_metric(num2, ref) ==
          doctest::Approx(3.0 * error_metric(num1, ref)).epsilon(1e-10));
  }

  SUBCASE("tiny reference norm trips the absolute fallback flag") {
    State zero_ref{1.0, SpectralField(g), SpectralField(g)};
    State num = zero_ref;
    num.u.coeffs[1] = 1e-3;
    num.u.coeffs[g.size() - 1] = 1e-3;
    MetricFlags flags;
    double err = error_metric(num, zero_ref, &flags);
    CHECK(flags.abs_fallback_u);
    CHECK(flags.abs_fallback_v);
    CHECK(err == doctest::Approx(sobolev_norm(num.u, 1.0)).epsilon(1e-12));
  }

  SUBCASE("grid and time mismatches are rejected") {
    TorusGrid g2 = make_grid(1, 128, -kPi, kPi);
    State other = make_pair_state(g2, 2);
    CHECK_THROWS_AS(error_metric(other, ref), std::invalid_argument);
    State late = ref;
    late.t = 2.0;
    CHECK_THROWS_AS(error_metric(late, ref), std::invalid_argument);
  }
}

TEST_CASE("fit_order") {
  SUBCASE("exact third-order data fits slope 3") {
    std::vector<std::pair<double, double>> pts;
    for (int k = 2; k <= 8; ++k) pts.emplace_back(k, 0.7 * std::pow(2.0, -3 * k));
    FitResult r = fit_order(pts, 2, 8);
    CHECK(r.slope == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(r.residual_rms <= 1e-12);
    CHECK(r.points_used == 7);
  }

  SUBCASE("exact second-order data fits slope 2") {
    std::vector<std::pair<double, double>> pts;
    for (int k = 1; k <= 6; ++k) pts.emplace_back(k, 3.0 * std::pow(2.0, -2 * k));
    CHECK(fit_order(pts, 1, 6).slope == doctest::Approx(2.0).epsilon(1e-12));
  }

  SUBCASE("window selection drops outside points") {
    std::vector<std::pair<double, double>> pts;
    for (int k = 1; k <= 8; ++k)
      pts.emplace_back(k, std::pow(2.0, -3 * k) * (k <= 2 ? 100.0 : 1.0));
    FitResult r = fit_order(pts, 3, 8);
    CHECK(r.slope == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(r.points_used == 6);
  }

  SUBCASE("shift invariance in k") {
    std::vector<std::pair<double, double>> a, b;
    for (int k = 2; k <= 7; ++k) {
      a.emplace_back(k, std::pow(2.0, -2.5 * k));
      b.emplace_back(k + 10, std::pow(2.0, -2.5 * (k + 10)));
    }
    CHECK(fit_order(a, 2, 7).slope ==
          doctest::Approx(fit_order(b, 12, 17).slope).epsilon(1e-12));
  }

  SUBCASE("multiplicative noise moves the slope by less than 0.1") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> eps(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<std::pair<double, double>> pts;
      for (int k = 2; k <= 9; ++k)
        pts.emplace_back(k, std::pow(2.0, -3 * k) * (1.0 + 0.05 * eps(rng)));
      CHECK(std::abs(fit_order(pts, 2, 9).slope - 3.0) < 0.1);
    }
  }

  SUBCASE("zero and NaN errors are excluded with flags") {
    std::vector<std::pair<double, double>> pts;
    for (int k = 2; k <= 8; ++k) pts.emplace_back(k, std::pow(2.0, -2 * k));
    pts[0].second = 0.0;
    pts[1].second = std::nan("");
    FitResult r = fit_order(pts, 2, 8);
    CHECK(r.points_used == 5);
    CHECK(r.flags.size() == 2);
    CHECK(r.slope == doctest::Approx(2.0).epsilon(1e-12));
  }

  SUBCASE("fewer than 3 usable points is an error") {
    std::vector<std::pair<double, double>> pts{{2, 0.1}, {3, 0.05}};
    CHECK_THROWS_AS(fit_order(pts, 2, 3), std::invalid_argument);
  }
}

namespace {

StudySpec small_spec() {
  StudySpec s;
  s.nonlinearity = "sine";
  s.rho = 1.0;
  s.n_x = 32;
  s.data.kind = DataKind::Rough;
  s.data.theta = 4.0;
  s.data.seed = 1;
  s.data.n_seeds = 1;
  s.methods = {Method::Gautschi2, Method::Strang2};
  s.k_min = 2;
  s.k_max = 6;
  s.k_ref = 11;
  s.T = 1.0;
  return s;
}

}  // namespace

TEST_CASE("temporal_study measures second order for the order-2 baselines") {
  ConvergenceReport report = temporal_study(small_spec());
  REQUIRE(report.rows.size() == 2 * 5);
  for (const auto& fit : report.fits) {
    CAPTURE(fit.method);
    CHECK(fit.slope_mean > 1.8);
    CHECK(fit.slope_mean < 2.2);
  }
  for (const auto& row : report.rows) CHECK(row.err >= 0.0);
}

TEST_CASE("temporal_study err columns are deterministic bit for bit") {
  StudySpec s = small_spec();
  s.methods = {Method::Lri3};
  ConvergenceReport a = temporal_study(s);
  ConvergenceReport b = temporal_study(s);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i)
    CHECK(a.rows[i].err == b.rows[i].err);
}

TEST_CASE("temporal_study with f = 0 sits at the reference floor") {
  StudySpec s = small_spec();
  s.nonlinearity = "zero";
  s.methods = {Method::Lri3};
  ConvergenceReport report = temporal_study(s);
  for (const auto& row : report.rows) CHECK(row.err <= 1e-10);
}

TEST_CASE("temporal_study validates the reference stepsize margin") {
  StudySpec s = small_spec();
  s.k_ref = s.k_max + 2;
  CHECK_THROWS_AS(temporal_study(s), std::invalid_argument);
}

TEST_CASE("reference consistency: rk4ref and fine-lri3 agree within floors") {
  // Switching reference mode moves the measured errors by no more than the
  // distance between the two references themselves.
  StudySpec s = small_spec();
  s.methods = {Method::Gautschi2};
  s.check_ref_floor = false;

  Problem problem = make_problem(s);
  SymbolTable symbols = make_symbols(problem.grid, problem.rho);
  SpectralContext ctx(problem.grid);
  State s0 = make_initial_state(s, problem.grid);
  double h_ref = std::pow(2.0, -s.k_ref);
  State ref_rk4 = rk4ref_evolve(s0, s.T, h_ref, ctx, symbols, problem);
  auto lri = make_stepper(Method::Lri3, ctx, symbols, problem, h_ref);
  State ref_lri = evolve(s0, s.T, *lri).final_state;
  double ref_gap = error_metric(ref_rk4, ref_lri);

  auto st = make_stepper(Method::Gautschi2, ctx, symbols, problem, 0.125);
  State fin = evolve(s0, s.T, *st).final_state;
  double err_a = error_metric(fin, ref_rk4);
  double err_b = error_metric(fin, ref_lri);
  CHECK(std::abs(err_a - err_b) <= 2.0 * ref_gap + 1e-14);
}

TEST_CASE("spatial_study: single-mode data on the linear problem sits at the "
          "machine floor for every n_x") {
  StudySpec s;
  s.nonlinearity = "zero";
  s.rho = 1.0;
  s.data.kind = DataKind::SingleMode;
  s.data.n_seeds = 1;
  s.methods = {Method::Lri3};
  s.nx_list = {8, 16, 32};
  s.nx_ref = 128;
  s.h_spatial = 1.0 / 64.0;
  s.T = 1.0;
  s.spatial_probe = false;
  ConvergenceReport report = spatial_study(s);
  REQUIRE(report.rows.size() == 3);
  for (const auto& row : report.rows) CHECK(row.err <= 1e-10);
}

TEST_CASE("spatial_study: analytic solutions hit the floor once resolved") {
  // sin(u) spreads a single mode into an exponentially decaying spectrum;
  // by n_x = 32 the truncated tail is at roundoff.
  StudySpec s;
  s.nonlinearity = "sine";
  s.rho = 0.0;
  s.data.kind = DataKind::SingleMode;
  s.data.n_seeds = 1;
  s.methods = {Method::Lri3};
  s.nx_list = {8, 32};
  s.nx_ref = 128;
  s.h_spatial = 1.0 / 64.0;
  s.T = 1.0;
  s.spatial_probe = false;
  ConvergenceReport report = spatial_study(s);
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].err > 1e-5);   // n = 8 cannot hold the spectrum
  CHECK(report.rows[1].err <= 1e-11); // n = 32 can
}

TEST_CASE("efficiency_study rows and target ordering") {
  StudySpec s = small_spec();
  s.methods = {Method::Lri3, Method::Gautschi2};
  s.T_eff = 1.0;
  s.k_min = 2;
  s.k_max = 6;
  s.target_err = 1e-3;
  ConvergenceReport report = efficiency_study(s);
  REQUIRE(report.rows.size() == 2 * 5);
  for (const auto& row : report.rows) {
    CHECK(row.err >= 0.0);
    CHECK(row.wall_ns > 0);
  }
  REQUIRE(report.time_to_target.size() == 2);
  // More steps cost more time within one method.
  for (const auto& m : {std::string("lri3"), std::string("gautschi2")}) {
    std::uint64_t coarse = 0, fine = 0;
    for (const auto& row : report.rows) {
      if (row.method != m) continue;
      if (row.k == s.k_min) coarse = row.wall_ns;
      if (row.k == s.k_max) fine = row.wall_ns;
    }
    CHECK(fine > coarse);
  }
}

TEST_CASE("report serialization has the documented shape") {
  StudySpec s = small_spec();
  s.methods = {Method::Lri3};
  ConvergenceReport report = temporal_study(s);
  std::string csv = report_to_csv(report);
  CHECK(csv.rfind("method,k,h,err,wall_ns,flags\n", 0) == 0);
  std::size_t lines = std::count(csv.begin(), csv.end(), '\n');
  CHECK(lines == 1 + report.rows.size());
  std::string json = report_to_json(report);
  CHECK(json.find("\"study\": \"temporal\"") != std::string::npos);
  CHECK(json.find("\"version\"") != std::string::npos);
  CHECK(json.find("\"seed\"") != std::string::npos);
  auto plots = report_plot_data(report);
  CHECK(plots.count("plot_temporal_lri3.dat") == 1);
}

TEST_CASE("study threads do not change results") {
  StudySpec s = small_spec();
  s.methods = {Method::Strang2};
  ConvergenceReport serial = temporal_study(s);
  s.threads = 4;
  ConvergenceReport parallel = temporal_study(s);
  REQUIRE(serial.rows.size() == parallel.rows.size());
  for (std::size_t i = 0; i < serial.rows.size(); ++i) {
    CHECK(serial.rows[i].method == parallel.rows[i].method);
    CHECK(serial.rows[i].k == parallel.rows[i].k);
    CHECK(serial.rows[i].err == parallel.rows[i].err);
  }
}
