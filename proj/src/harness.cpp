#include "kglri/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "kglri/version.hpp"

namespace kglri {

namespace {

double ladder_h(int k) { return std::pow(2.0, -k); }

std::uint64_t now_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (i) out += ';';
    out += flags[i];
  }
  return out;
}

State run_reference(const StudySpec& spec, const State& s0,
                    const SpectralContext& ctx, const SymbolTable& symbols,
                    const Problem& problem, double h_ref, double t_end) {
  StepperOptions opts{spec.dealias};
  Method m = spec.reference == ReferenceMode::Rk4Ref ? Method::Rk4Ref
                                                     : Method::Lri3;
  auto stepper = make_stepper(m, ctx, symbols, problem, h_ref, opts);
  return evolve(s0, t_end, *stepper).final_state;
}

struct CellTask {
  Method method;
  int k;
  double h;
  int seed_index;
};

// Run one (method, h) cell: evolve from s0 and compare against the
// reference at t_end. Builds its own transform context so tasks can run on
// separate threads.
CellRow run_cell(const StudySpec& spec, const CellTask& task, const State& s0,
                 const SymbolTable& symbols, const Problem& problem,
                 const State& ref, double t_end) {
  SpectralContext ctx(problem.grid);
  StepperOptions opts{spec.dealias};
  auto stepper = make_stepper(task.method, ctx, symbols, problem, task.h, opts);
  std::uint64_t t0 = now_ns();
  State final_state = evolve(s0, t_end, *stepper).final_state;
  std::uint64_t wall = now_ns() - t0;

  CellRow row;
  row.method = method_name(task.method);
  row.seed_index = task.seed_index;
  row.k = task.k;
  row.h = task.h;
  row.n_x = problem.grid.n;
  MetricFlags mf;
  row.err = error_metric(final_state, ref, &mf);
  row.wall_ns = wall;
  if (mf.abs_fallback_u) row.flags.push_back("abs-fallback-u");
  if (mf.abs_fallback_v) row.flags.push_back("abs-fallback-v");
  return row;
}

void run_tasks(const StudySpec& spec, const std::vector<CellTask>& tasks,
               const State& s0, const SymbolTable& symbols,
               const Problem& problem, const State& ref, double t_end,
               std::vector<CellRow>& rows) {
  const std::size_t base = rows.size();
  rows.resize(base + tasks.size());
  int threads = std::max(1, spec.threads);
  if (threads == 1 || tasks.size() <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i)
      rows[base + i] = run_cell(spec, tasks[i], s0, symbols, problem, ref, t_end);
    return;
  }
  std::vector<std::future<CellRow>> futures;
  futures.reserve(tasks.size());
  for (const auto& task : tasks)
    futures.push_back(std::async(std::launch::async, [&, task] {
      return run_cell(spec, task, s0, symbols, problem, ref, t_end);
    }));
  for (std::size_t i = 0; i < tasks.size(); ++i)
    rows[base + i] = futures[i].get();
}

void flag_monotonicity(std::vector<CellRow>& rows) {
  // Within one (method, seed) ladder, an error that grows as h shrinks is
  // recorded, not hidden.
  for (auto& row : rows) {
    for (const auto& other : rows) {
      if (other.method == row.method && other.seed_index == row.seed_index &&
          other.n_x == row.n_x && other.k == row.k - 1 &&
          row.err > other.err * (1.0 + 1e-12)) {
        row.flags.push_back("non-monotone");
        break;
      }
    }
  }
}

void fit_ladder(const StudySpec& spec, const std::string& study,
                std::vector<CellRow>& rows, double floor,
                ConvergenceReport& report) {
  // Auto window drops the two coarsest stepsizes but keeps >= 3 points.
  int lo = spec.fit_lo > 0 ? spec.fit_lo
                           : std::min(spec.k_min + 2, spec.k_max - 2);
  int hi = spec.fit_hi > 0 ? spec.fit_hi : spec.k_max;
  (void)study;
  for (Method m : spec.methods) {
    MethodFit fit;
    fit.method = method_name(m);
    double slope_sum = 0.0, resid_sum = 0.0;
    int seeds_used = 0;
    for (int s = 0; s < spec.data.n_seeds; ++s) {
      std::vector<std::pair<double, double>> pts;
      for (auto& row : rows) {
        if (row.method != fit.method || row.seed_index != s) continue;
        if (floor > 0.0 && row.err < floor) {
          row.flags.push_back("at-reference-floor");
          continue;
        }
        pts.emplace_back(row.k, row.err);
      }
      try {
        FitResult r = fit_order(pts, lo, hi);
        fit.per_seed_slopes.push_back(r.slope);
        slope_sum += r.slope;
        resid_sum += r.residual_rms;
        ++seeds_used;
        for (const auto& f : r.flags) fit.flags.push_back(f);
      } catch (const std::exception& e) {
        fit.flags.push_back(std::string("fit-failed-seed-") +
                            std::to_string(s) + ": " + e.what());
      }
    }
    if (seeds_used > 0) {
      fit.slope_mean = slope_sum / seeds_used;
      fit.residual_rms_mean = resid_sum / seeds_used;
    }
    report.fits.push_back(std::move(fit));
  }
}

}  // namespace

double error_metric(const State& num, const State& ref, MetricFlags* flags) {
  if (num.u.grid != ref.u.grid)
    throw std::invalid_argument("error_metric: grid mismatch");
  if (std::abs(num.t - ref.t) > 1e-9 * std::max(1.0, std::abs(ref.t)))
    throw std::invalid_argument("error_metric: states are at different times");

  SpectralField du(num.u.grid), dv(num.v.grid);
  for (std::size_t i = 0; i < du.coeffs.size(); ++i) {
    du.coeffs[i] = num.u.coeffs[i] - ref.u.coeffs[i];
    dv.coeffs[i] = num.v.coeffs[i] - ref.v.coeffs[i];
  }
  const double nu = sobolev_norm(ref.u, 1.0);
  const double nv = sobolev_norm(ref.v, 0.0);
  double eu = sobolev_norm(du, 1.0);
  double ev = sobolev_norm(dv, 0.0);
  MetricFlags mf;
  if (nu >= 1e-14) {
    eu /= nu;
  } else {
    mf.abs_fallback_u = true;
  }
  if (nv >= 1e-14) {
    ev /= nv;
  } else {
    mf.abs_fallback_v = true;
  }
  if (flags) *flags = mf;
  return eu + ev;
}

FitResult fit_order(const std::vector<std::pair<double, double>>& points,
                    double window_lo, double window_hi) {
  FitResult result;
  std::vector<std::pair<double, double>> usable;  // (x=-k, y=log2 err)
  for (const auto& [k, err] : points) {
    if (k < window_lo || k > window_hi) continue;
    if (!(err > 0.0) || !std::isfinite(err)) {
      result.flags.push_back("excluded-nonpositive-err-k" +
                             std::to_string(static_cast<int>(k)));
      continue;
    }
    usable.emplace_back(-k, std::log2(err));
  }
  if (usable.size() < 3)
    throw std::invalid_argument("fit_order: fewer than 3 usable points");

  double xm = 0.0, ym = 0.0;
  for (auto& [x, y] : usable) {
    xm += x;
    ym += y;
  }
  xm /= usable.size();
  ym /= usable.size();
  double sxx = 0.0, sxy = 0.0;
  for (auto& [x, y] : usable) {
    sxx += (x - xm) * (x - xm);
    sxy += (x - xm) * (y - ym);
  }
  result.slope = sxy / sxx;
  double intercept = ym - result.slope * xm;
  double ss = 0.0;
  for (auto& [x, y] : usable) {
    double r = y - (intercept + result.slope * x);
    ss += r * r;
  }
  result.residual_rms = std::sqrt(ss / usable.size());
  result.points_used = static_cast<int>(usable.size());
  return result;
}

Problem make_problem(const StudySpec& spec, int n_x_override) {
  Problem p;
  p.grid = make_grid(spec.dim, n_x_override > 0 ? n_x_override : spec.n_x,
                     spec.a, spec.b);
  p.rho = spec.rho;
  p.nl = catalogue(spec.nonlinearity, spec.lambda);
  return p;
}

State make_initial_state(const StudySpec& spec, const TorusGrid& grid) {
  State s;
  s.t = 0.0;
  RoughData d = spec.data.kind == DataKind::Rough
                    ? rough_data(spec.data.theta, spec.data.seed, grid)
                    : single_mode_data(grid);
  s.u = std::move(d.u0);
  s.v = std::move(d.v0);
  return s;
}

ConvergenceReport temporal_study(const StudySpec& spec) {
  if (spec.k_min >= spec.k_max)
    throw std::invalid_argument("temporal_study: needs k_min < k_max");
  if (spec.k_ref < spec.k_max + 5)
    throw std::invalid_argument(
        "temporal_study: reference stepsize must be <= smallest h / 32 "
        "(k_ref >= k_max + 5)");

  ConvergenceReport report;
  report.study = "temporal";
  report.spec = spec;
  report.version = kVersion;

  Problem problem = make_problem(spec);
  SymbolTable symbols = make_symbols(problem.grid, problem.rho);
  SpectralContext ctx(problem.grid);
  const double h_ref = ladder_h(spec.k_ref);

  for (int s = 0; s < spec.data.n_seeds; ++s) {
    StudySpec seed_spec = spec;
    seed_spec.data.seed = spec.data.seed + static_cast<std::uint64_t>(s);
    State s0 = make_initial_state(seed_spec, problem.grid);

    State ref = run_reference(spec, s0, ctx, symbols, problem, h_ref, spec.T);
    if (spec.check_ref_floor) {
      State ref2 =
          run_reference(spec, s0, ctx, symbols, problem, 0.5 * h_ref, spec.T);
      report.ref_self_err =
          std::max(report.ref_self_err, error_metric(ref, ref2));
    }

    std::vector<CellTask> tasks;
    for (Method m : spec.methods)
      for (int k = spec.k_min; k <= spec.k_max; ++k)
        tasks.push_back({m, k, ladder_h(k), s});
    run_tasks(spec, tasks, s0, symbols, problem, ref, spec.T, report.rows);
  }

  if (spec.data.n_seeds > 1)
    for (auto& row : report.rows)
      row.flags.push_back("seed=" + std::to_string(row.seed_index));

  flag_monotonicity(report.rows);
  fit_ladder(spec, report.study, report.rows,
             spec.check_ref_floor ? 100.0 * report.ref_self_err : 0.0, report);
  return report;
}

ConvergenceReport spatial_study(const StudySpec& spec) {
  ConvergenceReport report;
  report.study = "spatial";
  report.spec = spec;
  report.version = kVersion;

  for (int nx : spec.nx_list)
    if (nx * 4 > spec.nx_ref)
      throw std::invalid_argument(
          "spatial_study: nx_ref must be at least 4x the largest n_x");

  const double h = spec.h_spatial;
  const double t_end = std::round(spec.T / h) * h;  // land on a step multiple

  // High-resolution reference with mode-shared data; coarse runs are
  // compared against its truncation to their own grid.
  Problem ref_problem = make_problem(spec, spec.nx_ref);
  SymbolTable ref_symbols = make_symbols(ref_problem.grid, ref_problem.rho);
  SpectralContext ref_ctx(ref_problem.grid);
  State ref_s0 = make_initial_state(spec, ref_problem.grid);
  StepperOptions opts{spec.dealias};
  auto ref_stepper = make_stepper(Method::Lri3, ref_ctx, ref_symbols,
                                  ref_problem, h, opts);
  State ref = evolve(ref_s0, t_end, *ref_stepper).final_state;

  for (Method m : spec.methods) {
    for (std::size_t i = 0; i < spec.nx_list.size(); ++i) {
      int nx = spec.nx_list[i];
      Problem problem = make_problem(spec, nx);
      SymbolTable symbols = make_symbols(problem.grid, problem.rho);
      SpectralContext ctx(problem.grid);
      State s0 = make_initial_state(spec, problem.grid);
      auto stepper = make_stepper(m, ctx, symbols, problem, h, opts);

      std::uint64_t w0 = now_ns();
      State fin = evolve(s0, t_end, *stepper).final_state;
      std::uint64_t wall = now_ns() - w0;

      State ref_coarse{ref.t, restrict_to(ref.u, problem.grid),
                       restrict_to(ref.v, problem.grid)};
      CellRow row;
      row.method = method_name(m);
      row.k = static_cast<int>(std::lround(std::log2(nx)));
      row.h = h;
      row.n_x = nx;
      MetricFlags mf;
      row.err = error_metric(fin, ref_coarse, &mf);
      row.wall_ns = wall;
      if (mf.abs_fallback_u) row.flags.push_back("abs-fallback-u");
      if (mf.abs_fallback_v) row.flags.push_back("abs-fallback-v");

      // Halving probe at the finest resolution: the temporal error must be
      // negligible against the spatial error being measured.
      if (spec.spatial_probe && i + 1 == spec.nx_list.size()) {
        auto probe_stepper =
            make_stepper(m, ctx, symbols, problem, 0.5 * h, opts);
        State probe = evolve(s0, t_end, *probe_stepper).final_state;
        double err2 = error_metric(probe, ref_coarse);
        if (std::abs(err2 - row.err) > 0.1 * std::max(row.err, 1e-300))
          row.flags.push_back("temporal-contamination");
      }
      report.rows.push_back(std::move(row));
    }

    // Spatial slope: d log2(err) / d log2(n_x), fitted over the whole ladder.
    MethodFit fit;
    fit.method = method_name(m);
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : report.rows)
      if (row.method == fit.method) pts.emplace_back(row.k, row.err);
    try {
      FitResult r = fit_order(pts, -1e9, 1e9);
      fit.slope_mean = -r.slope;  // sign: increasing n_x, decreasing error
      fit.residual_rms_mean = r.residual_rms;
      fit.per_seed_slopes.push_back(-r.slope);
      for (const auto& f : r.flags) fit.flags.push_back(f);
    } catch (const std::exception& e) {
      fit.flags.push_back(std::string("fit-failed: ") + e.what());
    }
    report.fits.push_back(std::move(fit));
  }
  return report;
}

ConvergenceReport efficiency_study(const StudySpec& spec) {
  ConvergenceReport report;
  report.study = "efficiency";
  report.spec = spec;
  report.version = kVersion;

  Problem problem = make_problem(spec);
  SymbolTable symbols = make_symbols(problem.grid, problem.rho);
  SpectralContext ctx(problem.grid);
  State s0 = make_initial_state(spec, problem.grid);
  const double h_ref = ladder_h(spec.k_ref);
  State ref = run_reference(spec, s0, ctx, symbols, problem, h_ref, spec.T_eff);

  std::vector<CellTask> tasks;
  for (Method m : spec.methods)
    for (int k = spec.k_min; k <= spec.k_max; ++k)
      tasks.push_back({m, k, ladder_h(k), 0});
  run_tasks(spec, tasks, s0, symbols, problem, ref, spec.T_eff, report.rows);

  for (Method m : spec.methods) {
    TargetTime t;
    t.method = method_name(m);
    for (const auto& row : report.rows) {
      if (row.method != t.method || row.err > spec.target_err) continue;
      t.reached = true;
      t.k = row.k;
      t.err = row.err;
      t.wall_ns = row.wall_ns;
      break;  // rows are ordered coarse to fine; first hit is cheapest
    }
    report.time_to_target.push_back(t);
  }
  std::stable_sort(report.time_to_target.begin(), report.time_to_target.end(),
                   [](const TargetTime& a, const TargetTime& b) {
                     if (a.reached != b.reached) return a.reached;
                     return a.wall_ns < b.wall_ns;
                   });
  return report;
}

namespace {

nlohmann::json spec_to_json(const StudySpec& s) {
  nlohmann::json j;
  j["problem"] = {{"nonlinearity", s.nonlinearity}, {"lambda", s.lambda},
                  {"rho", s.rho},                   {"d", s.dim},
                  {"n_x", s.n_x},                   {"a", s.a},
                  {"b", s.b}};
  j["data"] = {
      {"kind", s.data.kind == DataKind::Rough ? "rough" : "single_mode"},
      {"theta", s.data.theta},
      {"seed", s.data.seed},
      {"n_seeds", s.data.n_seeds}};
  std::vector<std::string> methods;
  for (Method m : s.methods) methods.push_back(method_name(m));
  j["study"] = {{"methods", methods},
                {"k_min", s.k_min},
                {"k_max", s.k_max},
                {"T", s.T},
                {"reference",
                 s.reference == ReferenceMode::Rk4Ref ? "rk4ref" : "lri3"},
                {"k_ref", s.k_ref},
                {"fit_lo", s.fit_lo},
                {"fit_hi", s.fit_hi},
                {"dealias", s.dealias},
                {"threads", s.threads},
                {"check_ref_floor", s.check_ref_floor},
                {"nx_list", s.nx_list},
                {"nx_ref", s.nx_ref},
                {"h_spatial", s.h_spatial},
                {"T_eff", s.T_eff},
                {"target_err", s.target_err}};
  return j;
}

}  // namespace

std::string report_to_json(const ConvergenceReport& report) {
  nlohmann::json j;
  j["study"] = report.study;
  j["version"] = report.version;
  j["spec"] = spec_to_json(report.spec);
  j["ref_self_err"] = report.ref_self_err;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : report.rows)
    j["rows"].push_back({{"method", r.method},
                         {"seed_index", r.seed_index},
                         {"k", r.k},
                         {"h", r.h},
                         {"n_x", r.n_x},
                         {"err", r.err},
                         {"wall_ns", r.wall_ns},
                         {"flags", r.flags}});
  j["fits"] = nlohmann::json::array();
  for (const auto& f : report.fits)
    j["fits"].push_back({{"method", f.method},
                         {"slope_mean", f.slope_mean},
                         {"residual_rms_mean", f.residual_rms_mean},
                         {"per_seed_slopes", f.per_seed_slopes},
                         {"flags", f.flags}});
  if (!report.time_to_target.empty()) {
    j["time_to_target"] = nlohmann::json::array();
    for (const auto& t : report.time_to_target)
      j["time_to_target"].push_back({{"method", t.method},
                                     {"reached", t.reached},
                                     {"k", t.k},
                                     {"err", t.err},
                                     {"wall_ns", t.wall_ns}});
  }
  return j.dump(2) + "\n";
}

std::string report_to_csv(const ConvergenceReport& report) {
  std::ostringstream os;
  os << "method,k,h,err,wall_ns,flags\n";
  for (const auto& r : report.rows)
    os << r.method << ',' << r.k << ',' << fmt_double(r.h) << ','
       << fmt_double(r.err) << ',' << r.wall_ns << ',' << join_flags(r.flags)
       << '\n';
  return os.str();
}

std::map<std::string, std::string> report_plot_data(
    const ConvergenceReport& report) {
  std::map<std::string, std::string> files;
  std::vector<std::string> methods;
  for (const auto& r : report.rows)
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
      methods.push_back(r.method);

  for (const auto& m : methods) {
    std::ostringstream os;
    if (report.study == "efficiency") {
      os << "# wall_seconds err\n";
      for (const auto& r : report.rows)
        if (r.method == m)
          os << fmt_double(r.wall_ns * 1e-9) << ' ' << fmt_double(r.err) << '\n';
    } else if (report.study == "spatial") {
      os << "# n_x err\n";
      for (const auto& r : report.rows)
        if (r.method == m) os << r.n_x << ' ' << fmt_double(r.err) << '\n';
    } else {
      // Geometric mean over seeds at each k.
      os << "# h err\n";
      for (int k = report.spec.k_min; k <= report.spec.k_max; ++k) {
        double logsum = 0.0;
        int count = 0;
        double h = 0.0;
        for (const auto& r : report.rows) {
          if (r.method != m || r.k != k || !(r.err > 0.0)) continue;
          logsum += std::log(r.err);
          ++count;
          h = r.h;
        }
        if (count > 0)
          os << fmt_double(h) << ' ' << fmt_double(std::exp(logsum / count))
             << '\n';
      }
    }
    files["plot_" + report.study + "_" + m + ".dat"] = os.str();
  }
  return files;
}

}  // namespace kglri
