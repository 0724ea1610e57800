#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "kglri/rough_data.hpp"
#include "kglri/steppers.hpp"

namespace kglri {

struct MetricFlags {
  bool abs_fallback_u = false;
  bool abs_fallback_v = false;
};

// err = ||u_n - u_ref||_{H^1} / ||u_ref||_{H^1}
//     + ||v_n - v_ref||_{L^2} / ||v_ref||_{L^2}
// Reference norms below 1e-14 switch that term to the absolute norm and set
// the corresponding flag. Grid or time mismatch throws.
double error_metric(const State& num, const State& ref,
                    MetricFlags* flags = nullptr);

struct FitResult {
  double slope = 0.0;  // of log2(err) against -k: order-p data gives +p
  double residual_rms = 0.0;
  int points_used = 0;
  std::vector<std::string> flags;
};

// Least-squares fit over points (k, err) with k in [window_lo, window_hi].
// Nonpositive or non-finite errors are excluded and flagged; fewer than
// three usable points is an error.
FitResult fit_order(const std::vector<std::pair<double, double>>& points,
                    double window_lo, double window_hi);

enum class ReferenceMode { Rk4Ref, FineLri3 };
enum class DataKind { Rough, SingleMode };

struct DataSpec {
  DataKind kind = DataKind::Rough;
  double theta = 2.0;
  std::uint64_t seed = 1;
  int n_seeds = 1;
};

// One spec drives all three studies; fields irrelevant to a study are
// ignored there.
struct StudySpec {
  std::string nonlinearity = "sine";
  double lambda = 1.0;
  double rho = 0.0;
  int dim = 1;
  int n_x = 256;
  double a = -3.14159265358979323846;
  double b = 3.14159265358979323846;
  DataSpec data;

  std::vector<Method> methods{Method::Lri3};
  int k_min = 2;
  int k_max = 8;            // stepsize ladder h = 2^-k
  double T = 1.0;
  ReferenceMode reference = ReferenceMode::Rk4Ref;
  int k_ref = 14;           // reference stepsize 2^-k_ref
  int fit_lo = 0;           // 0: auto (k_min + 2, dropping the two coarsest)
  int fit_hi = 0;           // 0: auto (k_max)
  bool dealias = false;
  int threads = 1;
  bool check_ref_floor = true;  // extra reference run to estimate its floor

  std::vector<int> nx_list{32, 64, 128, 256, 512};  // spatial ladder
  int nx_ref = 2048;
  double h_spatial = 1e-5;
  bool spatial_probe = true;  // halving probe for temporal contamination

  double T_eff = 5.0;         // efficiency horizon
  double target_err = 1e-6;
};

struct CellRow {
  std::string method;
  int seed_index = 0;
  int k = 0;       // log2(1/h), or log2(n_x) for spatial rows
  double h = 0.0;
  int n_x = 0;
  double err = 0.0;
  std::uint64_t wall_ns = 0;
  std::vector<std::string> flags;
};

struct MethodFit {
  std::string method;
  double slope_mean = 0.0;
  double residual_rms_mean = 0.0;
  std::vector<double> per_seed_slopes;
  std::vector<std::string> flags;
};

struct TargetTime {
  std::string method;
  bool reached = false;
  int k = 0;
  double err = 0.0;
  std::uint64_t wall_ns = 0;
};

struct ConvergenceReport {
  std::string study;  // temporal | spatial | efficiency
  StudySpec spec;
  std::vector<CellRow> rows;
  std::vector<MethodFit> fits;
  std::vector<TargetTime> time_to_target;  // efficiency only
  double ref_self_err = 0.0;
  std::string version;
};

ConvergenceReport temporal_study(const StudySpec& spec);
ConvergenceReport spatial_study(const StudySpec& spec);
ConvergenceReport efficiency_study(const StudySpec& spec);

std::string report_to_json(const ConvergenceReport& report);
std::string report_to_csv(const ConvergenceReport& report);
// One plottable text file per method: x y rows (x = h, n_x or wall seconds).
std::map<std::string, std::string> report_plot_data(const ConvergenceReport& report);

// Shared helpers for building runs outside the studies.
Problem make_problem(const StudySpec& spec, int n_x_override = 0);
State make_initial_state(const StudySpec& spec, const TorusGrid& grid);

}  // namespace kglri
