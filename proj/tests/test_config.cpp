#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "kglri/config.hpp"
#include "kglri/rough_data.hpp"
#include "kglri/state_io.hpp"

using namespace kglri;

namespace {

std::string write_temp_config(const std::string& body) {
  static int counter = 0;
  auto path = std::filesystem::temp_directory_path() /
              ("kglri_cfg_" + std::to_string(counter++) + ".ini");
  std::ofstream os(path);
  os << body;
  return path.string();
}

}  // namespace

TEST_CASE("minimal config fills the documented defaults") {
  std::string path = write_temp_config(
      "[problem]\n"
      "nonlinearity = sine\n"
      "d = 1\n"
      "rho = 0\n"
      "[data]\n"
      "theta = 2\n"
      "[study]\n"
      "T = 1\n");
  RunConfig cfg = parse_config(path);
  CHECK(cfg.study.n_x == 256);
  CHECK(cfg.study.k_min == 2);
  CHECK(cfg.study.k_max == 8);
  CHECK(cfg.study.data.seed == 1);
  CHECK(cfg.study.data.theta == 2.0);
  CHECK(cfg.study.data.n_seeds == 4);  // rough-data ensemble default
  CHECK(cfg.study.a == doctest::Approx(-3.14159265358979323846));
  CHECK(cfg.out_dir == "out");
}

TEST_CASE("empty path gives pure defaults; overrides apply on top") {
  RunConfig cfg = parse_config("", {"problem.n_x=64", "study.k_max=6"});
  CHECK(cfg.study.n_x == 64);
  CHECK(cfg.study.k_max == 6);
}

TEST_CASE("validation errors name the key and constraint") {
  CHECK_THROWS_WITH_AS(parse_config("", {"problem.n_x=100"}),
                       doctest::Contains("power of two"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("", {"data.theta=0.4"}),
                       doctest::Contains("theta must be > 1/2"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("", {"study.T=0"}),
                       doctest::Contains("study.T"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("", {"problem.rho=-1"}),
                       doctest::Contains("rho"), ConfigError);
}

TEST_CASE("unknown keys are hard errors") {
  std::string path = write_temp_config("[problem]\ntypo_key = 3\n");
  CHECK_THROWS_WITH_AS(parse_config(path), doctest::Contains("unknown key"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("", {"study.bogus=1"}),
                       doctest::Contains("unknown key"), ConfigError);
}

TEST_CASE("parse errors carry the line number") {
  std::string path = write_temp_config("[problem]\nrho 0.5\n");
  CHECK_THROWS_WITH_AS(parse_config(path), doctest::Contains(":2:"),
                       ConfigError);
}

TEST_CASE("environment variables override the file") {
  std::string path = write_temp_config("[study]\nk_max = 8\n");
  setenv("KGLRI_STUDY_K_MAX", "7", 1);
  RunConfig cfg = parse_config(path);
  unsetenv("KGLRI_STUDY_K_MAX");
  CHECK(cfg.study.k_max == 7);
}

TEST_CASE("--set overrides beat environment variables") {
  setenv("KGLRI_STUDY_K_MAX", "7", 1);
  RunConfig cfg = parse_config("", {"study.k_max=6"});
  unsetenv("KGLRI_STUDY_K_MAX");
  CHECK(cfg.study.k_max == 6);
}

TEST_CASE("config echo embeds the resolved values") {
  RunConfig cfg = parse_config("", {"problem.n_x=64"});
  std::string echo = cfg.echo_json();
  CHECK(echo.find("\"n_x\": 64") != std::string::npos);
  CHECK(echo.find("\"seed\": 1") != std::string::npos);
}

TEST_CASE("state files round trip bit-exactly") {
  TorusGrid g = make_grid(1, 64, -3.14159265358979323846,
                          3.14159265358979323846);
  RoughData d = rough_data(2.0, 21, g);
  State s{0.75, std::move(d.u0), std::move(d.v0)};
  auto path = (std::filesystem::temp_directory_path() / "kglri_state.bin")
                  .string();
  write_state(path, s, 1.5);
  LoadedState back = read_state(path);
  CHECK(back.rho == 1.5);
  CHECK(back.state.t == 0.75);
  CHECK(back.state.u.grid == g);
  REQUIRE(back.state.u.coeffs.size() == s.u.coeffs.size());
  for (std::size_t i = 0; i < s.u.coeffs.size(); ++i) {
    CHECK(back.state.u.coeffs[i] == s.u.coeffs[i]);
    CHECK(back.state.v.coeffs[i] == s.v.coeffs[i]);
  }
  std::remove(path.c_str());
}

TEST_CASE("state reader rejects corrupted headers") {
  auto path =
      (std::filesystem::temp_directory_path() / "kglri_bad.bin").string();
  std::ofstream os(path, std::ios::binary);
  os << "NOTMAGIC garbage";
  os.close();
  CHECK_THROWS_AS(read_state(path), std::runtime_error);
  std::remove(path.c_str());
}
