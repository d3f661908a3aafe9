#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dve/errors.hpp"
#include "dve/run.hpp"

using namespace dve;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path temp_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() / ("dve_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("empty config defaults to the stress-free case") {
  std::istringstream empty("");
  const RunConfig config = parse_config_stream(empty, "<empty>");
  CHECK(config.case_name == "stress_free");
  CHECK(config.aux.c_u == 100.0);
  CHECK(config.aux.c_e == 100.0);
  CHECK(config.newton.tol == 1e-10);
  CHECK_NOTHROW(config.validate());
}

TEST_CASE("config parsing, overrides and rejection") {
  std::istringstream in(
      "# comment\n"
      "case = stressed_homogeneous\n"
      "elements = 100, 200\n"
      "c_e = 250\n"
      "seed = 11\n");
  RunConfig config = parse_config_stream(in, "<test>");
  CHECK(config.case_name == "stressed_homogeneous");
  CHECK(config.elements == std::vector<int>{100, 200});
  CHECK(config.aux.c_e == 250.0);

  // Flag overrides beat file values.
  apply_override(config, "elements", "64");
  CHECK(config.elements == std::vector<int>{64});

  CHECK_THROWS_AS(apply_override(config, "not_a_key", "1"), ConfigError);
  std::istringstream bad("nonsense line\n");
  CHECK_THROWS_AS(parse_config_stream(bad, "<bad>"), ConfigError);
}

TEST_CASE("validation names the offending field") {
  RunConfig config;
  config.aux.c_e = -1.0;
  try {
    config.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& err) {
    CHECK(err.field() == "c_e");
  }

  RunConfig bad_case;
  bad_case.case_name = "not_a_case";
  try {
    bad_case.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& err) {
    CHECK(err.field() == "case");
  }
}

TEST_CASE("static case run writes deterministic artifacts") {
  RunConfig config;
  config.case_name = "stressed_homogeneous";
  config.elements = {80};

  const auto dir_a = temp_dir("det_a");
  const auto dir_b = temp_dir("det_b");
  std::ostringstream log;
  config.out_dir = dir_a.string();
  REQUIRE(run(config, log) == 0);
  config.out_dir = dir_b.string();
  REQUIRE(run(config, log) == 0);

  for (const char* name :
       {"fields_stressed_homogeneous_80.csv", "table_stressed_homogeneous.csv",
        "newton_stressed_homogeneous_80.txt"}) {
    CHECK(slurp(dir_a / name) == slurp(dir_b / name));
    CHECK(!slurp(dir_a / name).empty());
  }
  // Header shape of the fields file.
  const std::string fields = slurp(dir_a / "fields_stressed_homogeneous_80.csv");
  CHECK(fields.rfind("x,u_hat,e_hat,u_target,e_target\n", 0) == 0);
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
}

TEST_CASE("convexity suite run is deterministic and clean") {
  RunConfig config;
  config.suite = "convexity";
  config.samples = 12;
  config.seed = 7;

  const auto dir_a = temp_dir("conv_a");
  const auto dir_b = temp_dir("conv_b");
  std::ostringstream log_a, log_b;
  config.out_dir = dir_a.string();
  REQUIRE(run(config, log_a) == 0);
  config.out_dir = dir_b.string();
  REQUIRE(run(config, log_b) == 0);

  CHECK(slurp(dir_a / "convexity_svk.csv") ==
        slurp(dir_b / "convexity_svk.csv"));
  CHECK(slurp(dir_a / "convexity_neo.csv") ==
        slurp(dir_b / "convexity_neo.csv"));
  CHECK(log_a.str() == log_b.str());
  CHECK(log_a.str().find("lower_violations=0") != std::string::npos);
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
}

TEST_CASE("dynamic run emits the comparison verdict") {
  RunConfig config;
  config.case_name = "grain_boundary_dynamic";
  config.nx = 64;
  config.nt = 12;
  config.compare_primal = true;
  const auto dir = temp_dir("dyn");
  config.out_dir = dir.string();
  std::ostringstream log;
  REQUIRE(run(config, log) == 0);
  CHECK(log.str().find("verdict: dual: stable, primal: blow-up") !=
        std::string::npos);
  CHECK(std::filesystem::exists(dir / "dual_series_grain_boundary_dynamic.csv"));
  CHECK(std::filesystem::exists(dir /
                                "primal_series_grain_boundary_dynamic.csv"));
  const std::string fields =
      slurp(dir / "fields_grain_boundary_dynamic_64x12.csv");
  CHECK(fields.rfind("x,u_hat,e_hat,u_target,e_target,t\n", 0) == 0);
  std::filesystem::remove_all(dir);
}
