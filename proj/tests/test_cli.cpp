#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ks1d/commands.hpp"
#include "ks1d/report_io.hpp"
#include "ks1d/run.hpp"

using namespace ks1d;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path temp_dir(const char* tag) {
  const fs::path dir = fs::temp_directory_path() / (std::string("ks1d_test_") + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const char* name, const std::string& text) {
  const fs::path p = dir / name;
  std::ofstream out(p);
  out << text;
  return p;
}

const char* kQuickRun = R"({
  "variant": "parabolic_parabolic",
  "nonlinearity": {"kind": "power", "p": 1.0},
  "initial_u": {"profile": "cosine", "mass": 2.0, "amplitude": 0.5},
  "cells": 32, "dt_initial": 1e-4, "dt_min": 1e-12, "dt_max": 1e-2,
  "t_end": 0.2, "t0_monitor": 0.05
})";

}  // namespace

TEST_CASE("cmd_run writes outputs and exits 0 on completion") {
  const auto dir = temp_dir("run");
  const auto cfg = write_config(dir, "cfg.json", kQuickRun);
  const int rc = cmd_run(cfg.string(), (dir / "out").string(), /*dense=*/true);
  CHECK(rc == 0);
  CHECK(fs::exists(dir / "out" / "samples.csv"));
  CHECK(fs::exists(dir / "out" / "report.txt"));
  CHECK(fs::exists(dir / "out" / "residuals.csv"));
  CHECK(fs::exists(dir / "out" / "plot.py"));
  const std::string samples = slurp(dir / "out" / "samples.csv");
  CHECK(samples.rfind(kSampleCsvHeader, 0) == 0);
  const std::string report = slurp(dir / "out" / "report.txt");
  CHECK(report.find("mass conservation") != std::string::npos);
}

TEST_CASE("cmd_run byte-reproduces samples.csv") {
  const auto dir = temp_dir("repro");
  const auto cfg = write_config(dir, "cfg.json", kQuickRun);
  REQUIRE(cmd_run(cfg.string(), (dir / "a").string(), false) == 0);
  REQUIRE(cmd_run(cfg.string(), (dir / "b").string(), false) == 0);
  CHECK(slurp(dir / "a" / "samples.csv") == slurp(dir / "b" / "samples.csv"));
}

TEST_CASE("cmd_run exit codes partition config failures") {
  const auto dir = temp_dir("badcfg");
  CHECK(cmd_run((dir / "missing.json").string(), (dir / "out").string(), false) == 1);
  const auto bad = write_config(dir, "bad.json", "{ not json");
  CHECK(cmd_run(bad.string(), (dir / "out").string(), false) == 1);
  const auto unknown = write_config(dir, "unknown.json", R"({"variant": "x"})");
  CHECK(cmd_run(unknown.string(), (dir / "out").string(), false) == 1);
  // a sweep config must be pointed at the sweep command instead
  std::string sweep_cfg(kQuickRun);
  sweep_cfg.insert(sweep_cfg.rfind('}'), R"(, "sweep": {"p": [1.0], "mass": [2.0]})");
  const auto sw = write_config(dir, "sweep.json", sweep_cfg);
  CHECK(cmd_run(sw.string(), (dir / "out").string(), false) == 1);
}

TEST_CASE("cmd_run reports blow-up with exit code 2") {
  const auto dir = temp_dir("blowup");
  const auto cfg = write_config(dir, "cfg.json", R"({
    "variant": "parabolic_parabolic",
    "nonlinearity": {"kind": "power", "p": 2.0},
    "initial_u": {"profile": "cosine", "mass": 20.0, "amplitude": 1.0},
    "cells": 64, "dt_initial": 1e-5, "dt_min": 1e-13, "dt_max": 1e-2,
    "t_end": 10.0, "t0_monitor": 0.5, "blowup_threshold": 400.0
  })");
  CHECK(cmd_run(cfg.string(), (dir / "out").string(), false) == 2);
  const std::string report = slurp(dir / "out" / "report.txt");
  CHECK(report.find("blowup_suspected") != std::string::npos);
}

TEST_CASE("cmd_sweep writes phase.csv in grid order") {
  const auto dir = temp_dir("sweep");
  const auto cfg = write_config(dir, "cfg.json", R"({
    "variant": "parabolic_parabolic",
    "nonlinearity": {"kind": "power", "p": 1.0},
    "initial_u": {"profile": "cosine", "mass": 1.0, "amplitude": 0.5},
    "cells": 32, "dt_initial": 1e-4, "dt_min": 1e-12, "dt_max": 1e-2,
    "t_end": 0.1, "t0_monitor": 0.05,
    "sweep": {"p": [1.0, 2.0], "mass": [1.0, 3.0]}
  })");
  const int rc = cmd_sweep(cfg.string(), (dir / "out").string(), 2);
  CHECK(rc == 0);
  const std::string phase = slurp(dir / "out" / "phase.csv");
  CHECK(phase.rfind("p,M,status,sup_u_final,t_stop", 0) == 0);
  // grid order: (1,1), (1,3), (2,1), (2,3)
  std::istringstream is(phase);
  std::string line;
  std::getline(is, line);
  std::getline(is, line);
  CHECK(line.rfind("1,1,", 0) == 0);
  std::getline(is, line);
  CHECK(line.rfind("1,3,", 0) == 0);
  std::getline(is, line);
  CHECK(line.rfind("2,1,", 0) == 0);
  // degenerate 1x1 sweep behaves like a plain run
  const auto cfg1 = write_config(dir, "cfg1.json", R"({
    "variant": "parabolic_parabolic",
    "nonlinearity": {"kind": "power", "p": 1.0},
    "initial_u": {"profile": "cosine", "mass": 1.0, "amplitude": 0.5},
    "cells": 32, "dt_initial": 1e-4, "dt_min": 1e-12, "dt_max": 1e-2,
    "t_end": 0.1, "t0_monitor": 0.05,
    "sweep": {"p": [1.0], "mass": [1.0]}
  })");
  CHECK(cmd_sweep(cfg1.string(), (dir / "out1").string(), 1) == 0);
  const std::string phase1 = slurp(dir / "out1" / "phase.csv");
  CHECK(phase1.find("completed") != std::string::npos);
}

TEST_CASE("cmd_verify rejects unknown suites") {
  CHECK(cmd_verify("nonsense") == 1);
}

TEST_CASE("csv number formatting is locale-independent and stable") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1e-13) == "1e-13");
  CHECK(format_double(0.1 + 0.2) == "0.30000000000000004");
  CHECK(format_double(-3.25) == "-3.25");
}
