// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "gpe/runner.hpp"

using namespace gpe;
namespace fs = std::filesystem;

namespace {

struct Csv {
  std::string header;
  std::vector<std::vector<std::string>> rows;
};

Csv read_csv(const fs::path& path) {
  std::ifstream f(path);
  REQUIRE_MESSAGE(bool(f), "missing file ", path.string());
  Csv out;
  std::string line;
  REQUIRE(std::getline(f, line));
  out.header = line;
  while (std::getline(f, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.ends_with(',')) cells.emplace_back();
    out.rows.push_back(std::move(cells));
  }
  return out;
}

fs::path work_dir() {
  const fs::path dir = fs::temp_directory_path() / "gpe_runner_tests";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE_BEGIN("runner");

TEST_CASE("format_g10 prints ten significant digits") {
  CHECK(runner::format_g10(100.40521234567) == "100.4052123");
  CHECK(runner::format_g10(0.1) == "0.1");
  CHECK(runner::format_g10(2.4320e-13) == "2.432e-13");
}

TEST_CASE("run_command writes the summary and history schema") {
  runner::RunConfig cfg;
  cfg.dim = 2;
  cfg.sizes = {15, 15};
  cfg.beta = 50.0;
  cfg.solver = "nbi";
  cfg.interval = {{80.9598, 161.9196}};
  cfg.out_prefix = (work_dir() / "t2").string();
  CHECK(runner::run_command(cfg) == 0);

  const Csv summary = read_csv(cfg.out_prefix + "_summary.csv");
  CHECK(summary.header == "solver,dim,n,beta,a,b,outer_iters,lambda,residual,wall_seconds,status");
  REQUIRE(summary.rows.size() == 1);
  const std::vector<std::string>& row = summary.rows[0];
  CHECK(row[0] == "nbi");
  CHECK(row[1] == "2");
  CHECK(row[2] == "225");
  CHECK(std::fabs(std::stod(row[7]) - 100.4052) <= 2e-4);
  CHECK(row[10] == "converged");

  const Csv history = read_csv(cfg.out_prefix + "_history.csv");
  CHECK(history.header == "k,lambda_k,residual_k,step_or_inner_count,norm_u");
  CHECK(static_cast<int>(history.rows.size()) == std::stoi(row[6]));
  CHECK(history.rows.front()[0] == "1");
}

TEST_CASE("run_command with nni at beta = 0 reports the linear eigenvalue") {
  runner::RunConfig cfg;
  cfg.dim = 1;
  cfg.sizes = {40};
  cfg.beta = 0.0;
  cfg.potential = "zero";
  cfg.solver = "nni";
  cfg.out_prefix = (work_dir() / "lin").string();
  CHECK(runner::run_command(cfg) == 0);
  const Csv summary = read_csv(cfg.out_prefix + "_summary.csv");
  const double lambda = std::stod(summary.rows[0][7]);
  const double h = 1.0 / 41.0;
  const double mu = 2.0 / (h * h) * (1.0 - std::cos(std::numbers::pi * h));
  CHECK(std::fabs(lambda - mu) <= 1e-8 * mu);
  // a and b stay empty for solvers without a bracket
  CHECK(summary.rows[0][4].empty());
  CHECK(summary.rows[0][5].empty());
}

TEST_CASE("run_command dispatches the projected-gradient checker") {
  runner::RunConfig cfg;
  cfg.dim = 1;
  cfg.sizes = {12};
  cfg.beta = 1.0;
  cfg.solver = "projected-gradient";
  cfg.tol_inner = 1e-8;
  cfg.out_prefix = (work_dir() / "pg").string();
  CHECK(runner::run_command(cfg) == 0);
  const Csv summary = read_csv(cfg.out_prefix + "_summary.csv");
  CHECK(summary.rows[0][0] == "projected-gradient");
  CHECK(summary.rows[0][10] == "converged");
}

TEST_CASE("run_command surfaces solver failures through the status column") {
  runner::RunConfig cfg;
  cfg.dim = 1;
  cfg.sizes = {8};
  cfg.solver = "nbi";
  cfg.beta = 0.0;  // bisection needs a positive coupling
  cfg.interval = {{1.0, 2.0}};
  cfg.out_prefix = (work_dir() / "bad").string();
  CHECK(runner::run_command(cfg) == 2);
  const Csv summary = read_csv(cfg.out_prefix + "_summary.csv");
  CHECK(summary.rows[0][10].starts_with("error:"));
}

TEST_CASE("reproduce fig1 passes its quadratic-tail check") {
  const std::string prefix = (work_dir() / "rep").string();
  CHECK(runner::reproduce_command("fig1", prefix, false) == 0);
  const Csv fig = read_csv(prefix + "_fig1.csv");
  CHECK(fig.header == "series,k,residual");
  CHECK(fig.rows.size() > 5);
}

TEST_CASE("reproduce table1 emits the comparison schema and passes required cells") {
  const std::string prefix = (work_dir() / "rep").string();
  CHECK(runner::reproduce_command("table1", prefix, false) == 0);
  const Csv rep = read_csv(prefix + "_table1.csv");
  CHECK(rep.header ==
        "table,cell,solver,n,beta,metric,reference_value,computed_value,abs_diff,tolerance,"
        "within_tol,required");
  int required_ok = 0;
  for (const std::vector<std::string>& row : rep.rows) {
    REQUIRE(row.size() == 12);
    if (row[11] == "yes") {
      CHECK(row[10] == "yes");
      ++required_ok;
    }
  }
  CHECK(required_ok >= 4);
}

TEST_SUITE_END();
