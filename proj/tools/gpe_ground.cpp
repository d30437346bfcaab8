// SPDX-License-Identifier: Apache-2.0
//
// gpe-ground: computes the positive ground state of the discretized
// Gross-Pitaevskii eigenproblem and reproduces the recorded experiment
// tables. See README.md for usage.

#include <CLI11.hpp>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include "gpe/runner.hpp"

namespace {

// Plain key=value file, '#' comments; keys mirror the long flag names
// without the leading dashes. Command-line flags win on conflict.
std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw CLI::ValidationError("--config", "cannot open " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const std::size_t last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--config",
                                 "line " + std::to_string(lineno) + " is not key=value");
    auto trim = [](std::string s) {
      const std::size_t b = s.find_first_not_of(" \t");
      const std::size_t e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Positive ground states of the discretized Gross-Pitaevskii eigenproblem"};
  app.require_subcommand(1);

  gpe::runner::RunConfig cfg;
  int n_all = 0, nx = 0, ny = 0, nz = 0;
  double a = 0.0, b = 0.0;
  bool auto_interval = false;
  std::string warm = "on";
  std::string config_path;

  CLI::App* run = app.add_subcommand("run", "run one solver on one problem");
  run->add_option("--config", config_path, "key=value config file (command-line flags win)");
  run->add_option("--dim", cfg.dim, "problem dimension (1, 2 or 3)")->check(CLI::Range(1, 3));
  run->add_option("--n", n_all, "interior grid points per direction (all directions)");
  run->add_option("--nx", nx, "interior grid points in x");
  run->add_option("--ny", ny, "interior grid points in y");
  run->add_option("--nz", nz, "interior grid points in z");
  run->add_option("--beta", cfg.beta, "nonlinearity coefficient beta")->check(CLI::NonNegativeNumber);
  run->add_option("--potential", cfg.potential, "trapping potential")
      ->check(CLI::IsMember({"harmonic", "harmonic_lattice", "zero"}));
  run->add_option("--solver", cfg.solver, "solver")
      ->check(CLI::IsMember({"nbi", "nni", "nni-inexact", "projected-gradient"}));
  run->add_option("--a", a, "bisection interval left end");
  run->add_option("--b", b, "bisection interval right end");
  run->add_flag("--auto-interval", auto_interval, "discover the bisection interval");
  run->add_option("--tol-outer", cfg.tol_outer, "bisection stop on | ||u||-1 |");
  run->add_option("--tol-inner", cfg.tol_inner, "Newton convergence metric tolerance");
  run->add_option("--max-outer", cfg.max_outer, "outer iteration cap");
  run->add_option("--warm-start", warm, "reuse previous bisection iterate (on/off)")
      ->check(CLI::IsMember({"on", "off"}));
  run->add_option("--inexact-tol", cfg.inexact_tol, "BiCGSTAB relative tolerance");
  run->add_option("--inexact-maxit", cfg.inexact_maxit, "BiCGSTAB iteration cap");
  run->add_option("--out", cfg.out_prefix, "output file prefix");

  std::string target = "table1";
  std::string rep_prefix = "gpe";
  bool large = false;
  CLI::App* rep = app.add_subcommand("reproduce", "rerun a recorded experiment grid");
  rep->add_option("target", target, "table1..table4, fig1..fig3")
      ->required()
      ->check(CLI::IsMember({"table1", "table2", "table3", "table4", "fig1", "fig2", "fig3"}));
  rep->add_option("--out", rep_prefix, "output file prefix");
  rep->add_flag("--large", large, "include the n=127^2-sized cells");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      bool have_a = run->count("--a") > 0;
      bool have_b = run->count("--b") > 0;
      if (!config_path.empty()) {
        const std::map<std::string, std::string> file = read_config_file(config_path);
        const std::map<std::string, std::function<void(const std::string&)>> setters = {
            {"dim", [&](const std::string& v) { cfg.dim = std::stoi(v); }},
            {"n", [&](const std::string& v) { n_all = std::stoi(v); }},
            {"nx", [&](const std::string& v) { nx = std::stoi(v); }},
            {"ny", [&](const std::string& v) { ny = std::stoi(v); }},
            {"nz", [&](const std::string& v) { nz = std::stoi(v); }},
            {"beta", [&](const std::string& v) { cfg.beta = std::stod(v); }},
            {"potential", [&](const std::string& v) { cfg.potential = v; }},
            {"solver", [&](const std::string& v) { cfg.solver = v; }},
            {"a", [&](const std::string& v) { a = std::stod(v); have_a = true; }},
            {"b", [&](const std::string& v) { b = std::stod(v); have_b = true; }},
            {"auto-interval", [&](const std::string& v) { auto_interval = v != "0" && v != "off"; }},
            {"tol-outer", [&](const std::string& v) { cfg.tol_outer = std::stod(v); }},
            {"tol-inner", [&](const std::string& v) { cfg.tol_inner = std::stod(v); }},
            {"max-outer", [&](const std::string& v) { cfg.max_outer = std::stoi(v); }},
            {"warm-start", [&](const std::string& v) { warm = v; }},
            {"inexact-tol", [&](const std::string& v) { cfg.inexact_tol = std::stod(v); }},
            {"inexact-maxit", [&](const std::string& v) { cfg.inexact_maxit = std::stoi(v); }},
            {"out", [&](const std::string& v) { cfg.out_prefix = v; }},
        };
        for (const auto& [key, value] : file) {
          const auto it = setters.find(key);
          if (it == setters.end())
            throw CLI::ValidationError("--config", "unknown key '" + key + "'");
          const std::string flag = "--" + key;
          const bool flag_given = run->get_option_no_throw(flag) != nullptr &&
                                  run->count(flag) > 0;
          if (!flag_given) it->second(value);
        }
      }
      cfg.warm_start = (warm == "on");
      if (have_a != have_b) throw CLI::ValidationError("a and b must be given together");
      if (have_a) {
        if (!(a < b)) throw CLI::ValidationError("interval requires a < b");
        cfg.interval = {{a, b}};
      } else if (!auto_interval && cfg.solver == "nbi") {
        throw CLI::ValidationError("nbi needs --a/--b or --auto-interval");
      }
      cfg.sizes.clear();
      const int per_dim[3] = {nx, ny, nz};
      for (int d = 0; d < cfg.dim; ++d) {
        const int size = per_dim[d] > 0 ? per_dim[d] : n_all;
        if (size <= 0)
          throw CLI::ValidationError("grid size missing; pass --n or --nx/--ny/--nz");
        cfg.sizes.push_back(size);
      }
      return gpe::runner::run_command(cfg);
    }
    return gpe::runner::reproduce_command(target, rep_prefix, large);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
