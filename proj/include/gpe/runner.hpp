// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gpe/solvers.hpp"

namespace gpe::runner {

/// One solver invocation as configured from the command line or a
/// key=value config file.
struct RunConfig {
  int dim = 2;
  std::vector<int> sizes;  ///< one interior count per dimension
  double beta = 1.0;
  std::string potential = "harmonic";  ///< harmonic | harmonic_lattice | zero
  std::string solver = "nbi";  ///< nbi | nni | nni-inexact | projected-gradient
  double tol_outer = 1e-7;
  double tol_inner = 1e-10;
  int max_outer = 100;
  std::optional<std::pair<double, double>> interval;  ///< bisection bracket; empty = auto
  bool warm_start = true;
  double inexact_tol = 1e-6;
  int inexact_maxit = 200;
  std::string out_prefix = "gpe";
};

/// Builds the problem, runs the configured solver and writes
/// <prefix>_summary.csv and <prefix>_history.csv. Returns 0 on a converged
/// run, nonzero otherwise (a summary row is written either way).
int run_command(const RunConfig& config);

/// Reruns one of the recorded experiments (table1..table4, fig1..fig3) and
/// writes <prefix>_<name>.csv comparing recorded against computed values.
/// Returns nonzero if any required cell misses its tolerance. `large`
/// enables the n=127^2-sized cells.
int reproduce_command(const std::string& name, const std::string& out_prefix, bool large);

/// %.10g formatting used for every float the CSV writers emit.
std::string format_g10(double v);

}  // namespace gpe::runner
