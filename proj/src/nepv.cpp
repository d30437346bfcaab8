// SPDX-License-Identifier: Apache-2.0
#include "gpe/nepv.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "gpe/dense.hpp"

namespace gpe {

namespace {
void check_dim(const DiscreteGpe& p, std::span<const double> u, const char* what) {
  if (static_cast<int>(u.size()) != p.n)
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}
}  // namespace

std::vector<double> apply_A(const DiscreteGpe& p, std::span<const double> u) {
  check_dim(p, u, "apply_A");
  std::vector<double> y = p.B.matvec(u);
  if (p.beta_scaled != 0.0)
    for (int i = 0; i < p.n; ++i) y[i] += p.beta_scaled * u[i] * u[i] * u[i];
  return y;
}

std::vector<double> residual(const DiscreteGpe& p, std::span<const double> u, double lambda) {
  std::vector<double> r = apply_A(p, u);
  for (int i = 0; i < p.n; ++i) r[i] -= lambda * u[i];
  return r;
}

BlockTridiag jacobian(const DiscreteGpe& p, std::span<const double> u, double lambda) {
  check_dim(p, u, "jacobian");
  std::vector<double> d(p.n);
  for (int i = 0; i < p.n; ++i) d[i] = 3.0 * p.beta_scaled * u[i] * u[i];
  return p.B.shift_diagonal(d, lambda);
}

double noda_lambda(const DiscreteGpe& p, std::span<const double> u) {
  check_dim(p, u, "noda_lambda");
  for (int i = 0; i < p.n; ++i)
    if (!(u[i] > 0.0))
      throw std::domain_error("noda_lambda: iterate has a nonpositive component");
  const std::vector<double> Au = apply_A(p, u);
  double lo = std::numeric_limits<double>::infinity();
  for (int i = 0; i < p.n; ++i) {
    const double ratio = Au[i] / u[i];
    if (ratio < lo) lo = ratio;
  }
  return lo;
}

double energy(const DiscreteGpe& p, std::span<const double> u) {
  check_dim(p, u, "energy");
  const std::vector<double> Bu = p.B.matvec(u);
  double quartic = 0.0;
  for (int i = 0; i < p.n; ++i) {
    const double s = u[i] * u[i];
    quartic += s * s;
  }
  return dense::dot(u, Bu) + 0.5 * p.beta_scaled * quartic;
}

double convergence_metric(const DiscreteGpe& p, std::span<const double> u_prev,
                          std::span<const double> u, double lambda) {
  check_dim(p, u_prev, "convergence_metric");
  check_dim(p, u, "convergence_metric");
  const double un = dense::norm2(u);
  if (un == 0.0) throw std::invalid_argument("convergence_metric: u is the zero vector");
  double step2 = 0.0;
  for (int i = 0; i < p.n; ++i) {
    const double d = u[i] - u_prev[i];
    step2 += d * d;
  }
  const std::vector<double> r = residual(p, u, lambda);
  return (std::sqrt(step2) + dense::norm2(r)) / un;
}

}  // namespace gpe
