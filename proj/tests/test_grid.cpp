// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gpe/dense.hpp"
#include "gpe/grid.hpp"
#include "gpe/oracle.hpp"

using namespace gpe;
using oracle::DenseMatrix;

namespace {

// Reference operator application: per-direction 1D Laplacian sweeps plus
// the potential diagonal, written independently of the block assembly.
std::vector<double> kronecker_apply(const DiscreteGpe& p, const std::vector<double>& V,
                                    const std::vector<double>& x) {
  const int nx = p.sizes[0];
  const int ny = p.dim >= 2 ? p.sizes[1] : 1;
  const int nz = p.dim >= 3 ? p.sizes[2] : 1;
  std::vector<double> y(p.n, 0.0);
  auto idx = [&](int ix, int iy, int iz) { return ix + nx * (iy + ny * iz); };
  for (int iz = 0; iz < nz; ++iz)
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix) {
        const int g = idx(ix, iy, iz);
        double acc = V[g] * x[g];
        const double cx = std::pow(nx + 1.0, 2);
        acc += cx * (2.0 * x[g] - (ix > 0 ? x[idx(ix - 1, iy, iz)] : 0.0) -
                     (ix + 1 < nx ? x[idx(ix + 1, iy, iz)] : 0.0));
        if (p.dim >= 2) {
          const double cy = std::pow(ny + 1.0, 2);
          acc += cy * (2.0 * x[g] - (iy > 0 ? x[idx(ix, iy - 1, iz)] : 0.0) -
                       (iy + 1 < ny ? x[idx(ix, iy + 1, iz)] : 0.0));
        }
        if (p.dim >= 3) {
          const double cz = std::pow(nz + 1.0, 2);
          acc += cz * (2.0 * x[g] - (iz > 0 ? x[idx(ix, iy, iz - 1)] : 0.0) -
                       (iz + 1 < nz ? x[idx(ix, iy, iz + 1)] : 0.0));
        }
        y[g] = acc;
      }
  return y;
}

std::vector<double> sampled_potential(const DiscreteGpe& p, const PotentialSpec& spec) {
  const int nx = p.sizes[0];
  const int ny = p.dim >= 2 ? p.sizes[1] : 1;
  const int nz = p.dim >= 3 ? p.sizes[2] : 1;
  std::vector<double> V;
  for (int iz = 0; iz < nz; ++iz)
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix) {
        std::vector<double> pt{(ix + 1.0) / (nx + 1.0)};
        if (p.dim >= 2) pt.push_back((iy + 1.0) / (ny + 1.0));
        if (p.dim >= 3) pt.push_back((iz + 1.0) / (nz + 1.0));
        V.push_back(eval_potential(spec, pt));
      }
  return V;
}

}  // namespace

TEST_SUITE_BEGIN("grid");

TEST_CASE("eval_potential values") {
  CHECK(eval_potential(PotentialSpec::harmonic(), std::vector<double>{0.25, 0.5}) ==
        doctest::Approx(0.3125).epsilon(1e-14));

  // both lattice terms vanish toward the origin corner
  CHECK(eval_potential(PotentialSpec::harmonic_lattice(), std::vector<double>{1e-9, 1e-9}) <=
        1e-12);

  // half-angle identity gives the lattice value at the center in closed form
  const double expected = 50.25 - 25.0 * std::sqrt(2.0);
  CHECK(eval_potential(PotentialSpec::harmonic_lattice(), std::vector<double>{0.5, 0.5}) ==
        doctest::Approx(expected).epsilon(1e-13));

  CHECK_THROWS_AS(eval_potential(PotentialSpec::custom_table({1.0}), std::vector<double>{0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(eval_potential(PotentialSpec::harmonic(), std::vector<double>{0.0, 0.5}),
                  std::invalid_argument);
}

TEST_CASE("1D assembly: N=3, zero potential is 16*tridiag(-1,2,-1)") {
  const int sizes[1] = {3};
  const DiscreteGpe p =
      build_problem(1, sizes, 0.0, PotentialSpec::custom_table(std::vector<double>(3, 0.0)));
  CHECK(p.B.block_count() == 3);
  CHECK(p.B.block_size() == 1);
  for (int i = 0; i < 3; ++i) CHECK(p.B.diag_data()[i] == 32.0);
  for (int i = 0; i < 2; ++i) CHECK(p.B.off_data()[i] == -16.0);
  CHECK(p.beta_scaled == 0.0);
}

TEST_CASE("2D assembly: N=2 harmonic matches the hand-assembled 4x4 operator") {
  const int sizes[2] = {2, 2};
  const DiscreteGpe p = build_problem(2, sizes, 1.0, PotentialSpec::harmonic());
  CHECK(p.n == 4);
  const double h = 1.0 / 3.0;
  auto V = [&](int i, int j) { return h * h * (i * i + j * j); };
  const double c = 36.0;  // 4/h^2
  const double o = -9.0;  // -1/h^2
  // x-fastest ordering: (1,1), (2,1), (1,2), (2,2) in 1-based grid indices
  const double expected[4][4] = {
      {c + V(1, 1), o, o, 0.0},
      {o, c + V(2, 1), 0.0, o},
      {o, 0.0, c + V(1, 2), o},
      {0.0, o, o, c + V(2, 2)},
  };
  const DenseMatrix D = DenseMatrix::from_blocktri(p.B);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(D.at(i, j) == doctest::Approx(expected[i][j]).epsilon(1e-14));
  CHECK(D.at(0, 0) == doctest::Approx(36.0 + 2.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("beta scaling: (N+1)^2 * beta in 2D") {
  const int sizes[2] = {15, 15};
  const DiscreteGpe p = build_problem(2, sizes, 50.0, PotentialSpec::harmonic());
  CHECK(p.beta_scaled == 12800.0);
  CHECK(p.beta_physical == 50.0);
}

TEST_CASE("Kronecker consistency across dimensions") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const std::vector<std::vector<int>> shapes{{5}, {4, 6}, {3, 4, 5}};
  for (const std::vector<int>& sizes : shapes) {
    const DiscreteGpe p = build_problem(static_cast<int>(sizes.size()), sizes, 1.0,
                                        PotentialSpec::harmonic());
    const std::vector<double> V = sampled_potential(p, PotentialSpec::harmonic());
    std::vector<double> x(p.n);
    for (double& v : x) v = uni(rng);
    const std::vector<double> y1 = p.B.matvec(x);
    const std::vector<double> y2 = kronecker_apply(p, V, x);
    double scale = dense::norm2(y2);
    for (int i = 0; i < p.n; ++i) CHECK(std::fabs(y1[i] - y2[i]) <= 1e-12 * std::max(1.0, scale));
  }
}

TEST_CASE("assembly is exactly symmetric") {
  const int sizes[3] = {3, 4, 2};
  const DiscreteGpe p = build_problem(3, sizes, 2.0, PotentialSpec::harmonic_lattice());
  const DenseMatrix D = DenseMatrix::from_blocktri(p.B);
  for (int i = 0; i < p.n; ++i)
    for (int j = 0; j < p.n; ++j) CHECK(D.at(i, j) == D.at(j, i));
}

TEST_CASE("zero-potential spectrum matches the Dirichlet Laplacian") {
  const std::vector<std::vector<int>> shapes{{8}, {4, 5}, {3, 4, 5}};
  for (const std::vector<int>& sizes : shapes) {
    const int dim = static_cast<int>(sizes.size());
    long long n = 1;
    for (int s : sizes) n *= s;
    const DiscreteGpe p = build_problem(dim, sizes, 0.0,
                                        PotentialSpec::custom_table(std::vector<double>(n, 0.0)));
    double expected = 0.0;
    for (int s : sizes) {
      const double h = 1.0 / (s + 1);
      expected += 2.0 / (h * h) * (1.0 - std::cos(std::numbers::pi * h));
    }
    const auto [mu, vec] = oracle::dense_smallest_eig(DenseMatrix::from_blocktri(p.B));
    CHECK(mu == doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("B is an M-matrix with positive block LU pivots") {
  const int sizes[2] = {6, 5};
  const DiscreteGpe p = build_problem(2, sizes, 3.0, PotentialSpec::harmonic());
  CHECK(p.B.m_matrix_flag());
  for (double piv : factor_block_lu(p.B).pivots()) CHECK(piv > 0.0);
}

TEST_CASE("build_problem rejects bad inputs") {
  const int one[1] = {1};
  CHECK_THROWS_AS(build_problem(1, one, 1.0, PotentialSpec::harmonic()), std::invalid_argument);
  const int ok[1] = {4};
  CHECK_THROWS_AS(build_problem(1, ok, -1.0, PotentialSpec::harmonic()), std::invalid_argument);
  CHECK_THROWS_AS(build_problem(1, ok, 1.0, PotentialSpec::custom_table({1.0, 2.0})),
                  std::invalid_argument);
  const int sizes2[2] = {3, 3};
  CHECK_THROWS_AS(build_problem(1, sizes2, 1.0, PotentialSpec::harmonic()), std::invalid_argument);
}

TEST_CASE("problem_from_matrix keeps the scaling invariant") {
  const DiscreteGpe p = problem_from_matrix(BlockTridiag(2, 1, {2.0, 2.0}, {-1.0}), 6.0);
  CHECK(p.beta_scaled == 6.0);
  CHECK(p.beta_physical * (p.n + 1) == doctest::Approx(6.0).epsilon(1e-15));
}

TEST_SUITE_END();
