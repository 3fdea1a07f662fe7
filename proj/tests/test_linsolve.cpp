#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tvd/linsolve.hpp"

#include <cmath>
#include <random>

using namespace tvd;

namespace {

SparseSpdMatrix dense_to_sparse(const std::vector<std::vector<double>>& D) {
  const int n = static_cast<int>(D.size());
  MatrixBuilder b(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (D[i][j] != 0.0) b.add(i, j, D[i][j]);
  return b.compress();
}

// Plain Cholesky solve as an independent oracle.
std::vector<double> cholesky_solve(std::vector<std::vector<double>> A, std::vector<double> b) {
  const int n = static_cast<int>(A.size());
  for (int k = 0; k < n; ++k) {
    A[k][k] = std::sqrt(A[k][k]);
    for (int i = k + 1; i < n; ++i) A[i][k] /= A[k][k];
    for (int j = k + 1; j < n; ++j)
      for (int i = j; i < n; ++i) A[i][j] -= A[i][k] * A[j][k];
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) b[i] -= A[i][j] * b[j];
    b[i] /= A[i][i];
  }
  for (int i = n - 1; i >= 0; --i) {
    for (int j = i + 1; j < n; ++j) b[i] -= A[j][i] * b[j];
    b[i] /= A[i][i];
  }
  return b;
}

}  // namespace

TEST_CASE("identity solves in one iteration") {
  SparseSpdMatrix I = dense_to_sparse({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  std::vector<double> b{3.0, -1.0, 0.5}, x;
  SolveStats st = cg_solve(I, b, x);
  CHECK(st.converged);
  CHECK(st.iterations <= 1);
  for (int i = 0; i < 3; ++i) CHECK(x[i] == doctest::Approx(b[i]).epsilon(1e-14));
}

TEST_CASE("hand-solved 2x2 system") {
  SparseSpdMatrix A = dense_to_sparse({{2, 1}, {1, 2}});
  std::vector<double> b{1.0, 1.0}, x;
  SolveStats st = cg_solve(A, b, x);
  CHECK(st.converged);
  CHECK(x[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(x[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("singular Neumann system: consistent rhs, zero-mean solution") {
  Mesh m = build_mesh_1d(1.0, 16);
  ScalarField K(m.num_nodes(), 1.0);
  SparseSpdMatrix A = assemble_w_diffusion(K, m);
  const auto mass = lumped_mass(m);

  // consistent rhs: image of a zero-mean field
  std::vector<double> y(m.num_nodes());
  for (int i = 0; i < m.num_nodes(); ++i) y[i] = std::sin(6.28 * m.coord(i, 0));
  const auto b = A.apply(y);

  std::vector<double> x;
  SolveOptions opts;
  opts.kernel_weights = &mass;
  SolveStats st = cg_solve(A, b, x, opts);
  CHECK(st.converged);
  CHECK(residual_norm(A, b, x) < 1e-8);
  double mean = 0.0, total = 0.0;
  for (int i = 0; i < m.num_nodes(); ++i) {
    mean += mass[i] * x[i];
    total += mass[i];
  }
  CHECK(std::abs(mean / total) < 1e-12);

  // inconsistent rhs (component along the constant kernel) is rejected
  std::vector<double> ones(m.num_nodes(), 1.0);
  CHECK_THROWS(cg_solve(A, ones, x, opts));
}

TEST_CASE("matches dense Cholesky on random SPD systems") {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 5 + static_cast<int>((trial * 45) / 20);
    std::vector<std::vector<double>> B(n, std::vector<double>(n));
    for (auto& row : B)
      for (double& v : row) v = U(rng);
    // A = B B^T + n I is SPD
    std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) A[i][j] += B[i][k] * B[j][k];
        if (i == j) A[i][j] += n;
      }
    std::vector<double> b(n);
    for (double& v : b) v = U(rng);

    std::vector<double> x;
    SolveOptions opts;
    opts.tol = 1e-12;
    SolveStats st = cg_solve(dense_to_sparse(A), b, x, opts);
    CHECK(st.converged);
    const auto ref = cholesky_solve(A, b);
    for (int i = 0; i < n; ++i) CHECK(std::abs(x[i] - ref[i]) < 1e-8);
  }
}

TEST_CASE("diagnosable failures") {
  SparseSpdMatrix bad = dense_to_sparse({{1, 0}, {0, -1}});
  std::vector<double> b{1.0, 1.0}, x;
  CHECK_THROWS(cg_solve(bad, b, x));

  // indefinite matrix with positive diagonal is caught during iteration;
  // the rhs has a component along the negative eigenvector (1, -1)
  SparseSpdMatrix indef = dense_to_sparse({{1, 3}, {3, 1}});
  std::vector<double> b2{1.0, -1.0}, x2;
  CHECK_THROWS(cg_solve(indef, b2, x2));
}
