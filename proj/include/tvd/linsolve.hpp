#pragma once

#include "tvd/operators.hpp"

#include <vector>

namespace tvd {

struct SolveStats {
  int iterations = 0;
  double residual_norm = 0.0;  // final preconditioned-system 2-norm of b - A x
  bool converged = false;
};

struct SolveOptions {
  double tol = 1e-10;   // relative to ||b||, absolute if b = 0
  int max_iter = 0;     // 0: use 10 * n
  /// Singular consistent system (pure-Neumann stiffness): project b and the
  /// iterates onto the mean-zero complement of the constant kernel, using the
  /// supplied lumped-mass weights, and return the mean-zero solution.
  const std::vector<double>* kernel_weights = nullptr;
};

/// Jacobi-preconditioned conjugate gradients. Throws if a diagonal entry is
/// not positive; returns stats (converged=false after max_iter).
SolveStats cg_solve(const SparseSpdMatrix& A, const std::vector<double>& b,
                    std::vector<double>& x, const SolveOptions& opts = {});

/// ||b - A x||_2.
double residual_norm(const SparseSpdMatrix& A, const std::vector<double>& b,
                     const std::vector<double>& x);

}  // namespace tvd
