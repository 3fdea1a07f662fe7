#include "tvd/linsolve.hpp"

#include <cmath>
#include <stdexcept>

namespace tvd {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// Subtract the weighted mean so the vector is orthogonal to the constant
// kernel in the lumped-mass inner product.
void remove_mean(std::vector<double>& v, const std::vector<double>& w) {
  double sw = 0.0, sv = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    sw += w[i];
    sv += w[i] * v[i];
  }
  const double mean = sv / sw;
  for (double& x : v) x -= mean;
}

// Subtract the plain mean. The range of a symmetric matrix with constant
// kernel is the Euclidean orthogonal complement of the constants, so rhs
// consistency and residual projection use the unweighted mean.
void remove_plain_mean(std::vector<double>& v) {
  double sv = 0.0;
  for (double x : v) sv += x;
  const double mean = sv / static_cast<double>(v.size());
  for (double& x : v) x -= mean;
}

}  // namespace

double residual_norm(const SparseSpdMatrix& A, const std::vector<double>& b,
                     const std::vector<double>& x) {
  auto r = A.apply(x);
  for (int i = 0; i < A.n; ++i) r[i] = b[i] - r[i];
  return norm2(r);
}

SolveStats cg_solve(const SparseSpdMatrix& A, const std::vector<double>& b,
                    std::vector<double>& x, const SolveOptions& opts) {
  const int n = A.n;
  if (static_cast<int>(b.size()) != n) throw std::invalid_argument("cg: rhs size mismatch");
  if (static_cast<int>(x.size()) != n) x.assign(n, 0.0);
  const int max_iter = opts.max_iter > 0 ? opts.max_iter : 10 * n;

  auto diag = A.diagonal();
  for (double d : diag)
    if (!(d > 0.0)) throw std::invalid_argument("cg: matrix diagonal must be positive");

  const bool singular = opts.kernel_weights != nullptr;
  std::vector<double> rhs = b;
  if (singular) {
    remove_plain_mean(rhs);
    double removed = 0.0;
    for (int i = 0; i < n; ++i) removed = std::max(removed, std::abs(b[i] - rhs[i]));
    if (removed > 1e-10 * std::max(1.0, norm2(b)))
      throw std::invalid_argument("cg: rhs has a component along the constant kernel");
    remove_mean(x, *opts.kernel_weights);
  }
  const double bnorm = norm2(rhs);
  const double stop = opts.tol * (bnorm > 0.0 ? bnorm : 1.0);

  std::vector<double> r = A.apply(x);
  for (int i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
  std::vector<double> z(n), p(n), Ap(n);
  for (int i = 0; i < n; ++i) z[i] = r[i] / diag[i];
  if (singular) remove_plain_mean(z);
  p = z;
  double rz = dot(r, z);

  SolveStats stats;
  stats.residual_norm = norm2(r);
  if (stats.residual_norm <= stop) {
    stats.converged = true;
    return stats;
  }
  for (int it = 0; it < max_iter; ++it) {
    A.apply(p, Ap);
    const double pAp = dot(p, Ap);
    if (!(pAp > 0.0)) throw std::runtime_error("cg: matrix is not positive definite");
    const double alpha = rz / pAp;
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    stats.iterations = it + 1;
    stats.residual_norm = norm2(r);
    if (stats.residual_norm <= stop) {
      stats.converged = true;
      break;
    }
    for (int i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    if (singular) remove_plain_mean(z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  if (singular) remove_mean(x, *opts.kernel_weights);
  return stats;
}

}  // namespace tvd
