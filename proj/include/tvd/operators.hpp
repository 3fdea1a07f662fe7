#pragma once

#include "tvd/grid.hpp"
#include "tvd/material.hpp"

#include <vector>

namespace tvd {

/// Compressed-row sparse matrix, assembled symmetric.
struct SparseSpdMatrix {
  int n = 0;
  std::vector<int> row_ptr;
  std::vector<int> col_idx;
  std::vector<double> values;

  void apply(const std::vector<double>& x, std::vector<double>& y) const;
  std::vector<double> apply(const std::vector<double>& x) const;
  double quadratic_form(const std::vector<double>& x) const;  // x' A x
  double bilinear(const std::vector<double>& x, const std::vector<double>& y) const;
  std::vector<double> diagonal() const;
};

/// Triplet accumulator; duplicate entries are summed on compression.
class MatrixBuilder {
 public:
  explicit MatrixBuilder(int n) : n_(n) {}
  void add(int i, int j, double v) { entries_.push_back({i, j, v}); }
  SparseSpdMatrix compress() const;

 private:
  struct Entry { int i, j; double v; };
  int n_;
  std::vector<Entry> entries_;
};

/// chi-weighted elastic form  lambda1 int eta div u div v + 2 lambda2 int eta eps:eps,
/// Dirichlet boundary rows/columns eliminated (identity diagonal).
SparseSpdMatrix assemble_elastic(const ScalarField& eta, const Mesh& mesh,
                                 const MaterialModel& model);

/// Same with the viscosity constants ell1, ell2.
SparseSpdMatrix assemble_viscous(const ScalarField& eta, const Mesh& mesh,
                                 const MaterialModel& model);

/// int K(w^{k-1}) grad w . grad v, K given per node and evaluated per element
/// as the average of its nodal values. Pure Neumann: kernel = constants.
SparseSpdMatrix assemble_w_diffusion(const ScalarField& K_vals, const Mesh& mesh);

/// Vector-field H1_0 seminorm matrix (per-component stiffness with unit weight);
/// used for the empirical Korn diagnostics.
SparseSpdMatrix assemble_vector_h1(const Mesh& mesh);

/// Residual r_i = int d(grad chi) . grad phi_i; the exact gradient of the
/// discrete functional Phi(chi) = int phi(grad chi).
std::vector<double> p_laplacian_residual(const ScalarField& chi, const Mesh& mesh,
                                         const MaterialModel& model);

/// Discrete Phi(chi) = int phi(grad chi), exact for P1.
double phi_functional(const ScalarField& chi, const Mesh& mesh, const MaterialModel& model);

/// -rho int theta div(v), theta element-averaged.
double thermal_coupling_apply(const ScalarField& theta, const VectorField& v, const Mesh& mesh,
                              const MaterialModel& model);

/// Nodal vector t with t_I = -rho int theta div(phi_I); boundary rows zeroed.
VectorField thermal_coupling_vector(const ScalarField& theta, const Mesh& mesh,
                                    const MaterialModel& model);

/// ca*A + cb*B + diag(d), sparsity patterns merged (d may be null).
SparseSpdMatrix matrix_sum(const SparseSpdMatrix& A, double ca, const SparseSpdMatrix& B,
                           double cb, const std::vector<double>* diag = nullptr);

/// eps(u) : R_e eps(u) per element (the elastic energy density, times 2).
std::vector<double> elastic_energy_density(const SymTensorField& eps, const MaterialModel& model);

}  // namespace tvd
