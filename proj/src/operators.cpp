#include "tvd/operators.hpp"

#include <algorithm>
#include <stdexcept>

namespace tvd {

void SparseSpdMatrix::apply(const std::vector<double>& x, std::vector<double>& y) const {
  if (static_cast<int>(x.size()) != n) throw std::invalid_argument("spmv: size mismatch");
  y.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += values[k] * x[col_idx[k]];
    y[i] = s;
  }
}

std::vector<double> SparseSpdMatrix::apply(const std::vector<double>& x) const {
  std::vector<double> y;
  apply(x, y);
  return y;
}

double SparseSpdMatrix::quadratic_form(const std::vector<double>& x) const {
  return bilinear(x, x);
}

double SparseSpdMatrix::bilinear(const std::vector<double>& x, const std::vector<double>& y) const {
  if (static_cast<int>(x.size()) != n || static_cast<int>(y.size()) != n)
    throw std::invalid_argument("bilinear: size mismatch");
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += x[i] * values[k] * y[col_idx[k]];
  return s;
}

std::vector<double> SparseSpdMatrix::diagonal() const {
  std::vector<double> d(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      if (col_idx[k] == i) d[i] += values[k];
  return d;
}

SparseSpdMatrix MatrixBuilder::compress() const {
  std::vector<Entry> sorted = entries_;
  std::sort(sorted.begin(), sorted.end(), [](const Entry& a, const Entry& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  SparseSpdMatrix m;
  m.n = n_;
  m.row_ptr.assign(n_ + 1, 0);
  for (std::size_t k = 0; k < sorted.size();) {
    std::size_t k2 = k;
    double v = 0.0;
    while (k2 < sorted.size() && sorted[k2].i == sorted[k].i && sorted[k2].j == sorted[k].j)
      v += sorted[k2++].v;
    m.col_idx.push_back(sorted[k].j);
    m.values.push_back(v);
    ++m.row_ptr[sorted[k].i + 1];
    k = k2;
  }
  for (int i = 0; i < n_; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
  return m;
}

namespace {

// Shared vector-field assembly for the elastic/viscous forms:
//   l1 int eta div u div v + 2 l2 int eta eps(u):eps(v),
// with homogeneous Dirichlet elimination (boundary dofs get a unit diagonal).
SparseSpdMatrix assemble_lame(const ScalarField& eta, const Mesh& mesh,
                              double l1, double l2) {
  if (static_cast<int>(eta.size()) != mesh.num_nodes())
    throw std::invalid_argument("assemble: weight size does not match mesh");
  const int dim = mesh.dim;
  const int ndof = dim * mesh.num_nodes();
  MatrixBuilder bld(ndof);
  const auto eta_avg = element_average(eta, mesh);
  const int npe = mesh.nodes_per_element();
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double w = eta_avg[e];
    if (w < 0.0) throw std::invalid_argument("assemble: negative elliptic weight");
    const double meas = mesh.element_measures[e];
    for (int a = 0; a < npe; ++a) {
      const int na = mesh.elements[e][a];
      if (mesh.is_boundary[na]) continue;
      const double* ga = &mesh.basis_grads[e][a * dim];
      for (int b = 0; b < npe; ++b) {
        const int nb = mesh.elements[e][b];
        if (mesh.is_boundary[nb]) continue;
        const double* gb = &mesh.basis_grads[e][b * dim];
        double dot = ga[0] * gb[0];
        if (dim == 2) dot += ga[1] * gb[1];
        for (int i = 0; i < dim; ++i)
          for (int j = 0; j < dim; ++j) {
            // int eps(phi_a e_i):eps(phi_b e_j) = |T|/2 (delta_ij ga.gb + ga_j gb_i)
            double v = l1 * ga[i] * gb[j] + l2 * (i == j ? dot : 0.0) + l2 * ga[j] * gb[i];
            bld.add(dim * na + i, dim * nb + j, w * meas * v);
          }
      }
    }
  }
  for (int node = 0; node < mesh.num_nodes(); ++node)
    if (mesh.is_boundary[node])
      for (int i = 0; i < dim; ++i) bld.add(dim * node + i, dim * node + i, 1.0);
  return bld.compress();
}

}  // namespace

SparseSpdMatrix assemble_elastic(const ScalarField& eta, const Mesh& mesh,
                                 const MaterialModel& model) {
  return assemble_lame(eta, mesh, model.lambda1, model.lambda2);
}

SparseSpdMatrix assemble_viscous(const ScalarField& eta, const Mesh& mesh,
                                 const MaterialModel& model) {
  return assemble_lame(eta, mesh, model.ell1, model.ell2);
}

SparseSpdMatrix assemble_w_diffusion(const ScalarField& K_vals, const Mesh& mesh) {
  if (static_cast<int>(K_vals.size()) != mesh.num_nodes())
    throw std::invalid_argument("assemble: conductivity size does not match mesh");
  for (double k : K_vals)
    if (!(k > 0.0)) throw std::invalid_argument("assemble: conductivity must be positive");
  const auto K_avg = element_average(K_vals, mesh);
  MatrixBuilder bld(mesh.num_nodes());
  const int npe = mesh.nodes_per_element();
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double c = K_avg[e] * mesh.element_measures[e];
    for (int a = 0; a < npe; ++a) {
      const double* ga = &mesh.basis_grads[e][a * mesh.dim];
      for (int b = 0; b < npe; ++b) {
        const double* gb = &mesh.basis_grads[e][b * mesh.dim];
        double dot = ga[0] * gb[0];
        if (mesh.dim == 2) dot += ga[1] * gb[1];
        bld.add(mesh.elements[e][a], mesh.elements[e][b], c * dot);
      }
    }
  }
  return bld.compress();
}

SparseSpdMatrix assemble_vector_h1(const Mesh& mesh) {
  const int dim = mesh.dim;
  MatrixBuilder bld(dim * mesh.num_nodes());
  const int npe = mesh.nodes_per_element();
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double meas = mesh.element_measures[e];
    for (int a = 0; a < npe; ++a) {
      const int na = mesh.elements[e][a];
      if (mesh.is_boundary[na]) continue;
      const double* ga = &mesh.basis_grads[e][a * dim];
      for (int b = 0; b < npe; ++b) {
        const int nb = mesh.elements[e][b];
        if (mesh.is_boundary[nb]) continue;
        const double* gb = &mesh.basis_grads[e][b * dim];
        double dot = ga[0] * gb[0];
        if (dim == 2) dot += ga[1] * gb[1];
        for (int i = 0; i < dim; ++i) bld.add(dim * na + i, dim * nb + i, meas * dot);
      }
    }
  }
  for (int node = 0; node < mesh.num_nodes(); ++node)
    if (mesh.is_boundary[node])
      for (int i = 0; i < dim; ++i) bld.add(dim * node + i, dim * node + i, 1.0);
  return bld.compress();
}

std::vector<double> p_laplacian_residual(const ScalarField& chi, const Mesh& mesh,
                                         const MaterialModel& model) {
  const auto g = gradient(chi, mesh);
  std::vector<double> r(mesh.num_nodes(), 0.0);
  const int npe = mesh.nodes_per_element();
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto d = model.flux_d(g[e], mesh.dim);
    const double meas = mesh.element_measures[e];
    for (int a = 0; a < npe; ++a) {
      const double* ga = &mesh.basis_grads[e][a * mesh.dim];
      double dot = d[0] * ga[0];
      if (mesh.dim == 2) dot += d[1] * ga[1];
      r[mesh.elements[e][a]] += meas * dot;
    }
  }
  return r;
}

double phi_functional(const ScalarField& chi, const Mesh& mesh, const MaterialModel& model) {
  const auto g = gradient(chi, mesh);
  double s = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e)
    s += mesh.element_measures[e] * model.phi(g[e], mesh.dim);
  return s;
}

double thermal_coupling_apply(const ScalarField& theta, const VectorField& v, const Mesh& mesh,
                              const MaterialModel& model) {
  if (static_cast<int>(theta.size()) != mesh.num_nodes() ||
      static_cast<int>(v.size()) != mesh.dim * mesh.num_nodes())
    throw std::invalid_argument("thermal_coupling: field size mismatch");
  const auto th_avg = element_average(theta, mesh);
  const int npe = mesh.nodes_per_element();
  double s = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    double div_v = 0.0;
    for (int a = 0; a < npe; ++a) {
      const int na = mesh.elements[e][a];
      for (int i = 0; i < mesh.dim; ++i)
        div_v += v[mesh.dim * na + i] * mesh.basis_grads[e][a * mesh.dim + i];
    }
    s -= model.rho * th_avg[e] * mesh.element_measures[e] * div_v;
  }
  return s;
}

VectorField thermal_coupling_vector(const ScalarField& theta, const Mesh& mesh,
                                    const MaterialModel& model) {
  if (static_cast<int>(theta.size()) != mesh.num_nodes())
    throw std::invalid_argument("thermal_coupling: field size mismatch");
  const auto th_avg = element_average(theta, mesh);
  VectorField t(mesh.dim * mesh.num_nodes(), 0.0);
  const int npe = mesh.nodes_per_element();
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double c = -model.rho * th_avg[e] * mesh.element_measures[e];
    for (int a = 0; a < npe; ++a) {
      const int na = mesh.elements[e][a];
      if (mesh.is_boundary[na]) continue;
      for (int i = 0; i < mesh.dim; ++i)
        t[mesh.dim * na + i] += c * mesh.basis_grads[e][a * mesh.dim + i];
    }
  }
  return t;
}

SparseSpdMatrix matrix_sum(const SparseSpdMatrix& A, double ca, const SparseSpdMatrix& B,
                           double cb, const std::vector<double>* diag) {
  if (A.n != B.n) throw std::invalid_argument("matrix_sum: size mismatch");
  MatrixBuilder bld(A.n);
  for (int i = 0; i < A.n; ++i) {
    for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
      bld.add(i, A.col_idx[k], ca * A.values[k]);
    for (int k = B.row_ptr[i]; k < B.row_ptr[i + 1]; ++k)
      bld.add(i, B.col_idx[k], cb * B.values[k]);
    if (diag) bld.add(i, i, (*diag)[i]);
  }
  return bld.compress();
}

std::vector<double> elastic_energy_density(const SymTensorField& eps, const MaterialModel& model) {
  std::vector<double> d(eps.values.size(), 0.0);
  for (std::size_t e = 0; e < eps.values.size(); ++e) {
    const auto& v = eps.values[e];
    const double tr = eps.dim == 1 ? v[0] : v[0] + v[1];
    d[e] = model.lambda1 * tr * tr + 2.0 * model.lambda2 * SymTensorField::contract(v, v, eps.dim);
  }
  return d;
}

}  // namespace tvd
