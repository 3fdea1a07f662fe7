#include "tvd/grid.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace tvd {

double Mesh::domain_measure() const {
  double s = 0.0;
  for (double m : element_measures) s += m;
  return s;
}

Mesh build_mesh_1d(double extent, int n) {
  if (n < 2) throw std::invalid_argument("build_mesh: need at least 2 cells per axis");
  if (!(extent > 0.0)) throw std::invalid_argument("build_mesh: extent must be positive");
  Mesh m;
  m.dim = 1;
  const double h = extent / n;
  m.node_coords.resize(n + 1);
  for (int i = 0; i <= n; ++i) m.node_coords[i] = i * h;
  m.is_boundary.assign(n + 1, 0);
  m.is_boundary.front() = 1;
  m.is_boundary.back() = 1;
  m.boundary_nodes = {0, n};
  m.elements.reserve(n);
  m.element_measures.assign(n, h);
  m.basis_grads.reserve(n);
  for (int e = 0; e < n; ++e) {
    m.elements.push_back({e, e + 1, -1});
    std::array<double, 6> g{};
    g[0] = -1.0 / h;
    g[1] = 1.0 / h;
    m.basis_grads.push_back(g);
  }
  return m;
}

Mesh build_mesh_2d(double ex, double ey, int nx, int ny) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("build_mesh: need at least 2 cells per axis");
  if (!(ex > 0.0) || !(ey > 0.0)) throw std::invalid_argument("build_mesh: extent must be positive");
  Mesh m;
  m.dim = 2;
  const double hx = ex / nx, hy = ey / ny;
  const int nnx = nx + 1, nny = ny + 1;
  m.node_coords.resize(2 * nnx * nny);
  m.is_boundary.assign(nnx * nny, 0);
  for (int j = 0; j < nny; ++j) {
    for (int i = 0; i < nnx; ++i) {
      const int id = j * nnx + i;
      m.node_coords[2 * id] = i * hx;
      m.node_coords[2 * id + 1] = j * hy;
      if (i == 0 || i == nx || j == 0 || j == ny) {
        m.is_boundary[id] = 1;
        m.boundary_nodes.push_back(id);
      }
    }
  }
  auto add_tri = [&](int a, int b, int c) {
    // P1 basis gradients from the edge vectors; area by cross product.
    const double xa = m.node_coords[2 * a], ya = m.node_coords[2 * a + 1];
    const double xb = m.node_coords[2 * b], yb = m.node_coords[2 * b + 1];
    const double xc = m.node_coords[2 * c], yc = m.node_coords[2 * c + 1];
    const double det = (xb - xa) * (yc - ya) - (xc - xa) * (yb - ya);
    if (det <= 0.0) throw std::logic_error("build_mesh: degenerate or inverted triangle");
    m.elements.push_back({a, b, c});
    m.element_measures.push_back(0.5 * det);
    std::array<double, 6> g{};
    g[0] = (yb - yc) / det;  g[1] = (xc - xb) / det;
    g[2] = (yc - ya) / det;  g[3] = (xa - xc) / det;
    g[4] = (ya - yb) / det;  g[5] = (xb - xa) / det;
    m.basis_grads.push_back(g);
  };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int n00 = j * nnx + i, n10 = n00 + 1;
      const int n01 = n00 + nnx, n11 = n01 + 1;
      add_tri(n00, n10, n11);
      add_tri(n00, n11, n01);
    }
  }
  return m;
}

Mesh build_mesh(int dim, const std::vector<double>& extent, const std::vector<int>& n) {
  if (dim == 1) return build_mesh_1d(extent.at(0), n.at(0));
  if (dim == 2) return build_mesh_2d(extent.at(0), extent.size() > 1 ? extent[1] : extent[0],
                                     n.at(0), n.size() > 1 ? n[1] : n[0]);
  throw std::invalid_argument("build_mesh: dim must be 1 or 2");
}

std::vector<std::array<double, 2>> gradient(const ScalarField& f, const Mesh& mesh) {
  if (static_cast<int>(f.size()) != mesh.num_nodes())
    throw std::invalid_argument("gradient: field size does not match mesh");
  std::vector<std::array<double, 2>> g(mesh.num_elements(), {0.0, 0.0});
  const int npe = mesh.nodes_per_element();
  for (int e = 0; e < mesh.num_elements(); ++e) {
    for (int a = 0; a < npe; ++a) {
      const double v = f[mesh.elements[e][a]];
      for (int d = 0; d < mesh.dim; ++d) g[e][d] += v * mesh.basis_grads[e][a * mesh.dim + d];
    }
  }
  return g;
}

SymTensorField symmetric_gradient(const VectorField& u, const Mesh& mesh) {
  if (static_cast<int>(u.size()) != mesh.dim * mesh.num_nodes())
    throw std::invalid_argument("symmetric_gradient: field size does not match mesh");
  SymTensorField eps;
  eps.dim = mesh.dim;
  eps.values.assign(mesh.num_elements(), {0.0, 0.0, 0.0});
  const int npe = mesh.nodes_per_element();
  for (int e = 0; e < mesh.num_elements(); ++e) {
    double gxx = 0, gyy = 0, gxy = 0, gyx = 0;
    for (int a = 0; a < npe; ++a) {
      const int node = mesh.elements[e][a];
      const double ux = u[mesh.dim * node];
      gxx += ux * mesh.basis_grads[e][a * mesh.dim];
      if (mesh.dim == 2) {
        const double uy = u[2 * node + 1];
        gxy += ux * mesh.basis_grads[e][a * 2 + 1];
        gyx += uy * mesh.basis_grads[e][a * 2];
        gyy += uy * mesh.basis_grads[e][a * 2 + 1];
      }
    }
    eps.values[e][0] = gxx;
    if (mesh.dim == 2) {
      eps.values[e][1] = gyy;
      eps.values[e][2] = 0.5 * (gxy + gyx);
    }
  }
  return eps;
}

double integrate_elementwise(const std::vector<double>& per_element, const Mesh& mesh) {
  if (per_element.size() != mesh.element_measures.size())
    throw std::invalid_argument("integrate: size mismatch");
  double s = 0.0;
  for (std::size_t e = 0; e < per_element.size(); ++e) s += per_element[e] * mesh.element_measures[e];
  return s;
}

double integrate_nodal(const ScalarField& nodal, const Mesh& mesh) {
  const auto m = lumped_mass(mesh);
  if (nodal.size() != m.size()) throw std::invalid_argument("integrate: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) s += m[i] * nodal[i];
  return s;
}

std::vector<double> lumped_mass(const Mesh& mesh) {
  std::vector<double> m(mesh.num_nodes(), 0.0);
  const double frac = 1.0 / mesh.nodes_per_element();
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (int a = 0; a < mesh.nodes_per_element(); ++a)
      m[mesh.elements[e][a]] += frac * mesh.element_measures[e];
  return m;
}

ScalarField nodal_lift(const std::vector<double>& per_element, const Mesh& mesh) {
  if (per_element.size() != mesh.element_measures.size())
    throw std::invalid_argument("nodal_lift: size mismatch");
  ScalarField v(mesh.num_nodes(), 0.0);
  const auto m = lumped_mass(mesh);
  const double frac = 1.0 / mesh.nodes_per_element();
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (int a = 0; a < mesh.nodes_per_element(); ++a)
      v[mesh.elements[e][a]] += frac * mesh.element_measures[e] * per_element[e];
  for (int i = 0; i < mesh.num_nodes(); ++i) v[i] /= m[i];
  return v;
}

std::vector<double> element_average(const ScalarField& nodal, const Mesh& mesh) {
  std::vector<double> avg(mesh.num_elements(), 0.0);
  const double frac = 1.0 / mesh.nodes_per_element();
  for (int e = 0; e < mesh.num_elements(); ++e) {
    double s = 0.0;
    for (int a = 0; a < mesh.nodes_per_element(); ++a) s += nodal[mesh.elements[e][a]];
    avg[e] = frac * s;
  }
  return avg;
}

void dump_field(const std::string& path, const std::string& name, double time,
                const Mesh& mesh, const std::vector<const std::vector<double>*>& columns,
                const std::vector<int>& comps_per_column) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("dump_field: cannot open " + path);
  std::fprintf(f, "# field %s t %.17g\n", name.c_str(), time);
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    std::fprintf(f, "%d", i);
    for (int d = 0; d < mesh.dim; ++d) std::fprintf(f, " %.17g", mesh.coord(i, d));
    for (std::size_t c = 0; c < columns.size(); ++c)
      for (int k = 0; k < comps_per_column[c]; ++k)
        std::fprintf(f, " %.17g", (*columns[c])[i * comps_per_column[c] + k]);
    std::fputc('\n', f);
  }
  std::fclose(f);
}

}  // namespace tvd
