#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace tvd {

/// Structured simplicial mesh: a uniform interval partition in 1D, or a
/// uniform right-triangle split of a rectangle in 2D (each cell cut along
/// the same diagonal). Nodes carry P1 hat functions; element gradients of
/// P1 fields are constant per element.
struct Mesh {
  int dim = 1;                                   // 1 or 2
  std::vector<double> node_coords;               // dim entries per node
  std::vector<std::array<int, 3>> elements;      // 2 nodes in 1D (3rd = -1)
  std::vector<char> is_boundary;                 // per node
  std::vector<int> boundary_nodes;
  std::vector<double> element_measures;
  // Per element, per local node: gradient of the nodal basis function.
  std::vector<std::array<double, 6>> basis_grads;  // dim entries per local node

  int num_nodes() const { return static_cast<int>(node_coords.size()) / dim; }
  int num_elements() const { return static_cast<int>(elements.size()); }
  int nodes_per_element() const { return dim + 1; }
  double domain_measure() const;
  double coord(int node, int axis) const { return node_coords[node * dim + axis]; }
};

Mesh build_mesh_1d(double extent, int n);
Mesh build_mesh_2d(double ex, double ey, int nx, int ny);
Mesh build_mesh(int dim, const std::vector<double>& extent, const std::vector<int>& n);

/// One real value per node.
using ScalarField = std::vector<double>;
/// dim reals per node, interleaved (x0, y0, x1, y1, ...).
using VectorField = std::vector<double>;

/// Per-element symmetric dim x dim matrix, stored as (xx) in 1D and
/// (xx, yy, xy) in 2D.
struct SymTensorField {
  int dim = 1;
  std::vector<std::array<double, 3>> values;  // one entry per element

  static double contract(const std::array<double, 3>& a,
                         const std::array<double, 3>& b, int dim) {
    if (dim == 1) return a[0] * b[0];
    return a[0] * b[0] + a[1] * b[1] + 2.0 * a[2] * b[2];
  }
};

/// Exact P1 gradient, one dim-vector per element.
std::vector<std::array<double, 2>> gradient(const ScalarField& f, const Mesh& mesh);

/// Symmetrized gradient of a P1 vector field, element-wise constant.
SymTensorField symmetric_gradient(const VectorField& u, const Mesh& mesh);

/// Integral of an element-wise constant quantity (exact).
double integrate_elementwise(const std::vector<double>& per_element, const Mesh& mesh);
/// Lumped (nodal) quadrature of a nodal quantity.
double integrate_nodal(const ScalarField& nodal, const Mesh& mesh);

/// Row-sum lumped P1 mass, one positive entry per node; sums to |Omega|.
std::vector<double> lumped_mass(const Mesh& mesh);

/// Lumped L2 projection of an element-wise constant field onto nodes; adjoint
/// of element averaging in the lumped-mass inner product.
ScalarField nodal_lift(const std::vector<double>& per_element, const Mesh& mesh);

/// Element-wise average of a nodal field.
std::vector<double> element_average(const ScalarField& nodal, const Mesh& mesh);

/// Plain-text snapshot: `node_index x [y] value...`, 17 significant digits,
/// with a one-line header naming the field and time.
void dump_field(const std::string& path, const std::string& name, double time,
                const Mesh& mesh, const std::vector<const std::vector<double>*>& columns,
                const std::vector<int>& comps_per_column);

}  // namespace tvd
