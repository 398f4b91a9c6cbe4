#pragma once
// Isosurface extraction of polynomial zero sets in 2 or 3 variables, with
// Euler characteristic and connected components. Extraction in 3-D marches
// the six Kuhn tetrahedra of each grid cell, which keeps the output
// crack-free and manifold so the topology numbers can be trusted; in 2-D the
// ambiguous saddle cells are resolved with the asymptotic decider on the
// bilinear interpolant.

#include <Eigen/Core>

#include <array>
#include <string>
#include <vector>

#include "sgmap/box.hpp"
#include "sgmap/poly.hpp"

namespace sgmap {

struct Mesh {
  int dim = 3;  // ambient dimension, 2 or 3
  std::vector<Eigen::Vector3d> vertices;  // z component unused when dim == 2
  std::vector<std::array<int, 2>> segments;   // cells when dim == 2
  std::vector<std::array<int, 3>> triangles;  // cells when dim == 3
  double weld_tol = 0.0;

  size_t cell_count() const { return dim == 2 ? segments.size() : triangles.size(); }
  bool empty() const { return cell_count() == 0; }
};

/// Extracts the zero set of p over the box on a res-per-axis grid.
/// Grid values that are exactly zero are perturbed by +1e-12 * max|p| before
/// sign lookup. Throws Error if the zero set crosses the box faces.
Mesh extract_isosurface(const MultiPoly& p, const Box& bbox, int res);

/// V - E + F with E counted from unique undirected cell edges. Throws Error
/// on a non-manifold edge (three or more incident triangles).
int euler_char(const Mesh& m);

/// Unique undirected cell edges.
int unique_edge_count(const Mesh& m);

/// Connected components of the cell adjacency graph. Empty mesh: 0.
int component_count(const Mesh& m);

/// Euler characteristic per connected component, sorted ascending.
std::vector<int> component_euler_chars(const Mesh& m);

/// Standard OBJ text (v/f records, 1-based indices), deterministic order.
/// 3-D meshes only; an empty mesh is an error.
void export_obj(const Mesh& m, const std::string& path);

}  // namespace sgmap
