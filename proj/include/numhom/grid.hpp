#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace numhom {

class CoefficientField;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(Point a, Point b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

/// Structured triangulation of [-1,1]^2 with n cells per axis.
///
/// Node (i, j) sits at (-1 + 2i/n, -1 + 2j/n) and has index j*(n+1) + i.
/// Square cell (i, j) is split along its (i,j)-(i+1,j+1) diagonal into
/// triangle 2c = (v00, v10, v11) and triangle 2c+1 = (v00, v11, v01), with
/// c = j*n + i. Interior nodes are numbered (i-1) + (j-1)*(n-1).
class FineMesh {
 public:
  explicit FineMesh(int cells_per_axis);

  int cells_per_axis() const noexcept { return n_; }
  double spacing() const noexcept { return 2.0 / n_; }
  double triangle_area() const noexcept { return 0.5 * spacing() * spacing(); }

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t triangle_count() const noexcept { return triangles_.size(); }
  std::size_t dof_count() const noexcept { return node_of_dof_.size(); }

  int node_index(int i, int j) const noexcept { return j * (n_ + 1) + i; }
  Point node(int index) const { return nodes_[static_cast<std::size_t>(index)]; }
  std::span<const Point> nodes() const noexcept { return nodes_; }

  const std::array<int, 3>& triangle(int t) const { return triangles_[static_cast<std::size_t>(t)]; }
  std::span<const std::array<int, 3>> triangles() const noexcept { return triangles_; }
  Point barycenter(int t) const;
  /// Twice the signed area; positive for every triangle of this mesh.
  double signed_area2(int t) const;

  /// Interior dof of a node, or -1 for nodes on the boundary of the square.
  int dof_of_node(int node) const { return dof_of_node_[static_cast<std::size_t>(node)]; }
  int node_of_dof(int dof) const { return node_of_dof_[static_cast<std::size_t>(dof)]; }
  bool on_boundary(int node) const { return dof_of_node(node) < 0; }

  /// Number of triangles sharing the node.
  int valence(int node) const { return valence_[static_cast<std::size_t>(node)]; }

  /// Triangles sharing an edge with t, -1 where the edge lies on the boundary.
  std::array<int, 3> face_neighbors(int t) const;
  /// Triangles sharing at least one vertex with t (excluding t).
  std::vector<int> vertex_neighbors(int t) const;

  /// Square cell index range [lo, hi) along one axis whose cells meet [a, b].
  std::array<int, 2> cell_range(double a, double b) const;

 private:
  int n_;
  std::vector<Point> nodes_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<int> dof_of_node_;
  std::vector<int> node_of_dof_;
  std::vector<int> valence_;
};

FineMesh build_fine_mesh(int n);

/// Plain-text dump: "node <index> <x> <y>" and "triangle <index> <a> <b> <c>" records.
void write_mesh_text(const FineMesh& mesh, std::ostream& out);

/// Interior nodes of the regular lattice of spacing h on [-1,1]^2.
class CoarseLattice {
 public:
  CoarseLattice(const FineMesh& mesh, double h);

  double spacing() const noexcept { return h_; }
  /// Lattice intervals per axis, 2/h.
  int intervals() const noexcept { return intervals_; }
  int per_axis() const noexcept { return intervals_ - 1; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(per_axis()) * static_cast<std::size_t>(per_axis()); }
  /// Fine cells per lattice interval.
  int fine_stride() const noexcept { return stride_; }
  int fine_cells_per_axis() const noexcept { return n_; }

  /// Lattice coordinates (p, q) in 1..intervals()-1 of node i.
  std::array<int, 2> coords(std::size_t i) const;
  Point node(std::size_t i) const;
  int fine_node(std::size_t i) const;

 private:
  double h_;
  int intervals_;
  int stride_;
  int n_;
};

CoarseLattice build_coarse_lattice(const FineMesh& mesh, double h);

/// A cell-resolved region of the fine mesh on which local problems are posed.
///
/// Local dofs are the interior mesh nodes whose incident triangles all belong
/// to the subdomain; every other node touched by a member triangle is pinned.
class Subdomain {
 public:
  Subdomain(const FineMesh& mesh, std::vector<int> cells);

  const FineMesh& mesh() const noexcept { return *mesh_; }
  std::span<const int> cells() const noexcept { return cells_; }
  bool contains_cell(int t) const;
  bool covers_mesh() const noexcept { return cells_.size() == mesh_->triangle_count(); }

  std::size_t dof_count() const noexcept { return local_to_parent_.size(); }
  /// Local index of a parent interior dof, -1 when the dof is not local.
  int local_of(int parent_dof) const;
  /// local_of for every parent dof.
  std::span<const int> local_map() const noexcept { return local_of_; }
  std::span<const int> local_to_parent() const noexcept { return local_to_parent_; }
  std::span<const int> boundary_nodes() const noexcept { return boundary_nodes_; }

  bool warning() const noexcept { return warning_; }
  void set_warning(bool flag) noexcept { warning_ = flag; }

 private:
  const FineMesh* mesh_;
  std::vector<int> cells_;
  std::vector<int> local_of_;
  std::vector<int> local_to_parent_;
  std::vector<int> boundary_nodes_;
  bool warning_ = false;
};

/// Triangles whose barycenter lies in the closed disk B(center, radius).
Subdomain extract_subdomain(const FineMesh& mesh, Point center, double radius);

/// Triangles whose barycenter lies in the closed square of half-width
/// half_width centered at center.
Subdomain extract_box_subdomain(const FineMesh& mesh, Point center, double half_width);

/// Union of a subdomain with extra cells.
Subdomain unite(const Subdomain& base, std::span<const int> extra_cells);

/// Grows `base` until every high-contrast component it touches is enclosed
/// together with a ring of width `buffer` of bounded-contrast cells.
///
/// Cells with a > contrast_threshold * median(a) are high contrast;
/// components are formed through shared vertices. The result is the smallest
/// set R containing base such that every high component C meeting R satisfies
/// C union dilate(C, buffer) subset of R. Sets the warning flag if the growth
/// swallowed the whole mesh.
Subdomain buffered_subdomain(const FineMesh& mesh, const CoefficientField& coeff, const Subdomain& base,
                             double buffer, double contrast_threshold);

/// Precomputed component labels and buffered hulls, for growing many
/// subdomains against the same field.
class BufferPlanner {
 public:
  BufferPlanner(const FineMesh& mesh, const CoefficientField& coeff, double buffer, double contrast_threshold);

  Subdomain apply(const Subdomain& base) const;
  std::size_t component_count() const noexcept { return hulls_.size(); }
  /// Component label per cell, -1 for bounded-contrast cells.
  std::span<const int> labels() const noexcept { return label_; }

 private:
  const FineMesh* mesh_;
  std::vector<int> label_;
  // Cells of each component dilated by the buffer width.
  std::vector<std::vector<int>> hulls_;
};

}  // namespace numhom
