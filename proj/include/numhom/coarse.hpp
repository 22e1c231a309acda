#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "numhom/fem.hpp"
#include "numhom/grid.hpp"

namespace numhom {

enum class CoarseKind { Quadratic, Linear };

const char* to_string(CoarseKind kind);
CoarseKind coarse_kind_from_string(const std::string& name);

/// Where phi_i lives: the lattice node, the sup-norm half-width of its
/// support box, and the fine cell box [i0,i1) x [j0,j1) covering it.
struct SupportRecord {
  Point center;
  double radius = 0.0;
  int i0 = 0, i1 = 0, j0 = 0, j1 = 0;

  /// Triangles of the cell box.
  std::vector<int> cells(const FineMesh& mesh) const;
};

/// The auxiliary space X_h, interpolated onto the fine mesh.
///
/// Quadratic: tensor-product Q2 Lagrange functions on elements of size 2h.
/// Lattice nodes with even index are element vertices, odd ones element
/// midpoints, so 1/h must be an integer. Linear: bilinear hats of width h.
struct CoarseBasis {
  const FineMesh* mesh = nullptr;
  CoarseLattice lattice;
  CoarseKind kind = CoarseKind::Quadratic;
  std::vector<SparseVector> functions;
  std::vector<SupportRecord> supports;
  /// Every support radius is at most support_factor * h.
  double support_factor = 2.0;

  std::size_t size() const noexcept { return functions.size(); }
  FEFunction function(std::size_t i) const;
};

/// One-dimensional profile of the basis attached to lattice index p, at x.
double coarse_profile(CoarseKind kind, int p, double h, double x);

CoarseBasis build_coarse_basis(const FineMesh& mesh, const CoarseLattice& lattice,
                               CoarseKind kind = CoarseKind::Quadratic);

/// Dense Gram matrix int grad(phi_i).grad(phi_j) on the fine mesh.
Eigen::MatrixXd coarse_gram(const CoarseBasis& basis);

/// Smallest eigenvalue of the Gram matrix.
double check_coarse_stability(const CoarseBasis& basis);

/// H1-seminorm distance from the fine interpolant of f to span(phi_i).
double interpolation_error_probe(const CoarseBasis& basis, const std::function<double(Point)>& f);

}  // namespace numhom
