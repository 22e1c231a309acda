#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "numhom/coeff.hpp"
#include "numhom/grid.hpp"

namespace numhom {

/// Square sparse matrix in compressed-row layout with sorted column indices.
class SparseMatrix {
 public:
  struct Triplet {
    int row;
    int col;
    double value;
  };

  SparseMatrix() = default;
  SparseMatrix(std::size_t dim, std::vector<int> row_ptr, std::vector<int> col_idx, std::vector<double> values,
               bool symmetric);

  /// Duplicates are summed in input order.
  static SparseMatrix from_triplets(std::size_t dim, std::vector<Triplet> triplets, bool symmetric = false);
  static SparseMatrix identity(std::size_t dim);

  std::size_t dimension() const noexcept { return dim_; }
  std::size_t nonzeros() const noexcept { return values_.size(); }
  bool symmetric() const noexcept { return symmetric_; }

  std::span<const int> row_ptr() const noexcept { return row_ptr_; }
  std::span<const int> col_idx() const noexcept { return col_idx_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  /// Entry (i, j), zero outside the pattern.
  double value(int i, int j) const;
  std::vector<double> diagonal() const;

  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;
  double quadratic_form(std::span<const double> x) const;

  /// Principal submatrix on the indices with keep[i] >= 0, renumbered by keep.
  SparseMatrix restrict_to(std::span<const int> keep, std::size_t new_dim) const;

  /// alpha*this + beta*other; both must share the same pattern.
  SparseMatrix combine(double alpha, const SparseMatrix& other, double beta) const;
  bool same_pattern(const SparseMatrix& other) const;

  std::vector<double> to_dense() const;
  /// Matrix Market style coordinate text: header line, then "i j value" 1-based.
  void write_coordinate(std::ostream& out) const;

 private:
  std::size_t dim_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> values_;
  bool symmetric_ = false;
};

/// Sparse vector over the interior dofs of a fine mesh.
struct SparseVector {
  std::vector<int> index;
  std::vector<double> value;

  static SparseVector from_dense(std::span<const double> dense);
  std::vector<double> to_dense(std::size_t dim) const;
  void scatter(std::span<double> dense, double scale = 1.0) const;
  double dot(std::span<const double> dense) const;
  std::size_t size() const noexcept { return index.size(); }
};

/// A P1 function with zero trace, stored by its interior dof values.
struct FEFunction {
  const FineMesh* mesh = nullptr;
  std::vector<double> coeffs;

  FEFunction() = default;
  FEFunction(const FineMesh& m, std::vector<double> c);
  static FEFunction zeros(const FineMesh& m);

  /// Nodal value, zero on the boundary.
  double at_node(int node) const;
  std::vector<double> nodal_values() const;
};

/// Nodal interpolant of f at the interior nodes.
FEFunction interpolate(const FineMesh& mesh, const std::function<double(Point)>& f);

enum class SolverMethod { Cg, Direct };

const char* to_string(SolverMethod method);
SolverMethod solver_method_from_string(const std::string& name);

struct SolverConfig {
  SolverMethod method = SolverMethod::Cg;
  double tolerance = 1e-10;
  int max_iterations = 20000;

  void validate() const;
};

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;
};

// ---- assembly -------------------------------------------------------------

/// Stiffness of a[v,w] over interior dofs, plus screening*(v,w) when set.
SparseMatrix assemble_stiffness(const FineMesh& mesh, const CoefficientField& coeff,
                                std::optional<double> screening = std::nullopt);
/// Same bilinear form on the local dofs of a subdomain, from member cells only.
SparseMatrix assemble_stiffness(const Subdomain& sub, const CoefficientField& coeff,
                                std::optional<double> screening = std::nullopt);
/// Unit-coefficient stiffness.
SparseMatrix assemble_laplacian(const FineMesh& mesh);

/// Weighted P1 mass matrix over interior dofs, or over all nodes when
/// include_boundary is set.
SparseMatrix assemble_mass(const FineMesh& mesh, std::span<const double> density, bool include_boundary = false);
SparseMatrix assemble_mass(const FineMesh& mesh, double density = 1.0, bool include_boundary = false);

/// One-point (barycenter) load vector over interior dofs.
std::vector<double> assemble_load(const FineMesh& mesh, const std::function<double(Point)>& g);
std::vector<double> assemble_load(const FineMesh& mesh, std::span<const double> cell_values);

/// Entries -int grad(phi).grad(v_j) over the local dofs of sub.
std::vector<double> weak_laplacian_rhs(const Subdomain& sub, const FEFunction& phi);
std::vector<double> weak_laplacian_rhs(const FineMesh& mesh, const FEFunction& phi);

// ---- solvers --------------------------------------------------------------

/// Factorization of a sparse SPD matrix, reusable for many right-hand sides.
class DirectSolver {
 public:
  explicit DirectSolver(const SparseMatrix& a);
  ~DirectSolver();
  DirectSolver(DirectSolver&&) noexcept;
  DirectSolver& operator=(DirectSolver&&) noexcept;

  std::size_t dimension() const noexcept { return dim_; }
  /// Solves and applies one step of iterative refinement if the residual
  /// misses the tolerance; throws SolverError if it still does.
  std::vector<double> solve(std::span<const double> b, double tolerance = 1e-10, SolveStats* stats = nullptr) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  SparseMatrix matrix_;
  std::size_t dim_;
};

/// Jacobi-preconditioned conjugate gradients.
std::vector<double> solve_pcg(const SparseMatrix& a, std::span<const double> b, double tolerance, int max_iterations,
                              SolveStats* stats = nullptr, std::span<const double> x0 = {});

std::vector<double> solve_spd(const SparseMatrix& a, std::span<const double> b, const SolverConfig& cfg,
                              SolveStats* stats = nullptr);

double relative_residual(const SparseMatrix& a, std::span<const double> x, std::span<const double> b);

// ---- norms ----------------------------------------------------------------

struct NormReport {
  double l2 = 0.0;
  double h1 = 0.0;  // seminorm
  double linf = 0.0;
  // Filled when a reference is given: norms of (u - ref) divided by the norms of ref.
  std::optional<double> rel_l2;
  std::optional<double> rel_h1;
  std::optional<double> rel_linf;
};

double l2_norm(const FineMesh& mesh, std::span<const double> u);
double h1_seminorm(const FineMesh& mesh, std::span<const double> u);
double linf_norm(std::span<const double> u);
/// H1 seminorm restricted to a set of cells.
double h1_seminorm_on(const FineMesh& mesh, std::span<const double> u, std::span<const int> cells);

NormReport norms(const FEFunction& u, const FEFunction* reference = nullptr);

/// Norm of the potential part of a grad(u): sqrt(chi^T L chi) with L chi = K_a u.
double flux_norm(const FEFunction& u, const CoefficientField& coeff, const SolverConfig& cfg);

/// Flux norm evaluator that keeps the Laplacian factorization and K_a.
class FluxNorm {
 public:
  FluxNorm(const FineMesh& mesh, const CoefficientField& coeff);
  double operator()(std::span<const double> u) const;
  /// sqrt(b^T L^{-1} b) for a load vector b, the norm of grad of the inverse Laplacian of b.
  double inverse_laplacian_norm(std::span<const double> b) const;
  const SparseMatrix& stiffness() const noexcept { return stiffness_; }

 private:
  SparseMatrix laplacian_;
  SparseMatrix stiffness_;
  DirectSolver solver_;
};

}  // namespace numhom
