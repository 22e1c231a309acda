#include "numhom/coarse.hpp"

#include <algorithm>
#include <cmath>

#include "numhom/error.hpp"

namespace numhom {

const char* to_string(CoarseKind kind) { return kind == CoarseKind::Quadratic ? "quadratic" : "linear"; }

CoarseKind coarse_kind_from_string(const std::string& name) {
  if (name == "quadratic") return CoarseKind::Quadratic;
  if (name == "linear") return CoarseKind::Linear;
  throw InvalidArgument("unknown coarse basis kind '" + name + "'");
}

std::vector<int> SupportRecord::cells(const FineMesh& mesh) const {
  const int n = mesh.cells_per_axis();
  std::vector<int> out;
  out.reserve(2 * static_cast<std::size_t>(std::max(0, i1 - i0)) * static_cast<std::size_t>(std::max(0, j1 - j0)));
  for (int j = j0; j < j1; ++j) {
    for (int i = i0; i < i1; ++i) {
      out.push_back(2 * (j * n + i));
      out.push_back(2 * (j * n + i) + 1);
    }
  }
  return out;
}

FEFunction CoarseBasis::function(std::size_t i) const {
  return FEFunction(*mesh, functions.at(i).to_dense(mesh->dof_count()));
}

double coarse_profile(CoarseKind kind, int p, double h, double x) {
  const double xp = -1.0 + p * h;
  if (kind == CoarseKind::Linear) return std::max(0.0, 1.0 - std::abs(x - xp) / h);
  if (p % 2 == 0) {
    const double t = std::abs(x - xp) / (2.0 * h);
    return t < 1.0 ? (1.0 - t) * (1.0 - 2.0 * t) : 0.0;
  }
  const double s = (x - xp) / h;
  return std::abs(s) < 1.0 ? 1.0 - s * s : 0.0;
}

CoarseBasis build_coarse_basis(const FineMesh& mesh, const CoarseLattice& lattice, CoarseKind kind) {
  if (lattice.fine_cells_per_axis() != mesh.cells_per_axis()) {
    throw InvalidArgument("coarse lattice was built for a different fine mesh");
  }
  if (kind == CoarseKind::Quadratic && lattice.intervals() % 2 != 0) {
    throw InvalidArgument("quadratic coarse elements need 1/h to be an integer");
  }
  const double h = lattice.spacing();
  const int n = mesh.cells_per_axis();
  const int stride = lattice.fine_stride();
  CoarseBasis basis{&mesh, lattice, kind, {}, {}, kind == CoarseKind::Quadratic ? 2.0 : 1.0};
  basis.functions.reserve(lattice.size());
  basis.supports.reserve(lattice.size());
  for (std::size_t k = 0; k < lattice.size(); ++k) {
    const auto [p, q] = lattice.coords(k);
    auto half_width = [&](int idx) { return (kind == CoarseKind::Quadratic && idx % 2 == 0) ? 2 : 1; };
    const int wx = half_width(p);
    const int wy = half_width(q);
    SupportRecord rec;
    rec.center = lattice.node(k);
    rec.radius = std::max(wx, wy) * h;
    rec.i0 = std::max(0, (p - wx) * stride);
    rec.i1 = std::min(n, (p + wx) * stride);
    rec.j0 = std::max(0, (q - wy) * stride);
    rec.j1 = std::min(n, (q + wy) * stride);

    SparseVector phi;
    for (int j = std::max(1, rec.j0); j <= std::min(n - 1, rec.j1); ++j) {
      for (int i = std::max(1, rec.i0); i <= std::min(n - 1, rec.i1); ++i) {
        const Point x = mesh.node(mesh.node_index(i, j));
        const double v = coarse_profile(kind, p, h, x.x) * coarse_profile(kind, q, h, x.y);
        if (v != 0.0) {
          phi.index.push_back(mesh.dof_of_node(mesh.node_index(i, j)));
          phi.value.push_back(v);
        }
      }
    }
    basis.functions.push_back(std::move(phi));
    basis.supports.push_back(rec);
  }
  return basis;
}

Eigen::MatrixXd coarse_gram(const CoarseBasis& basis) {
  const FineMesh& mesh = *basis.mesh;
  const SparseMatrix lap = assemble_laplacian(mesh);
  const std::size_t nb = basis.size();
  Eigen::MatrixXd g(static_cast<Eigen::Index>(nb), static_cast<Eigen::Index>(nb));
  std::vector<double> dense(mesh.dof_count(), 0.0);
  for (std::size_t j = 0; j < nb; ++j) {
    basis.functions[j].scatter(dense);
    const std::vector<double> y = lap.multiply(dense);
    basis.functions[j].scatter(dense, -1.0);
    const auto& sj = basis.supports[j];
    for (std::size_t i = 0; i < nb; ++i) {
      const auto& si = basis.supports[i];
      const bool overlap = si.i0 <= sj.i1 && sj.i0 <= si.i1 && si.j0 <= sj.j1 && sj.j0 <= si.j1;
      g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = overlap ? basis.functions[i].dot(y) : 0.0;
    }
  }
  return 0.5 * (g + g.transpose());
}

double check_coarse_stability(const CoarseBasis& basis) {
  const Eigen::MatrixXd g = coarse_gram(basis);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw SolverError("eigenvalue solve of the coarse Gram matrix failed", 0.0, 0);
  return eig.eigenvalues().minCoeff();
}

double interpolation_error_probe(const CoarseBasis& basis, const std::function<double(Point)>& f) {
  const FineMesh& mesh = *basis.mesh;
  const SparseMatrix lap = assemble_laplacian(mesh);
  const FEFunction fh = interpolate(mesh, f);
  const std::vector<double> lf = lap.multiply(fh.coeffs);
  const auto nb = static_cast<Eigen::Index>(basis.size());
  Eigen::VectorXd rhs(nb);
  for (Eigen::Index i = 0; i < nb; ++i) rhs[i] = basis.functions[static_cast<std::size_t>(i)].dot(lf);
  const Eigen::MatrixXd g = coarse_gram(basis);
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success) throw SolverError("coarse Gram matrix is not positive definite", 0.0, 0);
  const Eigen::VectorXd c = llt.solve(rhs);
  std::vector<double> e = fh.coeffs;
  for (Eigen::Index i = 0; i < nb; ++i) basis.functions[static_cast<std::size_t>(i)].scatter(e, -c[i]);
  return h1_seminorm(mesh, e);
}

}  // namespace numhom
