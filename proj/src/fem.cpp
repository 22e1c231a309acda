#include "numhom/fem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "numhom/error.hpp"

namespace numhom {

// ---- SparseMatrix ---------------------------------------------------------

SparseMatrix::SparseMatrix(std::size_t dim, std::vector<int> row_ptr, std::vector<int> col_idx,
                           std::vector<double> values, bool symmetric)
    : dim_(dim),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)),
      symmetric_(symmetric) {
  if (row_ptr_.size() != dim_ + 1 || col_idx_.size() != values_.size() ||
      static_cast<std::size_t>(row_ptr_.back()) != values_.size()) {
    throw InvalidArgument("inconsistent compressed-row arrays");
  }
}

SparseMatrix SparseMatrix::from_triplets(std::size_t dim, std::vector<Triplet> triplets, bool symmetric) {
  for (const auto& t : triplets) {
    if (t.row < 0 || t.col < 0 || static_cast<std::size_t>(t.row) >= dim || static_cast<std::size_t>(t.col) >= dim) {
      throw InvalidArgument("triplet index out of range");
    }
  }
  std::stable_sort(triplets.begin(), triplets.end(),
                   [](const Triplet& a, const Triplet& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
  std::vector<int> row_ptr(dim + 1, 0);
  std::vector<int> cols;
  std::vector<double> vals;
  for (std::size_t k = 0; k < triplets.size(); ++k) {
    const auto& t = triplets[k];
    if (k > 0 && triplets[k - 1].row == t.row && triplets[k - 1].col == t.col) {
      vals.back() += t.value;
      continue;
    }
    cols.push_back(t.col);
    vals.push_back(t.value);
    ++row_ptr[static_cast<std::size_t>(t.row) + 1];
  }
  std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());
  return SparseMatrix(dim, std::move(row_ptr), std::move(cols), std::move(vals), symmetric);
}

SparseMatrix SparseMatrix::identity(std::size_t dim) {
  std::vector<int> row_ptr(dim + 1);
  std::vector<int> cols(dim);
  std::iota(row_ptr.begin(), row_ptr.end(), 0);
  std::iota(cols.begin(), cols.end(), 0);
  return SparseMatrix(dim, std::move(row_ptr), std::move(cols), std::vector<double>(dim, 1.0), true);
}

double SparseMatrix::value(int i, int j) const {
  const auto begin = col_idx_.begin() + row_ptr_[static_cast<std::size_t>(i)];
  const auto end = col_idx_.begin() + row_ptr_[static_cast<std::size_t>(i) + 1];
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(dim_);
  for (std::size_t i = 0; i < dim_; ++i) d[i] = value(static_cast<int>(i), static_cast<int>(i));
  return d;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != dim_ || y.size() != dim_) throw InvalidArgument("matrix-vector dimension mismatch");
  for (std::size_t i = 0; i < dim_; ++i) {
    double s = 0.0;
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      s += values_[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(col_idx_[static_cast<std::size_t>(k)])];
    }
    y[i] = s;
  }
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(dim_);
  multiply(x, y);
  return y;
}

double SparseMatrix::quadratic_form(std::span<const double> x) const {
  const auto y = multiply(x);
  return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
}

SparseMatrix SparseMatrix::restrict_to(std::span<const int> keep, std::size_t new_dim) const {
  if (keep.size() != dim_) throw InvalidArgument("restriction map has the wrong length");
  std::vector<int> row_of(new_dim, -1);
  for (std::size_t i = 0; i < dim_; ++i) {
    if (keep[i] >= 0) row_of[static_cast<std::size_t>(keep[i])] = static_cast<int>(i);
  }
  std::vector<int> row_ptr(new_dim + 1, 0);
  std::vector<int> cols;
  std::vector<double> vals;
  for (std::size_t r = 0; r < new_dim; ++r) {
    const int i = row_of[r];
    if (i < 0) throw InvalidArgument("restriction map is not onto");
    const std::size_t row_start = cols.size();
    for (int k = row_ptr_[static_cast<std::size_t>(i)]; k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k) {
      const int c = keep[static_cast<std::size_t>(col_idx_[static_cast<std::size_t>(k)])];
      if (c < 0) continue;
      cols.push_back(c);
      vals.push_back(values_[static_cast<std::size_t>(k)]);
    }
    // Renumbering may break the column order when keep is not monotone.
    if (!std::is_sorted(cols.begin() + static_cast<std::ptrdiff_t>(row_start), cols.end())) {
      std::vector<std::pair<int, double>> tmp;
      for (std::size_t k = row_start; k < cols.size(); ++k) tmp.emplace_back(cols[k], vals[k]);
      std::sort(tmp.begin(), tmp.end());
      for (std::size_t k = 0; k < tmp.size(); ++k) {
        cols[row_start + k] = tmp[k].first;
        vals[row_start + k] = tmp[k].second;
      }
    }
    row_ptr[r + 1] = static_cast<int>(cols.size());
  }
  return SparseMatrix(new_dim, std::move(row_ptr), std::move(cols), std::move(vals), symmetric_);
}

bool SparseMatrix::same_pattern(const SparseMatrix& other) const {
  return dim_ == other.dim_ && row_ptr_ == other.row_ptr_ && col_idx_ == other.col_idx_;
}

SparseMatrix SparseMatrix::combine(double alpha, const SparseMatrix& other, double beta) const {
  if (!same_pattern(other)) throw InvalidArgument("matrices do not share a sparsity pattern");
  std::vector<double> vals(values_.size());
  for (std::size_t k = 0; k < vals.size(); ++k) vals[k] = alpha * values_[k] + beta * other.values_[k];
  return SparseMatrix(dim_, row_ptr_, col_idx_, std::move(vals), symmetric_ && other.symmetric_);
}

std::vector<double> SparseMatrix::to_dense() const {
  std::vector<double> dense(dim_ * dim_, 0.0);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      dense[i * dim_ + static_cast<std::size_t>(col_idx_[static_cast<std::size_t>(k)])] =
          values_[static_cast<std::size_t>(k)];
    }
  }
  return dense;
}

void SparseMatrix::write_coordinate(std::ostream& out) const {
  out.precision(17);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << dim_ << ' ' << dim_ << ' ' << values_.size() << '\n';
  for (std::size_t i = 0; i < dim_; ++i) {
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      out << i + 1 << ' ' << col_idx_[static_cast<std::size_t>(k)] + 1 << ' ' << values_[static_cast<std::size_t>(k)]
          << '\n';
    }
  }
}

// ---- vectors and functions ------------------------------------------------

SparseVector SparseVector::from_dense(std::span<const double> dense) {
  SparseVector v;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0) {
      v.index.push_back(static_cast<int>(i));
      v.value.push_back(dense[i]);
    }
  }
  return v;
}

std::vector<double> SparseVector::to_dense(std::size_t dim) const {
  std::vector<double> dense(dim, 0.0);
  scatter(dense);
  return dense;
}

void SparseVector::scatter(std::span<double> dense, double scale) const {
  for (std::size_t k = 0; k < index.size(); ++k) dense[static_cast<std::size_t>(index[k])] += scale * value[k];
}

double SparseVector::dot(std::span<const double> dense) const {
  double s = 0.0;
  for (std::size_t k = 0; k < index.size(); ++k) s += value[k] * dense[static_cast<std::size_t>(index[k])];
  return s;
}

FEFunction::FEFunction(const FineMesh& m, std::vector<double> c) : mesh(&m), coeffs(std::move(c)) {
  if (coeffs.size() != m.dof_count()) throw InvalidArgument("FE coefficient vector does not match the mesh");
}

FEFunction FEFunction::zeros(const FineMesh& m) { return FEFunction(m, std::vector<double>(m.dof_count(), 0.0)); }

double FEFunction::at_node(int node) const {
  const int dof = mesh->dof_of_node(node);
  return dof < 0 ? 0.0 : coeffs[static_cast<std::size_t>(dof)];
}

std::vector<double> FEFunction::nodal_values() const {
  std::vector<double> out(mesh->node_count(), 0.0);
  for (std::size_t d = 0; d < coeffs.size(); ++d) out[static_cast<std::size_t>(mesh->node_of_dof(static_cast<int>(d)))] = coeffs[d];
  return out;
}

FEFunction interpolate(const FineMesh& mesh, const std::function<double(Point)>& f) {
  std::vector<double> c(mesh.dof_count());
  for (std::size_t d = 0; d < c.size(); ++d) c[d] = f(mesh.node(mesh.node_of_dof(static_cast<int>(d))));
  return FEFunction(mesh, std::move(c));
}

// ---- assembly -------------------------------------------------------------

namespace {

struct ElementGeometry {
  double area;
  double grad[3][2];
};

ElementGeometry element_geometry(const FineMesh& mesh, int t) {
  const auto& tri = mesh.triangle(t);
  const Point p0 = mesh.node(tri[0]);
  const Point p1 = mesh.node(tri[1]);
  const Point p2 = mesh.node(tri[2]);
  const double det = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
  ElementGeometry g;
  g.area = 0.5 * det;
  g.grad[0][0] = (p1.y - p2.y) / det;
  g.grad[0][1] = (p2.x - p1.x) / det;
  g.grad[1][0] = (p2.y - p0.y) / det;
  g.grad[1][1] = (p0.x - p2.x) / det;
  g.grad[2][0] = (p0.y - p1.y) / det;
  g.grad[2][1] = (p1.x - p0.x) / det;
  return g;
}

// Assembles sum over `cells` of the 3x3 element matrices into the rows given
// by row_of_node (-1 drops the node). Contributions are accumulated in cell
// order, so symmetric element matrices give an exactly symmetric result.
template <class Kernel>
SparseMatrix assemble_over(const FineMesh& mesh, std::span<const int> cells, const std::vector<int>& row_of_node,
                           std::size_t dim, Kernel kernel) {
  std::vector<std::vector<int>> pattern(dim);
  for (int t : cells) {
    const auto& tri = mesh.triangle(t);
    for (int a : tri) {
      const int r = row_of_node[static_cast<std::size_t>(a)];
      if (r < 0) continue;
      for (int b : tri) {
        const int c = row_of_node[static_cast<std::size_t>(b)];
        if (c >= 0) pattern[static_cast<std::size_t>(r)].push_back(c);
      }
    }
  }
  std::vector<int> row_ptr(dim + 1, 0);
  for (std::size_t r = 0; r < dim; ++r) {
    auto& row = pattern[r];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    row_ptr[r + 1] = row_ptr[r] + static_cast<int>(row.size());
  }
  std::vector<int> cols;
  cols.reserve(static_cast<std::size_t>(row_ptr[dim]));
  for (const auto& row : pattern) cols.insert(cols.end(), row.begin(), row.end());
  std::vector<double> vals(cols.size(), 0.0);

  double local[3][3];
  for (int t : cells) {
    const auto& tri = mesh.triangle(t);
    kernel(t, local);
    for (int a = 0; a < 3; ++a) {
      const int r = row_of_node[static_cast<std::size_t>(tri[static_cast<std::size_t>(a)])];
      if (r < 0) continue;
      const auto begin = cols.begin() + row_ptr[static_cast<std::size_t>(r)];
      const auto end = cols.begin() + row_ptr[static_cast<std::size_t>(r) + 1];
      for (int b = 0; b < 3; ++b) {
        const int c = row_of_node[static_cast<std::size_t>(tri[static_cast<std::size_t>(b)])];
        if (c < 0) continue;
        const auto it = std::lower_bound(begin, end, c);
        vals[static_cast<std::size_t>(it - cols.begin())] += local[a][b];
      }
    }
  }
  return SparseMatrix(dim, std::move(row_ptr), std::move(cols), std::move(vals), true);
}

std::vector<int> interior_rows(const FineMesh& mesh) {
  std::vector<int> rows(mesh.node_count());
  for (std::size_t v = 0; v < rows.size(); ++v) rows[v] = mesh.dof_of_node(static_cast<int>(v));
  return rows;
}

std::vector<int> all_cells(const FineMesh& mesh) {
  std::vector<int> cells(mesh.triangle_count());
  std::iota(cells.begin(), cells.end(), 0);
  return cells;
}

void check_coeff(const FineMesh& mesh, const CoefficientField& coeff) {
  if (coeff.cells_per_axis() != mesh.cells_per_axis() || coeff.size() != mesh.triangle_count()) {
    throw InvalidArgument("coefficient field does not cover the mesh");
  }
}

auto stiffness_kernel(const FineMesh& mesh, const CoefficientField& coeff, std::optional<double> screening) {
  const double s = screening.value_or(0.0);
  if (!(s >= 0.0) || !std::isfinite(s)) throw InvalidArgument("screening weight must be finite and nonnegative");
  return [&mesh, &coeff, s](int t, double (&local)[3][3]) {
    const ElementGeometry g = element_geometry(mesh, t);
    const double w = coeff.value(t) * g.area;
    const double m = s * g.area / 12.0;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const double dot = g.grad[a][0] * g.grad[b][0] + g.grad[a][1] * g.grad[b][1];
        local[a][b] = w * dot + (a == b ? 2.0 * m : m);
      }
    }
  };
}

}  // namespace

SparseMatrix assemble_stiffness(const FineMesh& mesh, const CoefficientField& coeff, std::optional<double> screening) {
  check_coeff(mesh, coeff);
  return assemble_over(mesh, all_cells(mesh), interior_rows(mesh), mesh.dof_count(),
                       stiffness_kernel(mesh, coeff, screening));
}

SparseMatrix assemble_stiffness(const Subdomain& sub, const CoefficientField& coeff, std::optional<double> screening) {
  const FineMesh& mesh = sub.mesh();
  check_coeff(mesh, coeff);
  std::vector<int> rows(mesh.node_count(), -1);
  for (std::size_t v = 0; v < rows.size(); ++v) {
    const int dof = mesh.dof_of_node(static_cast<int>(v));
    if (dof >= 0) rows[v] = sub.local_of(dof);
  }
  return assemble_over(mesh, sub.cells(), rows, sub.dof_count(), stiffness_kernel(mesh, coeff, screening));
}

SparseMatrix assemble_laplacian(const FineMesh& mesh) {
  return assemble_stiffness(mesh, gen_constant(mesh, 1.0));
}

SparseMatrix assemble_mass(const FineMesh& mesh, std::span<const double> density, bool include_boundary) {
  if (density.size() != mesh.triangle_count()) throw InvalidArgument("density needs one value per triangle");
  for (double r : density) {
    if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument("density must be finite and strictly positive");
  }
  std::vector<int> rows;
  std::size_t dim = 0;
  if (include_boundary) {
    rows.resize(mesh.node_count());
    std::iota(rows.begin(), rows.end(), 0);
    dim = mesh.node_count();
  } else {
    rows = interior_rows(mesh);
    dim = mesh.dof_count();
  }
  return assemble_over(mesh, all_cells(mesh), rows, dim, [&mesh, density](int t, double (&local)[3][3]) {
    const double m = density[static_cast<std::size_t>(t)] * 0.5 * std::abs(mesh.signed_area2(t)) / 12.0;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) local[a][b] = (a == b) ? 2.0 * m : m;
    }
  });
}

SparseMatrix assemble_mass(const FineMesh& mesh, double density, bool include_boundary) {
  const std::vector<double> rho(mesh.triangle_count(), density);
  return assemble_mass(mesh, rho, include_boundary);
}

std::vector<double> assemble_load(const FineMesh& mesh, std::span<const double> cell_values) {
  if (cell_values.size() != mesh.triangle_count()) throw InvalidArgument("load needs one value per triangle");
  std::vector<double> b(mesh.dof_count(), 0.0);
  for (std::size_t t = 0; t < cell_values.size(); ++t) {
    const double w = cell_values[t] * 0.5 * std::abs(mesh.signed_area2(static_cast<int>(t))) / 3.0;
    for (int v : mesh.triangle(static_cast<int>(t))) {
      const int dof = mesh.dof_of_node(v);
      if (dof >= 0) b[static_cast<std::size_t>(dof)] += w;
    }
  }
  return b;
}

std::vector<double> assemble_load(const FineMesh& mesh, const std::function<double(Point)>& g) {
  std::vector<double> values(mesh.triangle_count());
  for (std::size_t t = 0; t < values.size(); ++t) values[t] = g(mesh.barycenter(static_cast<int>(t)));
  return assemble_load(mesh, values);
}

namespace {

std::vector<double> weak_laplacian_over(const FineMesh& mesh, std::span<const int> cells,
                                        const std::vector<int>& row_of_node, std::size_t dim, const FEFunction& phi) {
  if (phi.mesh == nullptr || phi.coeffs.size() != mesh.dof_count()) {
    throw InvalidArgument("phi is not defined on the parent mesh");
  }
  std::vector<double> b(dim, 0.0);
  for (int t : cells) {
    const auto& tri = mesh.triangle(t);
    double u[3];
    bool any = false;
    for (int a = 0; a < 3; ++a) {
      u[a] = phi.at_node(tri[static_cast<std::size_t>(a)]);
      any = any || u[a] != 0.0;
    }
    if (!any) continue;
    const ElementGeometry g = element_geometry(mesh, t);
    const double gx = u[0] * g.grad[0][0] + u[1] * g.grad[1][0] + u[2] * g.grad[2][0];
    const double gy = u[0] * g.grad[0][1] + u[1] * g.grad[1][1] + u[2] * g.grad[2][1];
    for (int a = 0; a < 3; ++a) {
      const int r = row_of_node[static_cast<std::size_t>(tri[static_cast<std::size_t>(a)])];
      if (r < 0) continue;
      b[static_cast<std::size_t>(r)] -= g.area * (gx * g.grad[a][0] + gy * g.grad[a][1]);
    }
  }
  return b;
}

}  // namespace

std::vector<double> weak_laplacian_rhs(const Subdomain& sub, const FEFunction& phi) {
  const FineMesh& mesh = sub.mesh();
  std::vector<int> rows(mesh.node_count(), -1);
  for (std::size_t v = 0; v < rows.size(); ++v) {
    const int dof = mesh.dof_of_node(static_cast<int>(v));
    if (dof >= 0) rows[v] = sub.local_of(dof);
  }
  return weak_laplacian_over(mesh, sub.cells(), rows, sub.dof_count(), phi);
}

std::vector<double> weak_laplacian_rhs(const FineMesh& mesh, const FEFunction& phi) {
  return weak_laplacian_over(mesh, all_cells(mesh), interior_rows(mesh), mesh.dof_count(), phi);
}

// ---- norms ----------------------------------------------------------------

namespace {

double nodal(const FineMesh& mesh, std::span<const double> u, int node) {
  const int dof = mesh.dof_of_node(node);
  return dof < 0 ? 0.0 : u[static_cast<std::size_t>(dof)];
}

double cell_energy(const FineMesh& mesh, std::span<const double> u, int t) {
  const auto& tri = mesh.triangle(t);
  const ElementGeometry g = element_geometry(mesh, t);
  double gx = 0.0;
  double gy = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double v = nodal(mesh, u, tri[static_cast<std::size_t>(a)]);
    gx += v * g.grad[a][0];
    gy += v * g.grad[a][1];
  }
  return g.area * (gx * gx + gy * gy);
}

void check_length(const FineMesh& mesh, std::span<const double> u) {
  if (u.size() != mesh.dof_count()) throw InvalidArgument("vector does not match the mesh dof count");
}

}  // namespace

double l2_norm(const FineMesh& mesh, std::span<const double> u) {
  check_length(mesh, u);
  double s = 0.0;
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangle(static_cast<int>(t));
    const double a = nodal(mesh, u, tri[0]);
    const double b = nodal(mesh, u, tri[1]);
    const double c = nodal(mesh, u, tri[2]);
    const double area = 0.5 * mesh.signed_area2(static_cast<int>(t));
    s += area / 12.0 * (a * a + b * b + c * c + (a + b + c) * (a + b + c));
  }
  return std::sqrt(s);
}

double h1_seminorm(const FineMesh& mesh, std::span<const double> u) {
  check_length(mesh, u);
  double s = 0.0;
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) s += cell_energy(mesh, u, static_cast<int>(t));
  return std::sqrt(s);
}

double h1_seminorm_on(const FineMesh& mesh, std::span<const double> u, std::span<const int> cells) {
  check_length(mesh, u);
  double s = 0.0;
  for (int t : cells) s += cell_energy(mesh, u, t);
  return std::sqrt(s);
}

double linf_norm(std::span<const double> u) {
  double m = 0.0;
  for (double v : u) m = std::max(m, std::abs(v));
  return m;
}

NormReport norms(const FEFunction& u, const FEFunction* reference) {
  if (u.mesh == nullptr) throw InvalidArgument("function has no mesh");
  NormReport r;
  r.l2 = l2_norm(*u.mesh, u.coeffs);
  r.h1 = h1_seminorm(*u.mesh, u.coeffs);
  r.linf = linf_norm(u.coeffs);
  if (reference != nullptr) {
    if (reference->mesh == nullptr || reference->coeffs.size() != u.coeffs.size()) {
      throw InvalidArgument("reference lives on a different mesh");
    }
    std::vector<double> diff(u.coeffs.size());
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = u.coeffs[k] - reference->coeffs[k];
    auto ratio = [](double num, double den) { return den > 0.0 ? num / den : num; };
    r.rel_l2 = ratio(l2_norm(*u.mesh, diff), l2_norm(*u.mesh, reference->coeffs));
    r.rel_h1 = ratio(h1_seminorm(*u.mesh, diff), h1_seminorm(*u.mesh, reference->coeffs));
    r.rel_linf = ratio(linf_norm(diff), linf_norm(reference->coeffs));
  }
  return r;
}

// ---- flux norm ------------------------------------------------------------

double flux_norm(const FEFunction& u, const CoefficientField& coeff, const SolverConfig& cfg) {
  if (u.mesh == nullptr) throw InvalidArgument("function has no mesh");
  const FineMesh& mesh = *u.mesh;
  const SparseMatrix k = assemble_stiffness(mesh, coeff);
  const SparseMatrix lap = assemble_laplacian(mesh);
  const std::vector<double> f = k.multiply(u.coeffs);
  const std::vector<double> chi = solve_spd(lap, f, cfg);
  return std::sqrt(std::max(0.0, lap.quadratic_form(chi)));
}

FluxNorm::FluxNorm(const FineMesh& mesh, const CoefficientField& coeff)
    : laplacian_(assemble_laplacian(mesh)), stiffness_(assemble_stiffness(mesh, coeff)), solver_(laplacian_) {}

double FluxNorm::inverse_laplacian_norm(std::span<const double> b) const {
  const std::vector<double> chi = solver_.solve(b);
  return std::sqrt(std::max(0.0, laplacian_.quadratic_form(chi)));
}

double FluxNorm::operator()(std::span<const double> u) const {
  return inverse_laplacian_norm(stiffness_.multiply(u));
}

}  // namespace numhom
