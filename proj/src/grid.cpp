#include "numhom/grid.hpp"

#include <algorithm>
#include <deque>
#include <ostream>

#include "numhom/coeff.hpp"
#include "numhom/error.hpp"

namespace numhom {

FineMesh::FineMesh(int cells_per_axis) : n_(cells_per_axis) {
  if (n_ < 1) {
    throw InvalidArgument("fine mesh needs at least one cell per axis, got " + std::to_string(n_));
  }
  const int np = n_ + 1;
  const double dx = spacing();
  nodes_.reserve(static_cast<std::size_t>(np) * np);
  dof_of_node_.assign(static_cast<std::size_t>(np) * np, -1);
  for (int j = 0; j < np; ++j) {
    for (int i = 0; i < np; ++i) {
      // Exact endpoints so boundary nodes sit on +-1.
      const double x = (i == n_) ? 1.0 : -1.0 + i * dx;
      const double y = (j == n_) ? 1.0 : -1.0 + j * dx;
      nodes_.push_back({x, y});
      if (i > 0 && i < n_ && j > 0 && j < n_) {
        dof_of_node_[static_cast<std::size_t>(node_index(i, j))] = static_cast<int>(node_of_dof_.size());
        node_of_dof_.push_back(node_index(i, j));
      }
    }
  }

  triangles_.reserve(2 * static_cast<std::size_t>(n_) * n_);
  valence_.assign(nodes_.size(), 0);
  for (int j = 0; j < n_; ++j) {
    for (int i = 0; i < n_; ++i) {
      const int v00 = node_index(i, j);
      const int v10 = node_index(i + 1, j);
      const int v11 = node_index(i + 1, j + 1);
      const int v01 = node_index(i, j + 1);
      triangles_.push_back({v00, v10, v11});
      triangles_.push_back({v00, v11, v01});
    }
  }
  for (const auto& tri : triangles_) {
    for (int v : tri) ++valence_[static_cast<std::size_t>(v)];
  }
}

Point FineMesh::barycenter(int t) const {
  const auto& tri = triangle(t);
  const Point a = node(tri[0]);
  const Point b = node(tri[1]);
  const Point c = node(tri[2]);
  return {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
}

double FineMesh::signed_area2(int t) const {
  const auto& tri = triangle(t);
  const Point a = node(tri[0]);
  const Point b = node(tri[1]);
  const Point c = node(tri[2]);
  return (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
}

std::array<int, 3> FineMesh::face_neighbors(int t) const {
  const int cell = t / 2;
  const int i = cell % n_;
  const int j = cell / n_;
  auto tri_at = [this](int ci, int cj, int k) {
    if (ci < 0 || cj < 0 || ci >= n_ || cj >= n_) return -1;
    return 2 * (cj * n_ + ci) + k;
  };
  if (t % 2 == 0) {
    // lower-right triangle: bottom edge, right edge, diagonal
    return {tri_at(i, j - 1, 1), tri_at(i + 1, j, 1), 2 * cell + 1};
  }
  // upper-left triangle: diagonal, top edge, left edge
  return {2 * cell, tri_at(i, j + 1, 0), tri_at(i - 1, j, 0)};
}

std::vector<int> FineMesh::vertex_neighbors(int t) const {
  const int cell = t / 2;
  const int i = cell % n_;
  const int j = cell / n_;
  const auto& own = triangle(t);
  std::vector<int> out;
  for (int cj = std::max(0, j - 1); cj <= std::min(n_ - 1, j + 1); ++cj) {
    for (int ci = std::max(0, i - 1); ci <= std::min(n_ - 1, i + 1); ++ci) {
      for (int k = 0; k < 2; ++k) {
        const int other = 2 * (cj * n_ + ci) + k;
        if (other == t) continue;
        const auto& tri = triangle(other);
        const bool shares = std::any_of(tri.begin(), tri.end(), [&](int v) {
          return v == own[0] || v == own[1] || v == own[2];
        });
        if (shares) out.push_back(other);
      }
    }
  }
  return out;
}

std::array<int, 2> FineMesh::cell_range(double a, double b) const {
  const double dx = spacing();
  int lo = static_cast<int>(std::floor((a + 1.0) / dx));
  int hi = static_cast<int>(std::ceil((b + 1.0) / dx));
  lo = std::clamp(lo, 0, n_);
  hi = std::clamp(hi, 0, n_);
  return {lo, hi};
}

FineMesh build_fine_mesh(int n) { return FineMesh(n); }

void write_mesh_text(const FineMesh& mesh, std::ostream& out) {
  out.precision(17);
  for (std::size_t k = 0; k < mesh.node_count(); ++k) {
    const Point p = mesh.node(static_cast<int>(k));
    out << "node " << k << ' ' << p.x << ' ' << p.y << '\n';
  }
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangle(static_cast<int>(t));
    out << "triangle " << t << ' ' << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
  }
}

CoarseLattice::CoarseLattice(const FineMesh& mesh, double h) : h_(h), n_(mesh.cells_per_axis()) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw InvalidArgument("coarse spacing must be positive");
  }
  const double ratio = 2.0 / h;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * ratio) {
    throw InvalidArgument("coarse spacing h=" + std::to_string(h) + " does not divide the domain width 2");
  }
  intervals_ = static_cast<int>(rounded);
  if (intervals_ < 2) {
    throw InvalidArgument("coarse spacing h=" + std::to_string(h) + " leaves no interior lattice node");
  }
  if (n_ % intervals_ != 0) {
    throw InvalidArgument("fine mesh with n=" + std::to_string(n_) + " does not resolve coarse spacing h=" +
                          std::to_string(h));
  }
  stride_ = n_ / intervals_;
}

std::array<int, 2> CoarseLattice::coords(std::size_t i) const {
  const int m = per_axis();
  const int k = static_cast<int>(i);
  return {k % m + 1, k / m + 1};
}

Point CoarseLattice::node(std::size_t i) const {
  const auto [p, q] = coords(i);
  return {-1.0 + p * h_, -1.0 + q * h_};
}

int CoarseLattice::fine_node(std::size_t i) const {
  const auto [p, q] = coords(i);
  return q * stride_ * (n_ + 1) + p * stride_;
}

CoarseLattice build_coarse_lattice(const FineMesh& mesh, double h) { return CoarseLattice(mesh, h); }

Subdomain::Subdomain(const FineMesh& mesh, std::vector<int> cells) : mesh_(&mesh), cells_(std::move(cells)) {
  std::sort(cells_.begin(), cells_.end());
  cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
  if (cells_.empty()) {
    throw InvalidArgument("subdomain has no cells");
  }
  if (cells_.front() < 0 || static_cast<std::size_t>(cells_.back()) >= mesh.triangle_count()) {
    throw InvalidArgument("subdomain cell index out of range");
  }

  std::vector<int> member_count(mesh.node_count(), 0);
  for (int t : cells_) {
    for (int v : mesh.triangle(t)) ++member_count[static_cast<std::size_t>(v)];
  }
  local_of_.assign(mesh.dof_count(), -1);
  for (std::size_t dof = 0; dof < mesh.dof_count(); ++dof) {
    const int node = mesh.node_of_dof(static_cast<int>(dof));
    const int count = member_count[static_cast<std::size_t>(node)];
    if (count == 0) continue;
    if (count == mesh.valence(node)) {
      local_of_[dof] = static_cast<int>(local_to_parent_.size());
      local_to_parent_.push_back(static_cast<int>(dof));
    } else {
      boundary_nodes_.push_back(node);
    }
  }
}

bool Subdomain::contains_cell(int t) const { return std::binary_search(cells_.begin(), cells_.end(), t); }

int Subdomain::local_of(int parent_dof) const { return local_of_[static_cast<std::size_t>(parent_dof)]; }

Subdomain extract_subdomain(const FineMesh& mesh, Point center, double radius) {
  if (!(radius > 0.0)) {
    throw InvalidArgument("subdomain radius must be positive");
  }
  const auto [i0, i1] = mesh.cell_range(center.x - radius, center.x + radius);
  const auto [j0, j1] = mesh.cell_range(center.y - radius, center.y + radius);
  const int n = mesh.cells_per_axis();
  const double r2 = radius * radius;
  std::vector<int> cells;
  for (int j = j0; j < j1; ++j) {
    for (int i = i0; i < i1; ++i) {
      for (int k = 0; k < 2; ++k) {
        const int t = 2 * (j * n + i) + k;
        const Point b = mesh.barycenter(t);
        const double dx = b.x - center.x;
        const double dy = b.y - center.y;
        if (dx * dx + dy * dy <= r2) cells.push_back(t);
      }
    }
  }
  if (cells.empty()) {
    throw InvalidArgument("no cell barycenter inside the requested disk");
  }
  return Subdomain(mesh, std::move(cells));
}

Subdomain extract_box_subdomain(const FineMesh& mesh, Point center, double half_width) {
  if (!(half_width > 0.0)) {
    throw InvalidArgument("subdomain half-width must be positive");
  }
  const auto [i0, i1] = mesh.cell_range(center.x - half_width, center.x + half_width);
  const auto [j0, j1] = mesh.cell_range(center.y - half_width, center.y + half_width);
  const int n = mesh.cells_per_axis();
  std::vector<int> cells;
  for (int j = j0; j < j1; ++j) {
    for (int i = i0; i < i1; ++i) {
      for (int k = 0; k < 2; ++k) {
        const int t = 2 * (j * n + i) + k;
        const Point b = mesh.barycenter(t);
        if (std::abs(b.x - center.x) <= half_width && std::abs(b.y - center.y) <= half_width) cells.push_back(t);
      }
    }
  }
  if (cells.empty()) {
    throw InvalidArgument("no cell barycenter inside the requested square");
  }
  return Subdomain(mesh, std::move(cells));
}

Subdomain unite(const Subdomain& base, std::span<const int> extra_cells) {
  std::vector<int> cells(base.cells().begin(), base.cells().end());
  cells.insert(cells.end(), extra_cells.begin(), extra_cells.end());
  Subdomain out(base.mesh(), std::move(cells));
  out.set_warning(base.warning());
  return out;
}

namespace {

// Labels vertex-connected components of the marked cells; -1 elsewhere.
std::vector<int> label_components(const FineMesh& mesh, const std::vector<char>& marked) {
  std::vector<int> label(marked.size(), -1);
  int next = 0;
  std::vector<int> stack;
  for (std::size_t t = 0; t < marked.size(); ++t) {
    if (!marked[t] || label[t] >= 0) continue;
    label[t] = next;
    stack.push_back(static_cast<int>(t));
    while (!stack.empty()) {
      const int cur = stack.back();
      stack.pop_back();
      for (int nb : mesh.vertex_neighbors(cur)) {
        const auto u = static_cast<std::size_t>(nb);
        if (marked[u] && label[u] < 0) {
          label[u] = next;
          stack.push_back(nb);
        }
      }
    }
    ++next;
  }
  return label;
}

// Marks every cell whose barycenter is within `radius` of a barycenter of a
// source cell. Only sources on the rim of the set need to be scanned.
void dilate_into(const FineMesh& mesh, const std::vector<int>& sources, const std::vector<char>& source_mask,
                 double radius, std::vector<char>& out) {
  const int n = mesh.cells_per_axis();
  const double r2 = radius * radius;
  for (int s : sources) {
    out[static_cast<std::size_t>(s)] = 1;
    bool rim = false;
    for (int nb : mesh.face_neighbors(s)) {
      if (nb < 0 || !source_mask[static_cast<std::size_t>(nb)]) rim = true;
    }
    if (!rim) continue;
    const Point c = mesh.barycenter(s);
    const auto [i0, i1] = mesh.cell_range(c.x - radius, c.x + radius);
    const auto [j0, j1] = mesh.cell_range(c.y - radius, c.y + radius);
    for (int j = j0; j < j1; ++j) {
      for (int i = i0; i < i1; ++i) {
        for (int k = 0; k < 2; ++k) {
          const int t = 2 * (j * n + i) + k;
          const Point b = mesh.barycenter(t);
          const double dx = b.x - c.x;
          const double dy = b.y - c.y;
          if (dx * dx + dy * dy <= r2) out[static_cast<std::size_t>(t)] = 1;
        }
      }
    }
  }
}

}  // namespace

BufferPlanner::BufferPlanner(const FineMesh& mesh, const CoefficientField& coeff, double buffer,
                             double contrast_threshold)
    : mesh_(&mesh) {
  if (!(buffer > 0.0)) throw InvalidArgument("buffer width must be positive");
  if (!(contrast_threshold > 1.0)) throw InvalidArgument("contrast threshold must exceed 1");
  if (coeff.cells_per_axis() != mesh.cells_per_axis()) {
    throw InvalidArgument("coefficient field does not match the mesh");
  }
  const std::size_t nt = mesh.triangle_count();
  const double cutoff = contrast_threshold * coeff.median();
  std::vector<char> high(nt, 0);
  for (std::size_t t = 0; t < nt; ++t) high[t] = coeff.value(static_cast<int>(t)) > cutoff ? 1 : 0;
  label_ = label_components(mesh, high);

  std::vector<std::vector<int>> members;
  for (std::size_t t = 0; t < nt; ++t) {
    const int c = label_[t];
    if (c < 0) continue;
    if (static_cast<std::size_t>(c) >= members.size()) members.resize(static_cast<std::size_t>(c) + 1);
    members[static_cast<std::size_t>(c)].push_back(static_cast<int>(t));
  }
  hulls_.reserve(members.size());
  std::vector<char> mask(nt, 0);
  std::vector<char> grown(nt, 0);
  for (const auto& cells : members) {
    for (int t : cells) mask[static_cast<std::size_t>(t)] = 1;
    dilate_into(mesh, cells, mask, buffer, grown);
    std::vector<int> hull;
    for (std::size_t t = 0; t < nt; ++t) {
      if (grown[t]) hull.push_back(static_cast<int>(t));
      grown[t] = 0;
    }
    for (int t : cells) mask[static_cast<std::size_t>(t)] = 0;
    hulls_.push_back(std::move(hull));
  }
}

Subdomain BufferPlanner::apply(const Subdomain& base) const {
  if (&base.mesh() != mesh_ && base.mesh().cells_per_axis() != mesh_->cells_per_axis()) {
    throw InvalidArgument("subdomain belongs to a different mesh");
  }
  const std::size_t nt = mesh_->triangle_count();
  std::vector<char> in_result(nt, 0);
  std::vector<char> absorbed(hulls_.size(), 0);
  std::deque<int> pending;
  auto mark = [&](int t) {
    const int c = label_[static_cast<std::size_t>(t)];
    if (c >= 0 && !absorbed[static_cast<std::size_t>(c)]) {
      absorbed[static_cast<std::size_t>(c)] = 1;
      pending.push_back(c);
    }
  };
  // A component counts as met once it shares a vertex with the result.
  auto touch = [&](int t) {
    if (hulls_.empty()) return;
    mark(t);
    for (int nb : mesh_->vertex_neighbors(t)) mark(nb);
  };
  for (int t : base.cells()) {
    in_result[static_cast<std::size_t>(t)] = 1;
    touch(t);
  }
  // Absorbing a hull can reach further components; iterate to a fixed point.
  while (!pending.empty()) {
    const int c = pending.front();
    pending.pop_front();
    for (int t : hulls_[static_cast<std::size_t>(c)]) {
      in_result[static_cast<std::size_t>(t)] = 1;
      touch(t);
    }
  }

  std::vector<int> cells;
  for (std::size_t t = 0; t < nt; ++t) {
    if (in_result[t]) cells.push_back(static_cast<int>(t));
  }
  Subdomain out(*mesh_, std::move(cells));
  out.set_warning(out.covers_mesh() && !base.covers_mesh());
  return out;
}

Subdomain buffered_subdomain(const FineMesh& mesh, const CoefficientField& coeff, const Subdomain& base,
                             double buffer, double contrast_threshold) {
  return BufferPlanner(mesh, coeff, buffer, contrast_threshold).apply(base);
}

}  // namespace numhom
