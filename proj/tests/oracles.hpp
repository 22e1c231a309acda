#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "numhom/coeff.hpp"
#include "numhom/fem.hpp"
#include "numhom/grid.hpp"

namespace oracle {

using numhom::Point;

using Dense = std::vector<std::vector<double>>;

inline Dense dense(const numhom::SparseMatrix& a) {
  const std::size_t n = a.dimension();
  Dense d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) d[i][static_cast<std::size_t>(a.col_idx()[k])] = a.values()[k];
  }
  return d;
}

inline std::vector<double> matvec(const Dense& a, const std::vector<double>& x) {
  std::vector<double> y(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += a[i][j] * x[j];
  }
  return y;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

// Textbook dense Cholesky; throws if the matrix is not positive definite.
inline std::vector<double> cholesky_solve(Dense a, std::vector<double> b) {
  const std::size_t n = a.size();
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j][j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j][k] * a[j][k];
    if (!(d > 0.0)) throw std::runtime_error("not positive definite");
    a[j][j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i][k] * a[j][k];
      a[i][j] = s / a[j][j];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) b[i] -= a[i][k] * b[k];
    b[i] /= a[i][i];
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) b[i] -= a[k][i] * b[k];
    b[i] /= a[i][i];
  }
  return b;
}

// Cyclic Jacobi eigenvalues of a symmetric matrix, ascending.
inline std::vector<double> eigenvalues(Dense a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
    if (off < 1e-26) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  std::sort(ev.begin(), ev.end());
  return ev;
}

// Seven-point degree-5 Gauss rule on a triangle.
inline double gauss7(const std::function<double(Point)>& f, Point a, Point b, Point c) {
  static const double w[7] = {0.225, 0.125939180544827, 0.125939180544827, 0.125939180544827,
                              0.132394152788506, 0.132394152788506, 0.132394152788506};
  static const double l[7][3] = {{1.0 / 3, 1.0 / 3, 1.0 / 3},
                                 {0.797426985353087, 0.101286507323456, 0.101286507323456},
                                 {0.101286507323456, 0.797426985353087, 0.101286507323456},
                                 {0.101286507323456, 0.101286507323456, 0.797426985353087},
                                 {0.059715871789770, 0.470142064105115, 0.470142064105115},
                                 {0.470142064105115, 0.059715871789770, 0.470142064105115},
                                 {0.470142064105115, 0.470142064105115, 0.059715871789770}};
  const double area = 0.5 * std::abs((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
  double s = 0.0;
  for (int q = 0; q < 7; ++q) {
    const Point p{l[q][0] * a.x + l[q][1] * b.x + l[q][2] * c.x, l[q][0] * a.y + l[q][1] * b.y + l[q][2] * c.y};
    s += w[q] * f(p);
  }
  return s * area;
}

// Gradients of the three barycentric coordinates of a triangle.
inline std::array<std::array<double, 2>, 3> gradients(Point a, Point b, Point c) {
  const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
  return {{{(b.y - c.y) / det, (c.x - b.x) / det}, {(c.y - a.y) / det, (a.x - c.x) / det},
           {(a.y - b.y) / det, (b.x - a.x) / det}}};
}

// Dense stiffness (coefficient per triangle) and mass by explicit element loops.
inline Dense stiffness(const numhom::FineMesh& mesh, const std::vector<double>& a, double screening = 0.0) {
  const std::size_t n = mesh.dof_count();
  Dense k(n, std::vector<double>(n, 0.0));
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto tri = mesh.triangle(static_cast<int>(t));
    const Point p[3] = {mesh.node(tri[0]), mesh.node(tri[1]), mesh.node(tri[2])};
    const auto g = gradients(p[0], p[1], p[2]);
    const double area = 0.5 * std::abs((p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y));
    for (int i = 0; i < 3; ++i) {
      const int di = mesh.dof_of_node(tri[static_cast<std::size_t>(i)]);
      if (di < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const int dj = mesh.dof_of_node(tri[static_cast<std::size_t>(j)]);
        if (dj < 0) continue;
        const double gg = g[static_cast<std::size_t>(i)][0] * g[static_cast<std::size_t>(j)][0] +
                          g[static_cast<std::size_t>(i)][1] * g[static_cast<std::size_t>(j)][1];
        k[static_cast<std::size_t>(di)][static_cast<std::size_t>(dj)] +=
            a[t] * area * gg + screening * area / 12.0 * (i == j ? 2.0 : 1.0);
      }
    }
  }
  return k;
}

// Vertex-connected component labels of the marked triangles (BFS).
inline std::vector<int> components(const numhom::FineMesh& mesh, const std::vector<char>& marked) {
  const std::size_t nt = mesh.triangle_count();
  std::vector<std::vector<int>> by_node(mesh.node_count());
  for (std::size_t t = 0; t < nt; ++t)
    for (int v : mesh.triangle(static_cast<int>(t))) by_node[static_cast<std::size_t>(v)].push_back(static_cast<int>(t));
  std::vector<int> label(nt, -1);
  int next = 0;
  for (std::size_t s = 0; s < nt; ++s) {
    if (!marked[s] || label[s] >= 0) continue;
    std::vector<int> queue{static_cast<int>(s)};
    label[s] = next;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      for (int v : mesh.triangle(queue[q])) {
        for (int u : by_node[static_cast<std::size_t>(v)]) {
          if (marked[static_cast<std::size_t>(u)] && label[static_cast<std::size_t>(u)] < 0) {
            label[static_cast<std::size_t>(u)] = next;
            queue.push_back(u);
          }
        }
      }
    }
    ++next;
  }
  return label;
}

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  std::vector<double> vector(std::size_t n, double lo = -1.0, double hi = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }
  // Log-uniform per-triangle conductivity in [lo, hi].
  numhom::CoefficientField field(const numhom::FineMesh& mesh, double lo = 0.1, double hi = 10.0) {
    std::vector<double> v(mesh.triangle_count());
    for (auto& x : v) x = std::exp(uniform(std::log(lo), std::log(hi)));
    return numhom::CoefficientField(mesh.cells_per_axis(), std::move(v));
  }
};

}  // namespace oracle
