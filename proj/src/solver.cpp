#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <limits>
#include <numeric>

#include "numhom/error.hpp"
#include "numhom/fem.hpp"

namespace numhom {

const char* to_string(SolverMethod method) {
  switch (method) {
    case SolverMethod::Cg: return "cg";
    case SolverMethod::Direct: return "direct";
  }
  return "unknown";
}

SolverMethod solver_method_from_string(const std::string& name) {
  if (name == "cg" || name == "pcg") return SolverMethod::Cg;
  if (name == "direct") return SolverMethod::Direct;
  throw InvalidArgument("unknown solver method '" + name + "'");
}

void SolverConfig::validate() const {
  if (!(tolerance > 0.0 && tolerance < 1.0)) throw InvalidArgument("solver tolerance must lie in (0, 1)");
  if (max_iterations < 1) throw InvalidArgument("solver needs at least one iteration");
}

namespace {

double norm2(std::span<const double> v) { return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0)); }

}  // namespace

double relative_residual(const SparseMatrix& a, std::span<const double> x, std::span<const double> b) {
  const std::vector<double> ax = a.multiply(x);
  double r = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) r += (b[i] - ax[i]) * (b[i] - ax[i]);
  const double nb = norm2(b);
  return nb > 0.0 ? std::sqrt(r) / nb : std::sqrt(r);
}

std::vector<double> solve_pcg(const SparseMatrix& a, std::span<const double> b, double tolerance, int max_iterations,
                              SolveStats* stats, std::span<const double> x0) {
  const std::size_t n = a.dimension();
  if (b.size() != n) throw InvalidArgument("right-hand side does not match the matrix");
  std::vector<double> x(n, 0.0);
  if (!x0.empty()) {
    if (x0.size() != n) throw InvalidArgument("initial guess does not match the matrix");
    x.assign(x0.begin(), x0.end());
  }
  const double nb = norm2(b);
  if (nb == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    if (stats) *stats = {0, 0.0};
    return x;
  }
  std::vector<double> inv_diag = a.diagonal();
  for (double& d : inv_diag) {
    if (!(d > 0.0)) throw InvalidArgument("matrix has a nonpositive diagonal entry");
    d = 1.0 / d;
  }
  std::vector<double> r(b.begin(), b.end());
  std::vector<double> ap(n);
  if (!x0.empty()) {
    a.multiply(x, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] -= ap[i];
  }
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  std::vector<double> p = z;
  double rz = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);
  double res = norm2(r) / nb;
  int it = 0;
  while (res > tolerance && it < max_iterations) {
    a.multiply(p, ap);
    const double pap = std::inner_product(p.begin(), p.end(), ap.begin(), 0.0);
    if (!(pap > 0.0)) throw SolverError("conjugate gradients broke down: matrix is not positive definite", res, it);
    const double alpha = rz / pap;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_next = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    ++it;
    res = norm2(r) / nb;
  }
  if (res > tolerance) {
    // The recurrence residual can drift; confirm with the true residual.
    res = relative_residual(a, x, b);
    if (res > tolerance) {
      throw SolverError("conjugate gradients did not converge in " + std::to_string(it) + " iterations", res, it);
    }
  }
  if (stats) *stats = {it, res};
  return x;
}

struct DirectSolver::Impl {
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> llt;
};

DirectSolver::DirectSolver(const SparseMatrix& a) : impl_(std::make_unique<Impl>()), matrix_(a), dim_(a.dimension()) {
  const auto n = static_cast<Eigen::Index>(dim_);
  // CSR of a symmetric matrix read as CSC is the same matrix.
  Eigen::Map<const Eigen::SparseMatrix<double, Eigen::ColMajor, int>> view(
      n, n, static_cast<Eigen::Index>(a.nonzeros()), a.row_ptr().data(), a.col_idx().data(), a.values().data());
  const Eigen::SparseMatrix<double> m = view;
  impl_->llt.compute(m);
  if (impl_->llt.info() != Eigen::Success) {
    throw SolverError("sparse Cholesky factorization failed: matrix is not positive definite",
                      std::numeric_limits<double>::quiet_NaN(), 0);
  }
}

DirectSolver::~DirectSolver() = default;
DirectSolver::DirectSolver(DirectSolver&&) noexcept = default;
DirectSolver& DirectSolver::operator=(DirectSolver&&) noexcept = default;

std::vector<double> DirectSolver::solve(std::span<const double> b, double tolerance, SolveStats* stats) const {
  if (b.size() != dim_) throw InvalidArgument("right-hand side does not match the factorized matrix");
  const auto n = static_cast<Eigen::Index>(dim_);
  Eigen::Map<const Eigen::VectorXd> rhs(b.data(), n);
  Eigen::VectorXd x = impl_->llt.solve(rhs);
  std::vector<double> out(x.data(), x.data() + n);
  double res = relative_residual(matrix_, out, b);
  int steps = 1;
  if (res > tolerance) {
    const std::vector<double> ax = matrix_.multiply(out);
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) r[i] = b[static_cast<std::size_t>(i)] - ax[static_cast<std::size_t>(i)];
    x += impl_->llt.solve(r);
    out.assign(x.data(), x.data() + n);
    res = relative_residual(matrix_, out, b);
    ++steps;
    if (res > tolerance) throw SolverError("direct solve missed the residual tolerance", res, steps);
  }
  if (stats) *stats = {steps, res};
  return out;
}

std::vector<double> solve_spd(const SparseMatrix& a, std::span<const double> b, const SolverConfig& cfg,
                              SolveStats* stats) {
  cfg.validate();
  if (cfg.method == SolverMethod::Direct) return DirectSolver(a).solve(b, cfg.tolerance, stats);
  return solve_pcg(a, b, cfg.tolerance, cfg.max_iterations, stats);
}

}  // namespace numhom
