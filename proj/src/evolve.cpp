#include "numhom/evolve.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "numhom/error.hpp"

namespace numhom {

namespace {

Eigen::SparseMatrix<double> to_eigen(const SparseMatrix& a) {
  const auto n = static_cast<Eigen::Index>(a.dimension());
  Eigen::Map<const Eigen::SparseMatrix<double, Eigen::RowMajor, int>> view(
      n, n, static_cast<Eigen::Index>(a.nonzeros()), a.row_ptr().data(), a.col_idx().data(), a.values().data());
  return Eigen::SparseMatrix<double>(view);
}

class DenseSolve final : public LinearSolve {
 public:
  explicit DenseSolve(const Eigen::MatrixXd& a) : llt_(a) {
    if (llt_.info() != Eigen::Success) {
      throw SolverError("coarse operator is not positive definite", std::numeric_limits<double>::quiet_NaN(), 0);
    }
  }
  std::vector<double> solve(std::span<const double> b) const override {
    Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
    const Eigen::VectorXd x = llt_.solve(rhs);
    return {x.data(), x.data() + x.size()};
  }

 private:
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

class SparseSolve final : public LinearSolve {
 public:
  explicit SparseSolve(const SparseMatrix& a) : solver_(a) {}
  std::vector<double> solve(std::span<const double> b) const override { return solver_.solve(b); }

 private:
  DirectSolver solver_;
};

class IterativeSolve final : public LinearSolve {
 public:
  IterativeSolve(SparseMatrix a, const SolverConfig& cfg) : a_(std::move(a)), cfg_(cfg) {}
  std::vector<double> solve(std::span<const double> b) const override { return solve_spd(a_, b, cfg_); }

 private:
  SparseMatrix a_;
  SolverConfig cfg_;
};

std::vector<double> fine_density(const FineMesh& mesh, const CoefficientField& coeff, bool weighted) {
  if (weighted) return {coeff.density().begin(), coeff.density().end()};
  return std::vector<double>(mesh.triangle_count(), 1.0);
}

// Dense Psi^T A Psi, column block by column block.
void galerkin_dense(const SparseMatrix& k, const SparseMatrix& m, const std::vector<SparseVector>& basis,
                    Eigen::MatrixXd& kc, Eigen::MatrixXd& mc) {
  const auto dofs = static_cast<Eigen::Index>(k.dimension());
  const auto nb = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(dofs, nb);
  for (Eigen::Index j = 0; j < nb; ++j) {
    const auto& f = basis[static_cast<std::size_t>(j)];
    for (std::size_t q = 0; q < f.index.size(); ++q) psi(f.index[q], j) = f.value[q];
  }
  const Eigen::SparseMatrix<double> ke = to_eigen(k);
  const Eigen::SparseMatrix<double> me = to_eigen(m);
  constexpr Eigen::Index block = 64;
  for (Eigen::Index j0 = 0; j0 < nb; j0 += block) {
    const Eigen::Index w = std::min(block, nb - j0);
    const Eigen::MatrixXd kp = ke * psi.middleCols(j0, w);
    kc.middleCols(j0, w).noalias() = psi.transpose() * kp;
    const Eigen::MatrixXd mp = me * psi.middleCols(j0, w);
    mc.middleCols(j0, w).noalias() = psi.transpose() * mp;
  }
}

void galerkin_sparse(const SparseMatrix& k, const SparseMatrix& m, const std::vector<SparseVector>& basis,
                     Eigen::MatrixXd& kc, Eigen::MatrixXd& mc) {
  const auto dofs = static_cast<Eigen::Index>(k.dimension());
  const auto nb = static_cast<Eigen::Index>(basis.size());
  std::vector<Eigen::Triplet<double>> trip;
  for (Eigen::Index j = 0; j < nb; ++j) {
    const auto& f = basis[static_cast<std::size_t>(j)];
    for (std::size_t q = 0; q < f.index.size(); ++q) trip.emplace_back(f.index[q], static_cast<int>(j), f.value[q]);
  }
  Eigen::SparseMatrix<double> psi(dofs, nb);
  psi.setFromTriplets(trip.begin(), trip.end());
  const Eigen::SparseMatrix<double> psit = psi.transpose();
  const Eigen::SparseMatrix<double> kp = to_eigen(k) * psi;
  const Eigen::SparseMatrix<double> mp = to_eigen(m) * psi;
  kc = Eigen::MatrixXd(psit * kp);
  mc = Eigen::MatrixXd(psit * mp);
}

}  // namespace

CoarseOperatorSet::CoarseOperatorSet(const FineMesh& mesh, const CoefficientField& coeff,
                                     std::vector<SparseVector> basis, bool weight_by_density)
    : mesh_(&mesh), basis_(std::move(basis)) {
  if (basis_.empty()) throw InvalidArgument("coarse operators need at least one basis function");
  for (const auto& f : basis_) {
    for (int d : f.index) {
      if (d < 0 || static_cast<std::size_t>(d) >= mesh.dof_count()) {
        throw InvalidArgument("basis function index outside the mesh");
      }
    }
  }
  const SparseMatrix k = assemble_stiffness(mesh, coeff);
  const SparseMatrix m = assemble_mass(mesh, fine_density(mesh, coeff, weight_by_density));
  const auto nb = static_cast<Eigen::Index>(basis_.size());
  k_.resize(nb, nb);
  m_.resize(nb, nb);
  std::size_t nnz = 0;
  for (const auto& f : basis_) nnz += f.size();
  const double fill = static_cast<double>(nnz) / (static_cast<double>(mesh.dof_count()) * static_cast<double>(nb));
  if (fill > 0.05) {
    galerkin_dense(k, m, basis_, k_, m_);
  } else {
    galerkin_sparse(k, m, basis_, k_, m_);
  }
  k_ = 0.5 * (k_ + k_.transpose()).eval();
  m_ = 0.5 * (m_ + m_.transpose()).eval();
}

CoarseOperatorSet::CoarseOperatorSet(const LocalizedBasis& basis, const CoefficientField& coeff,
                                     bool weight_by_density)
    : CoarseOperatorSet(*basis.mesh, coeff, basis.functions, weight_by_density) {}

std::vector<double> CoarseOperatorSet::apply_mass(std::span<const double> x) const {
  Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::VectorXd y = m_ * v;
  return {y.data(), y.data() + y.size()};
}

std::vector<double> CoarseOperatorSet::apply_stiffness(std::span<const double> x) const {
  Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::VectorXd y = k_ * v;
  return {y.data(), y.data() + y.size()};
}

std::unique_ptr<LinearSolve> CoarseOperatorSet::factor(double mass_weight, double stiffness_weight) const {
  return std::make_unique<DenseSolve>(mass_weight * m_ + stiffness_weight * k_);
}

std::vector<double> CoarseOperatorSet::project(std::span<const double> fine_load) const {
  if (fine_load.size() != mesh_->dof_count()) throw InvalidArgument("load does not match the fine mesh");
  std::vector<double> out(basis_.size());
  for (std::size_t i = 0; i < basis_.size(); ++i) out[i] = basis_[i].dot(fine_load);
  return out;
}

std::vector<double> CoarseOperatorSet::prolong(std::span<const double> coeffs) const {
  if (coeffs.size() != basis_.size()) throw InvalidArgument("coefficient vector does not match the basis");
  std::vector<double> out(mesh_->dof_count(), 0.0);
  for (std::size_t i = 0; i < basis_.size(); ++i) basis_[i].scatter(out, coeffs[i]);
  return out;
}

FineOperatorSet::FineOperatorSet(const FineMesh& mesh, const CoefficientField& coeff, bool weight_by_density,
                                 SolverConfig solver)
    : mesh_(&mesh),
      solver_(solver),
      k_(assemble_stiffness(mesh, coeff)),
      m_(assemble_mass(mesh, fine_density(mesh, coeff, weight_by_density))) {}

std::vector<double> FineOperatorSet::apply_mass(std::span<const double> x) const { return m_.multiply(x); }
std::vector<double> FineOperatorSet::apply_stiffness(std::span<const double> x) const { return k_.multiply(x); }

std::unique_ptr<LinearSolve> FineOperatorSet::factor(double mass_weight, double stiffness_weight) const {
  SparseMatrix a = m_.combine(mass_weight, k_, stiffness_weight);
  if (solver_.method == SolverMethod::Cg) return std::make_unique<IterativeSolve>(std::move(a), solver_);
  return std::make_unique<SparseSolve>(a);
}

std::vector<double> FineOperatorSet::project(std::span<const double> fine_load) const {
  return {fine_load.begin(), fine_load.end()};
}

std::vector<double> FineOperatorSet::prolong(std::span<const double> coeffs) const {
  return {coeffs.begin(), coeffs.end()};
}

TimeGrid TimeGrid::make(double t_end, double dt) {
  if (!(dt > 0.0) || !(t_end > 0.0)) throw InvalidArgument("time step and final time must be positive");
  const double ratio = t_end / dt;
  const double steps = std::round(ratio);
  if (std::abs(ratio - steps) > 1e-9 * std::max(1.0, ratio) || steps < 1.0) {
    throw InvalidArgument("final time is not an integer multiple of the time step");
  }
  return {t_end / steps, static_cast<int>(steps), t_end};
}

Forcing Forcing::none() { return {}; }

Forcing Forcing::steady(std::function<double(Point)> g) {
  return separable(std::move(g), [](double) { return 1.0; });
}

Forcing Forcing::separable(std::function<double(Point)> g, std::function<double(double)> a) {
  Forcing f;
  f.shape = std::move(g);
  f.amplitude = std::move(a);
  return f;
}

Forcing Forcing::space_time(std::function<double(Point, double)> g) {
  Forcing f;
  f.general = std::move(g);
  return f;
}

LoadSampler::LoadSampler(const DiscreteOperators& ops, const Forcing& forcing) : ops_(&ops), forcing_(&forcing) {
  if (forcing.shape) shape_load_ = ops.project(assemble_load(ops.mesh(), forcing.shape));
}

std::vector<double> LoadSampler::at(double t) const {
  if (forcing_->shape) {
    const double a = forcing_->amplitude ? forcing_->amplitude(t) : 1.0;
    std::vector<double> out(shape_load_);
    for (double& v : out) v *= a;
    return out;
  }
  if (forcing_->general) {
    const auto& g = forcing_->general;
    return ops_->project(assemble_load(ops_->mesh(), [&g, t](Point p) { return g(p, t); }));
  }
  return std::vector<double>(ops_->dimension(), 0.0);
}

EllipticSolution galerkin_elliptic(const DiscreteOperators& ops, std::span<const double> fine_load) {
  const std::vector<double> b = ops.project(fine_load);
  const std::vector<double> c = ops.factor(0.0, 1.0)->solve(b);
  return {c, FEFunction(ops.mesh(), ops.prolong(c))};
}

namespace {

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

std::vector<double> initial_vector(std::vector<double> v, std::size_t dim, const char* what) {
  if (v.empty()) return std::vector<double>(dim, 0.0);
  if (v.size() != dim) throw InvalidArgument(std::string(what) + " does not match the operator dimension");
  return v;
}

}  // namespace

Trajectory parabolic_implicit_euler(const DiscreteOperators& ops, const Forcing& forcing, const TimeGrid& grid,
                                    std::vector<double> initial, int save_every) {
  if (grid.steps < 1 || !(grid.dt > 0.0)) throw InvalidArgument("time grid has no steps");
  if (save_every < 1) throw InvalidArgument("snapshot stride must be at least 1");
  const std::size_t dim = ops.dimension();
  std::vector<double> c = initial_vector(std::move(initial), dim, "initial state");
  const LoadSampler load(ops, forcing);
  const auto solver = ops.factor(1.0, grid.dt);
  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(c);
  for (int n = 0; n < grid.steps; ++n) {
    std::vector<double> rhs = ops.apply_mass(c);
    if (!forcing.is_zero()) axpy(grid.dt, load.at(grid.time(n) + 0.5 * grid.dt), rhs);
    try {
      c = solver->solve(rhs);
    } catch (const SolverError& e) {
      throw SolverError("parabolic step " + std::to_string(n + 1) + ": " + e.what(), e.residual(), e.iterations());
    }
    if ((n + 1) % save_every == 0 || n + 1 == grid.steps) {
      traj.times.push_back(grid.time(n + 1));
      traj.states.push_back(c);
    }
  }
  return traj;
}

Trajectory wave_newmark(const DiscreteOperators& ops, const Forcing& forcing, const TimeGrid& grid,
                        std::vector<double> u0, std::vector<double> v0, int save_every) {
  if (grid.steps < 1 || !(grid.dt > 0.0)) throw InvalidArgument("time grid has no steps");
  if (save_every < 1) throw InvalidArgument("snapshot stride must be at least 1");
  constexpr double beta = 0.25;
  constexpr double gamma = 0.5;
  const double dt = grid.dt;
  const std::size_t dim = ops.dimension();
  std::vector<double> u = initial_vector(std::move(u0), dim, "initial displacement");
  std::vector<double> v = initial_vector(std::move(v0), dim, "initial velocity");
  const LoadSampler load(ops, forcing);
  const bool forced = !forcing.is_zero();

  // Initial acceleration from M a = f(0) - K u.
  std::vector<double> a(dim, 0.0);
  {
    std::vector<double> r = forced ? load.at(0.0) : std::vector<double>(dim, 0.0);
    const std::vector<double> ku = ops.apply_stiffness(u);
    axpy(-1.0, ku, r);
    if (std::any_of(r.begin(), r.end(), [](double x) { return x != 0.0; })) a = ops.factor(1.0, 0.0)->solve(r);
  }
  const auto solver = ops.factor(1.0, beta * dt * dt);

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(u);
  traj.velocities.push_back(v);
  std::vector<double> us(dim);
  std::vector<double> vs(dim);
  for (int n = 0; n < grid.steps; ++n) {
    for (std::size_t i = 0; i < dim; ++i) {
      us[i] = u[i] + dt * v[i] + dt * dt * (0.5 - beta) * a[i];
      vs[i] = v[i] + dt * (1.0 - gamma) * a[i];
    }
    std::vector<double> r = forced ? load.at(grid.time(n + 1)) : std::vector<double>(dim, 0.0);
    axpy(-1.0, ops.apply_stiffness(us), r);
    try {
      a = solver->solve(r);
    } catch (const SolverError& e) {
      throw SolverError("wave step " + std::to_string(n + 1) + ": " + e.what(), e.residual(), e.iterations());
    }
    for (std::size_t i = 0; i < dim; ++i) {
      u[i] = us[i] + beta * dt * dt * a[i];
      v[i] = vs[i] + gamma * dt * a[i];
    }
    if ((n + 1) % save_every == 0 || n + 1 == grid.steps) {
      traj.times.push_back(grid.time(n + 1));
      traj.states.push_back(u);
      traj.velocities.push_back(v);
    }
  }
  return traj;
}

double wave_energy(const DiscreteOperators& ops, std::span<const double> u, std::span<const double> v) {
  const std::vector<double> mv = ops.apply_mass(v);
  const std::vector<double> ku = ops.apply_stiffness(u);
  return 0.5 * std::inner_product(v.begin(), v.end(), mv.begin(), 0.0) +
         0.5 * std::inner_product(u.begin(), u.end(), ku.begin(), 0.0);
}

double wave_work(const DiscreteOperators& ops, const Forcing& forcing, const Trajectory& traj) {
  if (forcing.is_zero()) return 0.0;
  const LoadSampler load(ops, forcing);
  double w = 0.0;
  std::vector<double> f_prev = load.at(traj.times.front());
  for (std::size_t k = 1; k < traj.states.size(); ++k) {
    const std::vector<double> f_next = load.at(traj.times[k]);
    for (std::size_t i = 0; i < f_prev.size(); ++i) {
      w += (traj.states[k][i] - traj.states[k - 1][i]) * 0.5 * (f_prev[i] + f_next[i]);
    }
    f_prev = f_next;
  }
  return w;
}

ErrorReport error_report(const FEFunction& reference, const FEFunction& candidate) {
  const NormReport n = norms(candidate, &reference);
  const NormReport r = norms(reference);
  ErrorReport e;
  e.rel_l2 = *n.rel_l2;
  e.rel_h1 = *n.rel_h1;
  e.rel_linf = *n.rel_linf;
  e.ref_l2 = r.l2;
  e.ref_h1 = r.h1;
  e.ref_linf = r.linf;
  return e;
}

double space_time_h1(const FineMesh& mesh, const std::vector<double>& times,
                     const std::vector<std::vector<double>>& states) {
  if (times.size() != states.size() || times.empty()) throw InvalidArgument("trajectory times and states disagree");
  double acc = 0.0;
  double prev = std::pow(h1_seminorm(mesh, states.front()), 2);
  for (std::size_t k = 1; k < states.size(); ++k) {
    const double cur = std::pow(h1_seminorm(mesh, states[k]), 2);
    acc += 0.5 * (times[k] - times[k - 1]) * (prev + cur);
    prev = cur;
  }
  return std::sqrt(acc);
}

ErrorReport error_report(const FineMesh& mesh, const std::vector<double>& times,
                         const std::vector<std::vector<double>>& reference,
                         const std::vector<std::vector<double>>& candidate) {
  if (reference.size() != candidate.size() || reference.size() != times.size() || times.empty()) {
    throw InvalidArgument("trajectories must share their sample times");
  }
  ErrorReport e = error_report(FEFunction(mesh, reference.back()), FEFunction(mesh, candidate.back()));
  std::vector<std::vector<double>> diff(reference.size());
  for (std::size_t k = 0; k < reference.size(); ++k) {
    diff[k].resize(reference[k].size());
    for (std::size_t i = 0; i < diff[k].size(); ++i) diff[k][i] = candidate[k][i] - reference[k][i];
  }
  const double den = space_time_h1(mesh, times, reference);
  const double num = space_time_h1(mesh, times, diff);
  e.rel_space_time_h1 = den > 0.0 ? num / den : num;
  return e;
}

}  // namespace numhom
