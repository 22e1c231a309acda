#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "numhom/fem.hpp"
#include "numhom/locbasis.hpp"

namespace numhom {

/// Solver for one fixed SPD combination of mass and stiffness.
class LinearSolve {
 public:
  virtual ~LinearSolve() = default;
  virtual std::vector<double> solve(std::span<const double> b) const = 0;
};

/// Mass, stiffness, load projection and prolongation of a Galerkin space.
class DiscreteOperators {
 public:
  virtual ~DiscreteOperators() = default;
  virtual std::size_t dimension() const = 0;
  virtual const FineMesh& mesh() const = 0;
  virtual std::vector<double> apply_mass(std::span<const double> x) const = 0;
  virtual std::vector<double> apply_stiffness(std::span<const double> x) const = 0;
  /// Factorization of mass_weight*M + stiffness_weight*K.
  virtual std::unique_ptr<LinearSolve> factor(double mass_weight, double stiffness_weight) const = 0;
  /// Galerkin load from a fine interior load vector.
  virtual std::vector<double> project(std::span<const double> fine_load) const = 0;
  /// Fine interior dof values of a coefficient vector.
  virtual std::vector<double> prolong(std::span<const double> coeffs) const = 0;
};

/// K_c = Psi^T K Psi and M_c = Psi^T M Psi for basis functions Psi.
class CoarseOperatorSet final : public DiscreteOperators {
 public:
  CoarseOperatorSet(const FineMesh& mesh, const CoefficientField& coeff, std::vector<SparseVector> basis,
                    bool weight_by_density = true);
  CoarseOperatorSet(const LocalizedBasis& basis, const CoefficientField& coeff, bool weight_by_density = true);

  std::size_t dimension() const override { return basis_.size(); }
  const FineMesh& mesh() const override { return *mesh_; }
  std::vector<double> apply_mass(std::span<const double> x) const override;
  std::vector<double> apply_stiffness(std::span<const double> x) const override;
  std::unique_ptr<LinearSolve> factor(double mass_weight, double stiffness_weight) const override;
  std::vector<double> project(std::span<const double> fine_load) const override;
  std::vector<double> prolong(std::span<const double> coeffs) const override;

  const Eigen::MatrixXd& stiffness() const noexcept { return k_; }
  const Eigen::MatrixXd& mass() const noexcept { return m_; }
  const std::vector<SparseVector>& basis() const noexcept { return basis_; }

 private:
  const FineMesh* mesh_;
  std::vector<SparseVector> basis_;
  Eigen::MatrixXd k_;
  Eigen::MatrixXd m_;
};

/// The fine P1 space itself (Psi = identity), solved by sparse Cholesky or PCG.
class FineOperatorSet final : public DiscreteOperators {
 public:
  FineOperatorSet(const FineMesh& mesh, const CoefficientField& coeff, bool weight_by_density = true,
                  SolverConfig solver = {SolverMethod::Direct, 1e-10, 20000});

  std::size_t dimension() const override { return mesh_->dof_count(); }
  const FineMesh& mesh() const override { return *mesh_; }
  std::vector<double> apply_mass(std::span<const double> x) const override;
  std::vector<double> apply_stiffness(std::span<const double> x) const override;
  std::unique_ptr<LinearSolve> factor(double mass_weight, double stiffness_weight) const override;
  std::vector<double> project(std::span<const double> fine_load) const override;
  std::vector<double> prolong(std::span<const double> coeffs) const override;

  const SparseMatrix& stiffness() const noexcept { return k_; }
  const SparseMatrix& mass() const noexcept { return m_; }

 private:
  const FineMesh* mesh_;
  SolverConfig solver_;
  SparseMatrix k_;
  SparseMatrix m_;
};

struct TimeGrid {
  double dt = 0.0;
  int steps = 0;
  double t_end = 0.0;

  /// Requires t_end/dt to be an integer up to rounding.
  static TimeGrid make(double t_end, double dt);
  double time(int n) const { return n * dt; }
};

/// Source term g(x, t). Separable sources g = shape(x)*amplitude(t) are
/// assembled once; general ones at every evaluation time.
struct Forcing {
  std::function<double(Point)> shape;
  std::function<double(double)> amplitude;
  std::function<double(Point, double)> general;

  static Forcing none();
  static Forcing steady(std::function<double(Point)> g);
  static Forcing separable(std::function<double(Point)> g, std::function<double(double)> a);
  static Forcing space_time(std::function<double(Point, double)> g);
  bool is_zero() const { return !shape && !general; }
};

/// Projected loads of a forcing on a given operator set.
class LoadSampler {
 public:
  LoadSampler(const DiscreteOperators& ops, const Forcing& forcing);
  std::vector<double> at(double t) const;

 private:
  const DiscreteOperators* ops_;
  const Forcing* forcing_;
  std::vector<double> shape_load_;
};

/// States are coefficient vectors in the operator basis, one per stored time.
struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::vector<std::vector<double>> velocities;  // wave only

  const std::vector<double>& final_state() const { return states.back(); }
};

struct EllipticSolution {
  std::vector<double> coeffs;
  FEFunction fine;
};

/// Solves K c = P(b) and prolongs.
EllipticSolution galerkin_elliptic(const DiscreteOperators& ops, std::span<const double> fine_load);

/// Implicit Euler: (M + dt K) c^{n+1} = M c^n + dt P(g(t_n + dt/2)).
/// A nonzero initial state is for tests; the model problem starts from rest.
Trajectory parabolic_implicit_euler(const DiscreteOperators& ops, const Forcing& forcing, const TimeGrid& grid,
                                    std::vector<double> initial = {}, int save_every = 1);

/// Newmark average acceleration (beta = 1/4, gamma = 1/2) for M c'' + K c = P(g).
Trajectory wave_newmark(const DiscreteOperators& ops, const Forcing& forcing, const TimeGrid& grid,
                        std::vector<double> u0 = {}, std::vector<double> v0 = {}, int save_every = 1);

/// 1/2 v^T M v + 1/2 u^T K u.
double wave_energy(const DiscreteOperators& ops, std::span<const double> u, std::span<const double> v);

/// Sum over steps of (u_{n+1} - u_n) . (f_n + f_{n+1}) / 2 for a stored-every-step trajectory.
double wave_work(const DiscreteOperators& ops, const Forcing& forcing, const Trajectory& traj);

struct ErrorReport {
  double rel_l2 = 0.0;
  double rel_h1 = 0.0;
  double rel_linf = 0.0;
  double ref_l2 = 0.0;
  double ref_h1 = 0.0;
  double ref_linf = 0.0;
  std::optional<double> rel_space_time_h1;
  double seconds = 0.0;
  int iterations = 0;
};

ErrorReport error_report(const FEFunction& reference, const FEFunction& candidate);

/// Final-time errors plus the relative L2(0,T;H1) error by the trapezoidal
/// rule; both sequences hold fine interior values at the same times.
ErrorReport error_report(const FineMesh& mesh, const std::vector<double>& times,
                         const std::vector<std::vector<double>>& reference,
                         const std::vector<std::vector<double>>& candidate);

/// L2(0,T;H1-seminorm) of a fine trajectory by the trapezoidal rule.
double space_time_h1(const FineMesh& mesh, const std::vector<double>& times,
                     const std::vector<std::vector<double>>& states);

}  // namespace numhom
