#include <doctest.h>

#include <cmath>
#include <numbers>

#include "numhom/error.hpp"
#include "numhom/evolve.hpp"
#include "oracles.hpp"

using namespace numhom;

namespace {

double sin_source(Point p) { return std::sin(std::numbers::pi * p.x) * std::sin(std::numbers::pi * p.y); }

struct Fixture {
  FineMesh mesh{32};
  CoefficientField coeff = gen_trig(mesh);
  CoarseBasis coarse = build_coarse_basis(mesh, CoarseLattice(mesh, 0.25));
  LocalizedBasis basis;
  std::unique_ptr<CoarseOperatorSet> ops;

  Fixture() {
    BasisRecipe r;
    r.radius = LengthRule::parse("3h");
    basis = build_basis(mesh, coeff, coarse, r);
    ops = std::make_unique<CoarseOperatorSet>(basis, coeff);
  }
};

double m_norm(const DiscreteOperators& ops, const std::vector<double>& c) {
  return std::sqrt(oracle::dot(c, ops.apply_mass(c)));
}

double energy_error(const SparseMatrix& k, const std::vector<double>& u, const std::vector<double>& v) {
  std::vector<double> d(u.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = u[i] - v[i];
  return k.quadratic_form(d);
}

}  // namespace

TEST_CASE("time grid") {
  const TimeGrid g = TimeGrid::make(1.0, 0.01);
  CHECK(g.steps == 100);
  CHECK(g.time(100) == doctest::Approx(1.0));
  CHECK_THROWS_AS(TimeGrid::make(1.0, 0.3), InvalidArgument);
  CHECK_THROWS_AS(TimeGrid::make(1.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(TimeGrid::make(-1.0, 0.1), InvalidArgument);
}

TEST_CASE("coarse operators") {
  Fixture f;
  const auto& k = f.ops->stiffness();
  const auto& m = f.ops->mass();
  CHECK((k - k.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(k.selfadjointView<Eigen::Lower>().eigenvalues().minCoeff() > 0.0);
  CHECK(m.selfadjointView<Eigen::Lower>().eigenvalues().minCoeff() > 0.0);
  // K_c = Psi^T K Psi against the fine assembly
  const SparseMatrix fine_k = assemble_stiffness(f.mesh, f.coeff);
  for (std::size_t i = 0; i < f.basis.size(); i += 7) {
    const auto pi = f.basis.function(i).coeffs;
    for (std::size_t j = 0; j < f.basis.size(); j += 5) {
      const auto pj = f.basis.function(j).coeffs;
      const double expect = oracle::dot(pi, fine_k.multiply(pj));
      CHECK(k(static_cast<int>(i), static_cast<int>(j)) == doctest::Approx(expect).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("elliptic Galerkin solutions") {
  Fixture f;
  const auto load = assemble_load(f.mesh, sin_source);
  const FineOperatorSet fine(f.mesh, f.coeff);
  const EllipticSolution u = galerkin_elliptic(fine, load);
  const SparseMatrix k = assemble_stiffness(f.mesh, f.coeff);
  CHECK(relative_residual(k, u.fine.coeffs, load) < 1e-10);

  // the fine operator set with the identity basis is the fine solve
  std::vector<SparseVector> identity(f.mesh.dof_count());
  for (std::size_t d = 0; d < identity.size(); ++d) identity[d] = {{static_cast<int>(d)}, {1.0}};
  const CoarseOperatorSet id_ops(f.mesh, f.coeff, identity);
  CHECK(oracle::max_abs_diff(galerkin_elliptic(id_ops, load).fine.coeffs, u.fine.coeffs) <= 1e-10);

  const FineOperatorSet cg(f.mesh, f.coeff, true, {SolverMethod::Cg, 1e-12, 5000});
  CHECK(oracle::max_abs_diff(galerkin_elliptic(cg, load).fine.coeffs, u.fine.coeffs) <= 1e-9);

  const std::vector<double> zero(f.mesh.dof_count(), 0.0);
  for (double v : galerkin_elliptic(*f.ops, zero).fine.coeffs) CHECK(v == 0.0);

  // Galerkin optimality in the energy norm
  const EllipticSolution uh = galerkin_elliptic(*f.ops, load);
  const double best = energy_error(k, u.fine.coeffs, uh.fine.coeffs);
  oracle::Gen gen(17);
  for (int trial = 0; trial < 50; ++trial) {
    auto c = uh.coeffs;
    const double scale = std::pow(10.0, gen.uniform(-6.0, 0.0));
    for (double& x : c) x += scale * gen.uniform(-1.0, 1.0);
    const auto v = f.ops->prolong(c);
    CHECK(best <= energy_error(k, u.fine.coeffs, v) * (1 + 1e-12));
  }
}

TEST_CASE("implicit Euler") {
  Fixture f;
  const TimeGrid grid = TimeGrid::make(1.0, 0.1);
  const Trajectory none = parabolic_implicit_euler(*f.ops, Forcing::none(), grid);
  CHECK(none.states.size() == 11);
  for (const auto& s : none.states)
    for (double v : s) CHECK(v == 0.0);

  const Trajectory steady = parabolic_implicit_euler(*f.ops, Forcing::steady(sin_source), TimeGrid::make(25.0, 0.5));
  const EllipticSolution target = galerkin_elliptic(*f.ops, assemble_load(f.mesh, sin_source));
  const FEFunction last(f.mesh, f.ops->prolong(steady.final_state()));
  CHECK(error_report(target.fine, last).rel_h1 < 0.05);

  oracle::Gen gen(4);
  const auto c0 = gen.vector(f.ops->dimension());
  for (double dt : {1e-3, 1.0, 100.0}) {
    const Trajectory t = parabolic_implicit_euler(*f.ops, Forcing::none(), TimeGrid::make(20 * dt, dt), c0);
    for (std::size_t n = 1; n < t.states.size(); ++n) {
      CHECK(m_norm(*f.ops, t.states[n]) <= m_norm(*f.ops, t.states[n - 1]) * (1 + 1e-12));
    }
  }
}

TEST_CASE("Newmark wave") {
  Fixture f;
  const Trajectory none = wave_newmark(*f.ops, Forcing::none(), TimeGrid::make(0.5, 0.05));
  for (const auto& s : none.states)
    for (double v : s) CHECK(v == 0.0);

  oracle::Gen gen(8);
  const auto u0 = gen.vector(f.ops->dimension());
  const auto v0 = gen.vector(f.ops->dimension());
  const Trajectory free = wave_newmark(*f.ops, Forcing::none(), TimeGrid::make(10.0, 0.01), u0, v0);
  REQUIRE(free.states.size() == 1001);
  const double e0 = wave_energy(*f.ops, u0, v0);
  double drift = 0.0;
  for (std::size_t n = 0; n < free.states.size(); ++n) {
    drift = std::max(drift, std::abs(wave_energy(*f.ops, free.states[n], free.velocities[n]) - e0) / e0);
  }
  CHECK(drift < 1e-8);

  const Forcing g = Forcing::separable(sin_source, [](double t) { return std::cos(3.0 * t); });
  const Trajectory forced = wave_newmark(*f.ops, g, TimeGrid::make(2.0, 0.01));
  const double gained = wave_energy(*f.ops, forced.final_state(), forced.velocities.back());
  const double work = wave_work(*f.ops, g, forced);
  CHECK(gained > 0.0);
  CHECK(std::abs(gained - work) <= 1e-6 * std::max(1.0, std::abs(work)));

  const Trajectory sparse = wave_newmark(*f.ops, g, TimeGrid::make(2.0, 0.01), {}, {}, 50);
  CHECK(sparse.states.size() == 5);
  CHECK(sparse.states.back() == forced.states.back());
}

TEST_CASE("error reports") {
  const FineMesh mesh(16);
  const FEFunction u = interpolate(mesh, sin_source);
  const ErrorReport same = error_report(u, u);
  CHECK(same.rel_l2 == 0.0);
  CHECK(same.rel_h1 == 0.0);
  CHECK(same.rel_linf == 0.0);
  auto twice = u.coeffs;
  for (double& v : twice) v *= 2.0;
  const ErrorReport dbl = error_report(u, FEFunction(mesh, twice));
  CHECK(dbl.rel_l2 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dbl.rel_h1 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dbl.rel_linf == doctest::Approx(1.0).epsilon(1e-14));

  const std::vector<double> times{0.0, 0.3, 0.5, 1.5};
  const std::vector<std::vector<double>> steady(times.size(), u.coeffs);
  CHECK(space_time_h1(mesh, times, steady) == doctest::Approx(std::sqrt(1.5) * h1_seminorm(mesh, u.coeffs)));
  const std::vector<std::vector<double>> doubled(times.size(), twice);
  const ErrorReport traj = error_report(mesh, times, steady, doubled);
  CHECK(*traj.rel_space_time_h1 == doctest::Approx(1.0));
  CHECK_THROWS_AS(error_report(mesh, times, steady, {twice}), InvalidArgument);
}
