#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "numhom/error.hpp"
#include "numhom/evolve.hpp"
#include "numhom/locbasis.hpp"
#include "oracles.hpp"

using namespace numhom;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

BasisRecipe recipe_of(BasisMode mode, const std::string& radius, const std::string& t) {
  BasisRecipe r;
  r.mode = mode;
  r.radius = LengthRule::parse(radius);
  r.screening = TimeRule::parse(t);
  return r;
}

double sin_source(Point p) { return std::sin(std::numbers::pi * p.x) * std::sin(std::numbers::pi * p.y); }

double elliptic_h1_error(const FineMesh& mesh, const CoefficientField& coeff, const LocalizedBasis& basis) {
  const auto load = assemble_load(mesh, sin_source);
  const FEFunction ref = galerkin_elliptic(FineOperatorSet(mesh, coeff), load).fine;
  const FEFunction got = galerkin_elliptic(CoarseOperatorSet(basis, coeff), load).fine;
  return error_report(ref, got).rel_h1;
}

}  // namespace

TEST_CASE("length and time rules") {
  CHECK(LengthRule::parse("log").evaluate(0.25, 0.5) == doctest::Approx(3.0 * 0.5 * std::log(4.0)));
  CHECK(LengthRule::parse("sqrt").evaluate(0.25, 0.9) == doctest::Approx(0.5 * std::log(4.0)));
  CHECK(LengthRule::parse("3h").evaluate(0.125, 0.5) == 0.375);
  CHECK(LengthRule::parse("h").evaluate(0.125, 0.5) == 0.125);
  CHECK(LengthRule::parse("fixed:0.4").evaluate(0.125, 0.5) == 0.4);
  CHECK(LengthRule::parse("0.4").evaluate(0.5, 0.5) == 0.4);
  CHECK(LengthRule::parse("whole").evaluate(0.5, 0.5) > 2.0 * std::sqrt(2.0));
  for (const char* s : {"log", "log:2", "log:2:0.25", "sqrt", "3h", "fixed:0.4", "whole"}) {
    const LengthRule r = LengthRule::parse(s);
    const LengthRule back = LengthRule::parse(r.to_string());
    CHECK(back.evaluate(0.125, 0.4) == r.evaluate(0.125, 0.4));
  }
  CHECK_THROWS_AS(LengthRule::parse("bananah"), InvalidArgument);
  CHECK_THROWS_AS(LengthRule::parse(""), InvalidArgument);

  CHECK(TimeRule::parse("default").evaluate(0.25, 0.5) == doctest::Approx(0.25));
  CHECK(TimeRule::parse("h2").evaluate(0.25, 0.5) == doctest::Approx(0.0625));
  CHECK(TimeRule::parse("sqrth").evaluate(0.25, 0.5) == doctest::Approx(0.5));
  CHECK(TimeRule::parse("h^3").evaluate(0.5, 0.5) == doctest::Approx(0.125));
  CHECK(TimeRule::parse("0.7").evaluate(0.5, 0.5) == 0.7);
  CHECK(std::isinf(TimeRule::parse("inf").evaluate(0.5, 0.5)));
  for (const char* s : {"default", "h", "h2", "sqrth", "h^1.5", "0.7", "inf"}) {
    const TimeRule r = TimeRule::parse(s);
    CHECK(TimeRule::parse(r.to_string()).evaluate(0.25, 0.3) == r.evaluate(0.25, 0.3));
  }
  CHECK_THROWS_AS(TimeRule::parse("soon"), InvalidArgument);
  CHECK(basis_mode_from_string(to_string(BasisMode::HighContrast)) == BasisMode::HighContrast);
  CHECK(patch_shape_from_string(to_string(PatchShape::Square)) == PatchShape::Square);
  CHECK_THROWS_AS(basis_mode_from_string("sparse"), InvalidArgument);
}

TEST_CASE("recipe validation") {
  BasisRecipe r;
  CHECK_NOTHROW(r.validate());
  r.alpha = 1.0;
  CHECK_THROWS_AS(r.validate(), InvalidArgument);
  r = BasisRecipe{};
  r.c1 = 0.0;
  CHECK_THROWS_AS(r.validate(), InvalidArgument);
  r = BasisRecipe{};
  r.threads = 0;
  CHECK_THROWS_AS(r.validate(), InvalidArgument);
  r = BasisRecipe{};
  r.screening = TimeRule::parse("-1");
  CHECK_THROWS_AS(r.validate(), InvalidArgument);
  r = BasisRecipe{};
  r.mode = BasisMode::HighContrast;
  r.contrast_threshold = 0.5;
  CHECK_THROWS_AS(r.validate(), InvalidArgument);
}

TEST_CASE("unit coefficient on the whole mesh reproduces phi") {
  const FineMesh mesh(16);
  const CoefficientField one = gen_constant(mesh, 1.0);
  const CoarseBasis coarse = build_coarse_basis(mesh, CoarseLattice(mesh, 0.25));
  const Subdomain all = extract_subdomain(mesh, {0, 0}, 3.0);
  for (std::size_t i = 0; i < coarse.size(); i += 5) {
    const FEFunction phi = coarse.function(i);
    const FEFunction psi = solve_screened_local(mesh, one, phi, all, kInf, {SolverMethod::Direct, 1e-12, 100});
    CHECK(oracle::max_abs_diff(psi.coeffs, phi.coeffs) <= 1e-10);
  }
  const LocalizedBasis global = build_basis(mesh, one, coarse, recipe_of(BasisMode::Global, "log", "default"));
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    CHECK(oracle::max_abs_diff(global.function(i).coeffs, coarse.function(i).coeffs) <= 1e-10);
    CHECK(global.info[i].whole_mesh);
    CHECK(std::isinf(global.info[i].screening_time));
  }
}

TEST_CASE("local solves match a dense oracle and grow with T") {
  const FineMesh mesh(16);
  oracle::Gen gen(3);
  const CoefficientField coeff = gen.field(mesh, 0.2, 5.0);
  const CoarseBasis coarse = build_coarse_basis(mesh, CoarseLattice(mesh, 0.25));
  const FEFunction phi = coarse.function(coarse.size() / 2);
  const Subdomain sub = extract_subdomain(mesh, coarse.supports[coarse.size() / 2].center, 0.9);
  const auto lap = oracle::stiffness(mesh, std::vector<double>(mesh.triangle_count(), 1.0));
  const auto rhs = oracle::matvec(lap, phi.coeffs);
  double previous = 0.0;
  for (double T : {0.01, 0.1, 1.0, 10.0, kInf}) {
    const FEFunction psi = solve_screened_local(mesh, coeff, phi, sub, T, {SolverMethod::Direct, 1e-12, 100});
    // oracle: restrict the dense screened operator to the subdomain dofs
    const auto full = oracle::stiffness(mesh, {coeff.values().begin(), coeff.values().end()}, std::isinf(T) ? 0.0 : 1.0 / T);
    const auto parent = sub.local_to_parent();
    oracle::Dense a(parent.size(), std::vector<double>(parent.size()));
    std::vector<double> b(parent.size());
    for (std::size_t i = 0; i < parent.size(); ++i) {
      b[i] = rhs[static_cast<std::size_t>(parent[i])];
      for (std::size_t j = 0; j < parent.size(); ++j)
        a[i][j] = full[static_cast<std::size_t>(parent[i])][static_cast<std::size_t>(parent[j])];
    }
    const auto x = oracle::cholesky_solve(a, b);
    std::vector<double> expect(mesh.dof_count(), 0.0);
    for (std::size_t i = 0; i < parent.size(); ++i) expect[static_cast<std::size_t>(parent[i])] = x[i];
    CHECK(oracle::max_abs_diff(psi.coeffs, expect) <= 1e-10 * std::max(1.0, oracle::max_abs(expect)));
    for (std::size_t d = 0; d < psi.coeffs.size(); ++d) {
      if (sub.local_of(static_cast<int>(d)) < 0) CHECK(psi.coeffs[d] == 0.0);
    }
    const double norm = l2_norm(mesh, psi.coeffs);
    CHECK(norm >= previous * (1 - 1e-12));
    previous = norm;
  }

  const Subdomain tiny = extract_subdomain(mesh, {0.9, 0.9}, 0.1);
  CHECK_THROWS_AS(solve_screened_local(mesh, coeff, phi, tiny, 1.0, {}), InvalidArgument);
  CHECK_THROWS_AS(solve_screened_local(mesh, coeff, phi, sub, 0.0, {}), InvalidArgument);
}

TEST_CASE("whole-mesh localization equals the screened global basis") {
  const FineMesh mesh(16);
  const CoefficientField coeff = gen_trig(mesh);
  const CoarseBasis coarse = build_coarse_basis(mesh, CoarseLattice(mesh, 0.25));
  const LocalizedBasis loc = build_basis(mesh, coeff, coarse, recipe_of(BasisMode::Localized, "whole", "h"));
  const LocalizedBasis scr = build_basis(mesh, coeff, coarse, recipe_of(BasisMode::ScreenedGlobal, "log", "h"));
  REQUIRE(loc.size() == scr.size());
  for (std::size_t i = 0; i < loc.size(); ++i) {
    CHECK(oracle::max_abs_diff(loc.function(i).coeffs, scr.function(i).coeffs) <= 1e-12);
  }
}

TEST_CASE("localized basis bookkeeping") {
  const FineMesh mesh(32);
  const CoefficientField coeff = gen_trig(mesh);
  const CoarseBasis coarse = build_coarse_basis(mesh, CoarseLattice(mesh, 0.25));
  BasisRecipe r = recipe_of(BasisMode::Localized, "3h", "default");
  const LocalizedBasis basis = build_basis(mesh, coeff, coarse, r);
  CHECK(basis.size() == coarse.lattice.size());
  CHECK(basis.coeff_hash == coeff.hash());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Subdomain sub = basis_subdomain(mesh, coarse, i, r);
    for (int d : basis.functions[i].index) CHECK(sub.local_of(d) >= 0);
    for (int d : coarse.functions[i].index) CHECK(sub.local_of(d) >= 0);
    CHECK(basis.info[i].dofs == sub.dof_count());
    CHECK(basis.info[i].radius == 0.75);
    CHECK(basis.info[i].screening_time == doctest::Approx(0.25));
    CHECK_FALSE(basis.info[i].whole_mesh);
  }

  r.threads = 4;
  const LocalizedBasis threaded = build_basis(mesh, coeff, coarse, r);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    CHECK(threaded.functions[i].index == basis.functions[i].index);
    CHECK(threaded.functions[i].value == basis.functions[i].value);
  }

  // with no high-contrast cells the buffered recipe is the plain one
  BasisRecipe hc = r;
  hc.mode = BasisMode::HighContrast;
  hc.threads = 1;
  const LocalizedBasis same = build_basis(mesh, gen_constant(mesh, 1.0), coarse, hc);
  const LocalizedBasis plain = build_basis(mesh, gen_constant(mesh, 1.0), coarse, r);
  for (std::size_t i = 0; i < same.size(); ++i) CHECK(same.functions[i].value == plain.functions[i].value);

  CHECK_THROWS_AS(build_basis(FineMesh(32), coeff, coarse, r), InvalidArgument);
}

TEST_CASE("quadratic coarse space beats linear hats") {
  const FineMesh mesh(32);
  const CoefficientField coeff = gen_trig(mesh);
  BasisRecipe r = recipe_of(BasisMode::Global, "whole", "inf");
  const CoarseLattice lat(mesh, 0.5);
  const double quad = elliptic_h1_error(mesh, coeff, build_basis(mesh, coeff, build_coarse_basis(mesh, lat), r));
  r.coarse = CoarseKind::Linear;
  const double lin =
      elliptic_h1_error(mesh, coeff, build_basis(mesh, coeff, build_coarse_basis(mesh, lat, CoarseKind::Linear), r));
  CHECK(quad < lin);
}

TEST_CASE("decay profile") {
  const FineMesh mesh(32);
  const CoefficientField coeff = gen_trig(mesh);
  const CoarseBasis coarse = build_coarse_basis(mesh, CoarseLattice(mesh, 0.25));
  const std::size_t mid = coarse.size() / 2;
  const Point c = coarse.supports[mid].center;

  const LocalizedBasis loc = build_basis(mesh, coeff, coarse, recipe_of(BasisMode::Localized, "fixed:0.6", "h"));
  const DecayProfile cut = decay_profile(loc.function(mid), c, {0.2, 0.4, 0.7, 1.0});
  CHECK(cut.tails[0] > 0.0);
  CHECK(cut.tails[2] == 0.0);
  CHECK(cut.tails[3] == 0.0);

  const LocalizedBasis scr = build_basis(mesh, coeff, coarse, recipe_of(BasisMode::ScreenedGlobal, "log", "h2"));
  const DecayProfile prof = decay_profile(scr.function(mid), c, {0.5, 0.625, 0.75, 0.875});
  for (std::size_t k = 1; k < prof.tails.size(); ++k) CHECK(prof.tails[k] < prof.tails[k - 1]);
  CHECK(prof.slope < 0.0);
  CHECK_THROWS_AS(decay_profile(scr.function(mid), c, {0.5, 0.2}), InvalidArgument);
}
