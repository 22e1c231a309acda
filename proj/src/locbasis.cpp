#include "numhom/locbasis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "numhom/error.hpp"

namespace numhom {

const char* to_string(BasisMode mode) {
  switch (mode) {
    case BasisMode::Global: return "global";
    case BasisMode::ScreenedGlobal: return "screened-global";
    case BasisMode::Localized: return "localized";
    case BasisMode::HighContrast: return "high-contrast";
  }
  return "unknown";
}

BasisMode basis_mode_from_string(const std::string& name) {
  for (auto m : {BasisMode::Global, BasisMode::ScreenedGlobal, BasisMode::Localized, BasisMode::HighContrast}) {
    if (name == to_string(m)) return m;
  }
  throw InvalidArgument("unknown basis mode '" + name + "'");
}

const char* to_string(PatchShape shape) { return shape == PatchShape::Disk ? "disk" : "square"; }

PatchShape patch_shape_from_string(const std::string& name) {
  if (name == "disk") return PatchShape::Disk;
  if (name == "square") return PatchShape::Square;
  throw InvalidArgument("unknown patch shape '" + name + "'");
}

namespace {

constexpr double kWholeRadius = 3.0;  // exceeds the diameter 2*sqrt(2) of the square

double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("cannot parse " + what + " '" + text + "'");
  }
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

double LengthRule::evaluate(double h, double alpha) const {
  switch (kind) {
    case Kind::Log: {
      const double e = exponent < 0.0 ? alpha : exponent;
      return factor * std::pow(h, e) * std::log(1.0 / h);
    }
    case Kind::HMultiple: return factor * h;
    case Kind::Fixed: return factor;
    case Kind::Whole: return kWholeRadius;
  }
  return factor;
}

std::string LengthRule::to_string() const {
  switch (kind) {
    case Kind::Log:
      if (exponent < 0.0) return "log:" + format_number(factor);
      return "log:" + format_number(factor) + ":" + format_number(exponent);
    case Kind::HMultiple: return format_number(factor) + "h";
    case Kind::Fixed: return "fixed:" + format_number(factor);
    case Kind::Whole: return "whole";
  }
  return "";
}

LengthRule LengthRule::parse(const std::string& text) {
  if (text == "whole" || text == "inf") return {Kind::Whole, 0.0, -1.0};
  if (text == "log") return {Kind::Log, 3.0, -1.0};
  if (text == "sqrt") return {Kind::Log, 1.0, 0.5};
  if (text.rfind("sqrt:", 0) == 0) return {Kind::Log, parse_number(text.substr(5), "length factor"), 0.5};
  if (text.rfind("log:", 0) == 0) {
    const std::string rest = text.substr(4);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) return {Kind::Log, parse_number(rest, "length factor"), -1.0};
    return {Kind::Log, parse_number(rest.substr(0, colon), "length factor"),
            parse_number(rest.substr(colon + 1), "length exponent")};
  }
  if (text.rfind("fixed:", 0) == 0) return {Kind::Fixed, parse_number(text.substr(6), "length"), -1.0};
  if (!text.empty() && text.back() == 'h') {
    const std::string k = text.substr(0, text.size() - 1);
    return {Kind::HMultiple, k.empty() ? 1.0 : parse_number(k, "length factor"), -1.0};
  }
  return {Kind::Fixed, parse_number(text, "length"), -1.0};
}

double TimeRule::evaluate(double h, double alpha) const {
  switch (kind) {
    case Kind::Power: return std::pow(h, value < 0.0 ? 2.0 * alpha : value);
    case Kind::Fixed: return value;
    case Kind::Infinite: return std::numeric_limits<double>::infinity();
  }
  return value;
}

std::string TimeRule::to_string() const {
  switch (kind) {
    case Kind::Power: return value < 0.0 ? "default" : "h^" + format_number(value);
    case Kind::Fixed: return format_number(value);
    case Kind::Infinite: return "inf";
  }
  return "";
}

TimeRule TimeRule::parse(const std::string& text) {
  if (text == "default" || text == "h^2alpha") return {Kind::Power, -1.0};
  if (text == "inf" || text == "infinity") return {Kind::Infinite, 0.0};
  if (text == "h") return {Kind::Power, 1.0};
  if (text == "h2") return {Kind::Power, 2.0};
  if (text == "sqrth") return {Kind::Power, 0.5};
  if (text.rfind("h^", 0) == 0) return {Kind::Power, parse_number(text.substr(2), "screening power")};
  return {Kind::Fixed, parse_number(text, "screening time")};
}

void BasisRecipe::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  if (!(c1 > 0.0)) throw InvalidArgument("C1 must be positive");
  if (screening.kind == TimeRule::Kind::Fixed && !(screening.value > 0.0)) {
    throw InvalidArgument("screening time T must be positive");
  }
  if (radius.kind != LengthRule::Kind::Whole && !(radius.factor > 0.0)) {
    throw InvalidArgument("radius rule must give a positive length");
  }
  if (mode == BasisMode::HighContrast) {
    if (!(contrast_threshold > 1.0)) throw InvalidArgument("contrast threshold must exceed 1");
    if (buffer.kind != LengthRule::Kind::Whole && !(buffer.factor > 0.0)) {
      throw InvalidArgument("buffer rule must give a positive length");
    }
  }
  if (threads < 1) throw InvalidArgument("thread count must be at least 1");
  solver.validate();
}

FEFunction LocalizedBasis::function(std::size_t i) const {
  return FEFunction(*mesh, functions.at(i).to_dense(mesh->dof_count()));
}

FEFunction solve_screened_local(const FineMesh& mesh, const CoefficientField& coeff, const FEFunction& phi,
                                const Subdomain& sub, double T, const SolverConfig& cfg, SolveStats* stats) {
  if (&sub.mesh() != &mesh) throw InvalidArgument("subdomain belongs to a different mesh");
  if (!(T > 0.0)) throw InvalidArgument("screening time T must be positive");
  if (phi.coeffs.size() != mesh.dof_count()) throw InvalidArgument("phi is not defined on the mesh");
  for (std::size_t d = 0; d < phi.coeffs.size(); ++d) {
    if (phi.coeffs[d] != 0.0 && sub.local_of(static_cast<int>(d)) < 0) {
      throw InvalidArgument("support of phi is not contained in the subdomain");
    }
  }
  std::optional<double> screening;
  if (std::isfinite(T)) screening = 1.0 / T;
  const SparseMatrix a = assemble_stiffness(sub, coeff, screening);
  std::vector<double> rhs = weak_laplacian_rhs(sub, phi);
  for (double& v : rhs) v = -v;
  const std::vector<double> x = solve_spd(a, rhs, cfg, stats);
  std::vector<double> out(mesh.dof_count(), 0.0);
  const auto parent = sub.local_to_parent();
  for (std::size_t k = 0; k < x.size(); ++k) out[static_cast<std::size_t>(parent[k])] = x[k];
  return FEFunction(mesh, std::move(out));
}

Subdomain basis_subdomain(const FineMesh& mesh, const CoarseBasis& coarse, std::size_t i, const BasisRecipe& recipe,
                          const BufferPlanner* planner) {
  if (recipe.mode == BasisMode::Global || recipe.mode == BasisMode::ScreenedGlobal) {
    return extract_subdomain(mesh, {0.0, 0.0}, kWholeRadius);
  }
  const double h = coarse.lattice.spacing();
  const SupportRecord& rec = coarse.supports.at(i);
  const double r = recipe.radius.evaluate(h, recipe.alpha);
  if (!(r > 0.0)) throw InvalidArgument("radius rule gives a nonpositive radius");
  const std::vector<int> support = rec.cells(mesh);
  Subdomain base = unite(recipe.shape == PatchShape::Disk ? extract_subdomain(mesh, rec.center, r)
                                                          : extract_box_subdomain(mesh, rec.center, r),
                         support);
  if (recipe.mode == BasisMode::HighContrast) {
    if (planner == nullptr) throw InvalidArgument("high-contrast mode needs a buffer planner");
    return planner->apply(base);
  }
  return base;
}

LocalizedBasis build_basis(const FineMesh& mesh, const CoefficientField& coeff, const CoarseBasis& coarse,
                           const BasisRecipe& recipe) {
  recipe.validate();
  if (coarse.mesh != &mesh) throw InvalidArgument("coarse basis belongs to a different mesh");
  const double h = coarse.lattice.spacing();
  const double T = recipe.mode == BasisMode::Global ? std::numeric_limits<double>::infinity()
                                                    : recipe.screening.evaluate(h, recipe.alpha);
  if (!(T > 0.0)) throw InvalidArgument("screening time T must be positive");
  const double screening = std::isfinite(T) ? 1.0 / T : 0.0;
  const double radius = (recipe.mode == BasisMode::Global || recipe.mode == BasisMode::ScreenedGlobal)
                            ? kWholeRadius
                            : recipe.radius.evaluate(h, recipe.alpha);

  std::unique_ptr<BufferPlanner> planner;
  if (recipe.mode == BasisMode::HighContrast) {
    planner = std::make_unique<BufferPlanner>(mesh, coeff, recipe.buffer.evaluate(h, recipe.alpha),
                                              recipe.contrast_threshold);
  }

  // Every local matrix is a principal submatrix of the global screened operator.
  const SparseMatrix stiffness = assemble_stiffness(mesh, coeff);
  const SparseMatrix full = screening > 0.0 ? stiffness.combine(1.0, assemble_mass(mesh, 1.0), screening) : stiffness;
  const SparseMatrix laplacian = assemble_laplacian(mesh);

  std::once_flag whole_once;
  std::unique_ptr<DirectSolver> whole_solver;

  const std::size_t count = coarse.size();
  LocalizedBasis out;
  out.mesh = &mesh;
  out.h = h;
  out.recipe = recipe;
  out.coeff_hash = coeff.hash();
  out.functions.resize(count);
  out.info.resize(count);
  std::vector<std::exception_ptr> failures(count);

  auto job = [&](std::size_t i) {
    const Subdomain sub = basis_subdomain(mesh, coarse, i, recipe, planner.get());
    const SparseVector& phi = coarse.functions[i];
    for (int d : phi.index) {
      if (sub.local_of(d) < 0) throw InvalidArgument("support of phi_" + std::to_string(i) + " leaves its subdomain");
    }
    // rhs_j = int grad(phi).grad(v_j) = (L phi)_j; only rows near the support are nonzero.
    std::vector<double> rhs(sub.dof_count(), 0.0);
    const auto row_ptr = laplacian.row_ptr();
    const auto col_idx = laplacian.col_idx();
    const auto vals = laplacian.values();
    for (std::size_t k = 0; k < phi.index.size(); ++k) {
      const auto d = static_cast<std::size_t>(phi.index[k]);
      for (int e = row_ptr[d]; e < row_ptr[d + 1]; ++e) {
        const int row = sub.local_of(col_idx[static_cast<std::size_t>(e)]);
        if (row >= 0) rhs[static_cast<std::size_t>(row)] += vals[static_cast<std::size_t>(e)] * phi.value[k];
      }
    }

    const bool whole = sub.dof_count() == mesh.dof_count();
    SolveStats stats;
    std::vector<double> x;
    if (whole && recipe.solver.method == SolverMethod::Direct) {
      std::call_once(whole_once, [&] { whole_solver = std::make_unique<DirectSolver>(full); });
      x = whole_solver->solve(rhs, recipe.solver.tolerance, &stats);
    } else {
      const SparseMatrix local = whole ? full : full.restrict_to(sub.local_map(), sub.dof_count());
      x = solve_spd(local, rhs, recipe.solver, &stats);
    }

    SparseVector psi;
    const auto parent = sub.local_to_parent();
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (x[k] != 0.0) {
        psi.index.push_back(parent[k]);
        psi.value.push_back(x[k]);
      }
    }
    out.functions[i] = std::move(psi);
    LocalInfo& info = out.info[i];
    info.center = coarse.supports[i].center;
    info.radius = radius;
    info.screening_time = T;
    info.alpha = recipe.alpha;
    info.c1 = recipe.c1;
    info.cells = sub.cells().size();
    info.dofs = sub.dof_count();
    info.whole_mesh = sub.covers_mesh();
    info.warning = sub.warning();
    info.iterations = stats.iterations;
    info.residual = stats.residual;
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        job(i);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const int nthreads = std::max(1, std::min<int>(recipe.threads, static_cast<int>(count)));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (!failures[i]) continue;
    try {
      std::rethrow_exception(failures[i]);
    } catch (const SolverError& e) {
      throw SolverError("local solve for basis function " + std::to_string(i) + " failed: " + e.what(),
                        e.residual(), e.iterations());
    } catch (const Error& e) {
      throw Error(e.code(), "basis function " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

DecayProfile decay_profile(const FEFunction& psi, Point center, const std::vector<double>& radii) {
  if (psi.mesh == nullptr) throw InvalidArgument("function has no mesh");
  if (!std::is_sorted(radii.begin(), radii.end())) throw InvalidArgument("decay radii must be increasing");
  const FineMesh& mesh = *psi.mesh;
  DecayProfile out;
  out.radii = radii;
  for (double r : radii) {
    std::vector<int> outside;
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
      if (distance(mesh.barycenter(static_cast<int>(t)), center) > r) outside.push_back(static_cast<int>(t));
    }
    out.tails.push_back(h1_seminorm_on(mesh, psi.coeffs, outside));
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int m = 0;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(out.tails[k] > 0.0)) continue;
    const double y = std::log(out.tails[k]);
    sx += radii[k];
    sy += y;
    sxx += radii[k] * radii[k];
    sxy += radii[k] * y;
    ++m;
  }
  const double den = m * sxx - sx * sx;
  if (m >= 2 && den > 0.0) out.slope = (m * sxy - sx * sy) / den;
  return out;
}

}  // namespace numhom
