#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "numhom/coarse.hpp"
#include "numhom/coeff.hpp"
#include "numhom/fem.hpp"

namespace numhom {

enum class BasisMode { Global, ScreenedGlobal, Localized, HighContrast };

/// Shape of the localization region around x_i: the Euclidean disk of the
/// given radius, or the square of that half-width.
enum class PatchShape { Disk, Square };

const char* to_string(BasisMode mode);
BasisMode basis_mode_from_string(const std::string& name);
const char* to_string(PatchShape shape);
PatchShape patch_shape_from_string(const std::string& name);

/// A length depending on the coarse spacing h.
///
///   log:   factor * h^exponent * ln(1/h), exponent < 0 meaning "use alpha"
///   h:     factor * h
///   fixed: factor
///   whole: large enough to cover the domain
struct LengthRule {
  enum class Kind { Log, HMultiple, Fixed, Whole };
  Kind kind = Kind::Log;
  double factor = 3.0;
  double exponent = -1.0;

  double evaluate(double h, double alpha) const;
  std::string to_string() const;
  /// Accepts "log", "log:<c>", "sqrt", "sqrt:<c>", "<k>h", "fixed:<r>", "<r>", "whole".
  static LengthRule parse(const std::string& text);
};

/// Screening time T as a function of h: h^power, a fixed value, or infinity.
struct TimeRule {
  enum class Kind { Power, Fixed, Infinite };
  Kind kind = Kind::Power;
  double value = -1.0;  // power (negative: 2*alpha) or fixed T

  double evaluate(double h, double alpha) const;
  std::string to_string() const;
  /// Accepts "default", "h^<p>", "h", "h2", "sqrth", "inf", "<T>".
  static TimeRule parse(const std::string& text);
};

struct BasisRecipe {
  BasisMode mode = BasisMode::Localized;
  double alpha = 0.5;
  double c1 = 3.0;
  LengthRule radius{LengthRule::Kind::Log, 3.0, -1.0};
  PatchShape shape = PatchShape::Disk;
  TimeRule screening{};
  LengthRule buffer{LengthRule::Kind::Log, 3.0, -1.0};
  double contrast_threshold = 10.0;
  CoarseKind coarse = CoarseKind::Quadratic;
  SolverConfig solver{SolverMethod::Direct, 1e-10, 20000};
  int threads = 1;

  void validate() const;
};

/// Per-function record of how psi_i was computed.
struct LocalInfo {
  Point center;
  double radius = 0.0;
  double screening_time = 0.0;
  double alpha = 0.0;
  double c1 = 0.0;
  std::size_t cells = 0;
  std::size_t dofs = 0;
  bool whole_mesh = false;
  bool warning = false;
  int iterations = 0;
  double residual = 0.0;
};

struct LocalizedBasis {
  const FineMesh* mesh = nullptr;
  double h = 0.0;
  BasisRecipe recipe;
  std::uint64_t coeff_hash = 0;
  std::vector<SparseVector> functions;
  std::vector<LocalInfo> info;

  std::size_t size() const noexcept { return functions.size(); }
  FEFunction function(std::size_t i) const;
};

/// Solves (1/T)(psi,v) + a[psi,v] = int grad(phi).grad(v) for the local
/// test functions v of sub, zero-extended to the whole mesh. T = infinity
/// drops the screening term. With a = 1, T = infinity and sub = the whole
/// mesh this returns phi.
FEFunction solve_screened_local(const FineMesh& mesh, const CoefficientField& coeff, const FEFunction& phi,
                                const Subdomain& sub, double T, const SolverConfig& cfg,
                                SolveStats* stats = nullptr);

/// The subdomain used for function i: a ball of the recipe radius around the
/// lattice node united with the support box of phi_i, grown around
/// high-contrast components in HighContrast mode, the whole mesh in the
/// global modes.
Subdomain basis_subdomain(const FineMesh& mesh, const CoarseBasis& coarse, std::size_t i, const BasisRecipe& recipe,
                          const BufferPlanner* planner = nullptr);

LocalizedBasis build_basis(const FineMesh& mesh, const CoefficientField& coeff, const CoarseBasis& coarse,
                           const BasisRecipe& recipe);

struct DecayProfile {
  std::vector<double> radii;
  std::vector<double> tails;
  /// Least-squares slope of ln(tail) against r over the positive tails.
  double slope = 0.0;
};

/// H1 seminorm of psi outside B(center, r) for each r.
DecayProfile decay_profile(const FEFunction& psi, Point center, const std::vector<double>& radii);

}  // namespace numhom
