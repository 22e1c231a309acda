#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "numhom/coeff.hpp"
#include "numhom/evolve.hpp"
#include "numhom/fem.hpp"
#include "numhom/locbasis.hpp"

namespace numhom {

enum class Equation { Elliptic, Parabolic, Wave };

const char* to_string(Equation eq);
Equation equation_from_string(const std::string& name);

/// A FieldSpec of the trigonometric medium.
FieldSpec trig_medium();

/// Declarative description of one experiment or study. The JSON schema is
/// documented in the README; every field has a default.
struct ExperimentConfig {
  FieldSpec medium = trig_medium();
  std::uint64_t seed = 0;
  int fine_n = 256;
  std::vector<double> h{0.5, 0.25, 0.125, 0.0625};
  double alpha = 0.5;
  double c1 = 3.0;
  std::string radius_rule = "log";
  std::string shape = "disk";
  std::string t_rule = "default";
  std::string buffer_rule = "log";
  double contrast_threshold = 10.0;
  std::string mode = "localized";
  std::string coarse = "quadratic";
  Equation equation = Equation::Elliptic;
  std::string source = "sin";  // sin | one | zero
  double dt = 0.01;
  double t_end = 1.0;
  SolverConfig solver{SolverMethod::Direct, 1e-10, 20000};
  SolverConfig local_solver{SolverMethod::Direct, 1e-10, 20000};
  std::vector<double> sweep_ratios{1, 2, 3, 4, 6, 8};
  std::vector<std::string> sweep_t{"h2", "h", "sqrth", "inf"};
  int threads = 1;
  std::string out_dir;

  void validate() const;
  /// Basis recipe for coarse spacing h (rules are resolved lazily by h).
  BasisRecipe recipe() const;
};

/// Defaults for "convergence", "sweep", "channel", "wave" and "solve".
ExperimentConfig study_defaults(const std::string& study);

/// The source g(x) named by cfg.source.
std::function<double(Point)> source_function(const std::string& name);

struct StudyRow {
  std::string label;
  double h = 0.0;
  double radius = 0.0;
  double T = 0.0;
  double l2 = 0.0;
  double h1 = 0.0;
  double linf = 0.0;
  double seconds = 0.0;
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
};

struct Provenance {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::uint64_t field_hash = 0;
  std::string version;
};

struct StudyResult {
  std::string study;
  std::vector<StudyRow> rows;
  Provenance provenance;

  const StudyRow* find(const std::string& label, double h) const;
};

/// CSV with "# key=value" provenance lines, then a header and one line per
/// row. Numbers use 17 significant digits so parsing reproduces them exactly.
void write_study_csv(const StudyResult& result, std::ostream& out);
StudyResult read_study_csv(std::istream& in);

/// Elliptic Table-1 style study over cfg.h.
StudyResult run_convergence_study(const ExperimentConfig& cfg);
/// Error grid over radius/h ratios and screening rules at h = cfg.h[0], plus a "global" row.
StudyResult run_localization_sweep(const ExperimentConfig& cfg);
/// The three localization cases of the channel study for each h.
StudyResult run_channel_buffer_study(const ExperimentConfig& cfg);

struct WaveDemoResult {
  StudyResult result;
  std::vector<std::string> files;
};

/// Fine and coarse wave solves at h = cfg.h[0]; writes snapshots when cfg.out_dir is set.
WaveDemoResult run_wave_demo(const ExperimentConfig& cfg);

/// One solve of cfg.equation at h = cfg.h[0], compared with the fine solution.
StudyResult run_single(const ExperimentConfig& cfg);

/// FNV-1a of a byte string.
std::uint64_t fnv1a(const std::string& bytes);

extern const char* const kVersion;

}  // namespace numhom
