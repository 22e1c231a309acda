#include "numhom/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "numhom/coarse.hpp"
#include "numhom/error.hpp"
#include "numhom/io.hpp"

namespace numhom {

const char* const kVersion = "0.1.0";

const char* to_string(Equation eq) {
  switch (eq) {
    case Equation::Elliptic: return "elliptic";
    case Equation::Parabolic: return "parabolic";
    case Equation::Wave: return "wave";
  }
  return "";
}

Equation equation_from_string(const std::string& name) {
  if (name == "elliptic") return Equation::Elliptic;
  if (name == "parabolic") return Equation::Parabolic;
  if (name == "wave") return Equation::Wave;
  throw InvalidArgument("unknown equation '" + name + "'");
}

FieldSpec trig_medium() {
  FieldSpec spec;
  spec.kind = MediumKind::Trig;
  return spec;
}

ExperimentConfig study_defaults(const std::string& study) {
  ExperimentConfig cfg;
  if (study == "convergence" || study == "solve") return cfg;
  if (study == "sweep") {
    cfg.h = {0.125};
    return cfg;
  }
  if (study == "channel") {
    FieldSpec bg;
    bg.kind = MediumKind::Percolation;
    bg.gamma = 4.0;
    cfg.medium = FieldSpec{};
    cfg.medium.kind = MediumKind::Channel;
    cfg.medium.channel_value = 100.0;
    cfg.medium.background = std::make_shared<const FieldSpec>(bg);
    cfg.h = {0.5, 0.25, 0.125};
    cfg.t_rule = "h";
    return cfg;
  }
  if (study == "wave") {
    cfg.h = {0.125};
    cfg.radius_rule = "3h";
    cfg.t_rule = "h";
    cfg.equation = Equation::Wave;
    return cfg;
  }
  throw InvalidArgument("unknown study '" + study + "'");
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::function<double(Point)> source_function(const std::string& name) {
  if (name == "sin") {
    return [](Point p) { return std::sin(std::numbers::pi * p.x) * std::sin(std::numbers::pi * p.y); };
  }
  if (name == "one") return [](Point) { return 1.0; };
  if (name == "zero") return [](Point) { return 0.0; };
  throw InvalidArgument("unknown source '" + name + "' (expected sin, one or zero)");
}

BasisRecipe ExperimentConfig::recipe() const {
  BasisRecipe r;
  r.mode = basis_mode_from_string(mode);
  r.alpha = alpha;
  r.c1 = c1;
  r.radius = LengthRule::parse(radius_rule);
  if (radius_rule == "log") r.radius.factor = c1;
  r.shape = patch_shape_from_string(shape);
  r.screening = TimeRule::parse(t_rule);
  r.buffer = LengthRule::parse(buffer_rule);
  r.contrast_threshold = contrast_threshold;
  r.coarse = coarse_kind_from_string(coarse);
  r.solver = local_solver;
  r.threads = threads;
  return r;
}

void ExperimentConfig::validate() const {
  if (fine_n < 2) throw InvalidArgument("fine n must be at least 2");
  if (h.empty()) throw InvalidArgument("h list is empty");
  const BasisRecipe r = recipe();
  r.validate();
  solver.validate();
  local_solver.validate();
  for (double hv : h) {
    const double cells = 2.0 / hv;
    if (!(hv > 0.0) || std::abs(cells - std::round(cells)) > 1e-9) {
      throw InvalidArgument("h must divide 2 evenly");
    }
    const double fine = fine_n * hv / 2.0;
    if (std::abs(fine - std::round(fine)) > 1e-9 || std::round(fine) < 1.0) {
      throw InvalidArgument("h is not resolved by the fine mesh");
    }
    if (r.coarse == CoarseKind::Quadratic && static_cast<long>(std::round(cells)) % 2 != 0) {
      throw InvalidArgument("quadratic coarse space needs 2/h even");
    }
    if (r.radius.kind != LengthRule::Kind::Whole && r.radius.evaluate(hv, alpha) < 2.0 * hv - 1e-12) {
      throw InvalidArgument("radius rule gives less than 2h at h = " + std::to_string(hv));
    }
  }
  if (equation != Equation::Elliptic) {
    if (!(dt > 0.0) || !(t_end > 0.0)) throw InvalidArgument("dt and t_end must be positive");
    TimeGrid::make(t_end, dt);
  }
  if (threads < 1) throw InvalidArgument("thread count must be at least 1");
  source_function(source);
  for (double ratio : sweep_ratios) {
    if (!(ratio > 0.0)) throw InvalidArgument("sweep ratios must be positive");
  }
  for (const auto& t : sweep_t) TimeRule::parse(t);
}

const StudyRow* StudyResult::find(const std::string& label, double h) const {
  for (const auto& row : rows) {
    if (row.label == label && row.h == h) return &row;
  }
  return nullptr;
}

namespace {

using Clock = std::chrono::steady_clock;

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InvalidArgument("bad number '" + s + "' in study CSV");
  }
  if (used != s.size()) throw InvalidArgument("bad number '" + s + "' in study CSV");
  return v;
}

struct Setup {
  FineMesh mesh;
  CoefficientField coeff;
};

Setup make_setup(const ExperimentConfig& cfg) {
  FineMesh mesh(cfg.fine_n);
  FieldSpec spec = cfg.medium;
  spec.seed = cfg.seed;
  CoefficientField coeff = generate(mesh, spec);
  return {std::move(mesh), std::move(coeff)};
}

StudyResult start_result(const ExperimentConfig& cfg, const char* study, const CoefficientField& coeff) {
  StudyResult r;
  r.study = study;
  json j = cfg;
  r.provenance.config_hash = fnv1a(j.dump());
  r.provenance.seed = cfg.seed;
  r.provenance.field_hash = coeff.hash();
  r.provenance.version = kVersion;
  return r;
}

StudyRow failed_row(std::string label, double h, const std::exception& e) {
  StudyRow row;
  row.label = std::move(label);
  row.h = h;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  row.radius = row.T = row.l2 = row.h1 = row.linf = nan;
  row.status = sanitize(std::string("error: ") + e.what());
  return row;
}

void fill_errors(StudyRow& row, const ErrorReport& e) {
  row.l2 = e.rel_l2;
  row.h1 = e.rel_h1;
  row.linf = e.rel_linf;
}

/// Fine reference for one equation; holds either a steady solution or a trajectory.
struct Reference {
  Equation equation = Equation::Elliptic;
  Forcing forcing;
  TimeGrid grid;
  std::vector<double> fine_load;
  std::vector<double> elliptic;
  Trajectory trajectory;
};

Reference make_reference(const Setup& s, const ExperimentConfig& cfg) {
  Reference ref;
  ref.equation = cfg.equation;
  auto g = source_function(cfg.source);
  ref.fine_load = assemble_load(s.mesh, g);
  FineOperatorSet fine(s.mesh, s.coeff, true, cfg.solver);
  if (cfg.equation == Equation::Elliptic) {
    ref.elliptic = galerkin_elliptic(fine, ref.fine_load).fine.coeffs;
    return ref;
  }
  ref.forcing = cfg.source == "zero" ? Forcing::none() : Forcing::steady(g);
  ref.grid = TimeGrid::make(cfg.t_end, cfg.dt);
  ref.trajectory = cfg.equation == Equation::Parabolic ? parabolic_implicit_euler(fine, ref.forcing, ref.grid)
                                                       : wave_newmark(fine, ref.forcing, ref.grid);
  return ref;
}

struct CaseOutcome {
  StudyRow row;
  std::vector<std::vector<double>> fine_states;
};

CaseOutcome run_case(const Setup& s, const Reference& ref, const BasisRecipe& recipe, double h, std::string label) {
  const auto t0 = Clock::now();
  CaseOutcome out;
  StudyRow& row = out.row;
  row.label = std::move(label);
  row.h = h;
  row.radius = recipe.radius.evaluate(h, recipe.alpha);
  row.T = recipe.mode == BasisMode::Global ? std::numeric_limits<double>::infinity()
                                           : recipe.screening.evaluate(h, recipe.alpha);
  CoarseLattice lattice(s.mesh, h);
  const CoarseBasis coarse = build_coarse_basis(s.mesh, lattice, recipe.coarse);
  const LocalizedBasis basis = build_basis(s.mesh, s.coeff, coarse, recipe);
  const CoarseOperatorSet ops(basis, s.coeff);
  if (ref.equation == Equation::Elliptic) {
    const auto sol = galerkin_elliptic(ops, ref.fine_load);
    fill_errors(row, error_report(FEFunction(s.mesh, ref.elliptic), sol.fine));
    out.fine_states.push_back(sol.fine.coeffs);
  } else {
    const Trajectory traj = ref.equation == Equation::Parabolic ? parabolic_implicit_euler(ops, ref.forcing, ref.grid)
                                                                : wave_newmark(ops, ref.forcing, ref.grid);
    out.fine_states.reserve(traj.states.size());
    for (const auto& c : traj.states) out.fine_states.push_back(ops.prolong(c));
    const ErrorReport e = error_report(s.mesh, ref.trajectory.times, ref.trajectory.states, out.fine_states);
    fill_errors(row, e);
  }
  for (double v : {row.l2, row.h1, row.linf}) {
    if (!std::isfinite(v)) throw SolverError("non-finite error", v, 0);
  }
  row.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return out;
}

void append_case(StudyResult& result, const Setup& s, const Reference& ref, const BasisRecipe& recipe, double h,
                 const std::string& label) {
  try {
    result.rows.push_back(run_case(s, ref, recipe, h, label).row);
  } catch (const std::exception& e) {
    result.rows.push_back(failed_row(label, h, e));
  }
}

void emit_csv(const StudyResult& result, const ExperimentConfig& cfg, const std::string& name) {
  if (cfg.out_dir.empty()) return;
  std::filesystem::create_directories(cfg.out_dir);
  std::ostringstream os;
  write_study_csv(result, os);
  write_text((std::filesystem::path(cfg.out_dir) / name).string(), os.str());
}

}  // namespace

void write_study_csv(const StudyResult& result, std::ostream& out) {
  out << "# study=" << result.study << '\n';
  out << "# config_hash=" << result.provenance.config_hash << '\n';
  out << "# seed=" << result.provenance.seed << '\n';
  out << "# field_hash=" << result.provenance.field_hash << '\n';
  out << "# version=" << result.provenance.version << '\n';
  out << "case,h,radius,T,l2,h1,linf,seconds,status\n";
  for (const auto& r : result.rows) {
    out << sanitize(r.label) << ',' << number(r.h) << ',' << number(r.radius) << ',' << number(r.T) << ','
        << number(r.l2) << ',' << number(r.h1) << ',' << number(r.linf) << ',' << number(r.seconds) << ','
        << sanitize(r.status) << '\n';
  }
}

StudyResult read_study_csv(std::istream& in) {
  StudyResult result;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2);
      const std::string value = line.substr(eq + 1);
      if (key == "study") result.study = value;
      else if (key == "config_hash") result.provenance.config_hash = std::stoull(value);
      else if (key == "seed") result.provenance.seed = std::stoull(value);
      else if (key == "field_hash") result.provenance.field_hash = std::stoull(value);
      else if (key == "version") result.provenance.version = value;
      continue;
    }
    if (!header) {
      if (line.rfind("case,", 0) != 0) throw InvalidArgument("study CSV lacks a header line");
      header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() == 8) cells.emplace_back();
    if (cells.size() != 9) throw InvalidArgument("study CSV row has " + std::to_string(cells.size()) + " fields");
    StudyRow row;
    row.label = cells[0];
    row.h = parse_double(cells[1]);
    row.radius = parse_double(cells[2]);
    row.T = parse_double(cells[3]);
    row.l2 = parse_double(cells[4]);
    row.h1 = parse_double(cells[5]);
    row.linf = parse_double(cells[6]);
    row.seconds = parse_double(cells[7]);
    row.status = cells[8];
    result.rows.push_back(std::move(row));
  }
  if (!header) throw InvalidArgument("study CSV lacks a header line");
  return result;
}

StudyResult run_convergence_study(const ExperimentConfig& cfg) {
  if (cfg.equation != Equation::Elliptic) throw InvalidArgument("convergence study needs the elliptic equation");
  cfg.validate();
  const Setup s = make_setup(cfg);
  StudyResult result = start_result(cfg, "convergence", s.coeff);
  const Reference ref = make_reference(s, cfg);
  const BasisRecipe recipe = cfg.recipe();
  for (double h : cfg.h) append_case(result, s, ref, recipe, h, "localized");
  emit_csv(result, cfg, "convergence.csv");
  return result;
}

StudyResult run_localization_sweep(const ExperimentConfig& cfg) {
  ExperimentConfig base = cfg;
  base.equation = Equation::Elliptic;
  base.radius_rule = "3h";
  base.validate();
  const Setup s = make_setup(base);
  StudyResult result = start_result(cfg, "sweep", s.coeff);
  const Reference ref = make_reference(s, base);
  const double h = cfg.h.front();
  BasisRecipe recipe = base.recipe();
  for (double ratio : cfg.sweep_ratios) {
    for (const auto& t : cfg.sweep_t) {
      recipe.mode = BasisMode::Localized;
      recipe.radius = {LengthRule::Kind::HMultiple, ratio, -1.0};
      recipe.screening = TimeRule::parse(t);
      std::ostringstream label;
      label << "r=" << ratio << "h T=" << t;
      append_case(result, s, ref, recipe, h, label.str());
    }
  }
  recipe.mode = BasisMode::Global;
  recipe.radius = {LengthRule::Kind::Whole, 0.0, -1.0};
  recipe.screening = {TimeRule::Kind::Infinite, 0.0};
  append_case(result, s, ref, recipe, h, "global");
  emit_csv(result, cfg, "sweep.csv");
  return result;
}

StudyResult run_channel_buffer_study(const ExperimentConfig& cfg) {
  ExperimentConfig base = cfg;
  base.equation = Equation::Elliptic;
  base.validate();
  const Setup s = make_setup(base);
  StudyResult result = start_result(cfg, "channel", s.coeff);
  const Reference ref = make_reference(s, base);
  BasisRecipe buffered = base.recipe();
  buffered.mode = BasisMode::HighContrast;
  buffered.radius = LengthRule::parse("sqrt");
  buffered.buffer = LengthRule::parse("sqrt");
  BasisRecipe plain = base.recipe();
  plain.mode = BasisMode::Localized;
  plain.radius = LengthRule::parse("3h");
  BasisRecipe buffered3h = buffered;
  buffered3h.radius = LengthRule::parse("3h");
  buffered3h.buffer = LengthRule::parse("3h");
  for (double h : cfg.h) {
    append_case(result, s, ref, buffered, h, "buffered-sqrt");
    append_case(result, s, ref, plain, h, "plain-3h");
    append_case(result, s, ref, buffered3h, h, "buffered-3h");
  }
  emit_csv(result, cfg, "channel.csv");
  return result;
}

WaveDemoResult run_wave_demo(const ExperimentConfig& cfg) {
  ExperimentConfig base = cfg;
  base.equation = Equation::Wave;
  base.validate();
  const Setup s = make_setup(base);
  WaveDemoResult demo;
  demo.result = start_result(cfg, "wave", s.coeff);
  const Reference ref = make_reference(s, base);
  const double h = cfg.h.front();
  CaseOutcome outcome;
  try {
    outcome = run_case(s, ref, base.recipe(), h, "wave");
    demo.result.rows.push_back(outcome.row);
  } catch (const std::exception& e) {
    demo.result.rows.push_back(failed_row("wave", h, e));
  }
  emit_csv(demo.result, cfg, "wave.csv");
  if (cfg.out_dir.empty() || outcome.fine_states.empty()) return demo;

  const std::filesystem::path dir(cfg.out_dir);
  const auto& times = ref.trajectory.times;
  const std::size_t last = times.size() - 1;
  std::vector<std::size_t> picks;
  for (int k = 1; k <= 4; ++k) picks.push_back(last * static_cast<std::size_t>(k) / 4);
  json manifest;
  manifest["config"] = cfg;
  manifest["times"] = json::array();
  manifest["snapshots"] = json::array();
  for (std::size_t idx : picks) {
    char tag[32];
    std::snprintf(tag, sizeof tag, "%04zu", idx);
    const std::string ref_csv = std::string("u_ref_") + tag + ".csv";
    const std::string hom_csv = std::string("u_h_") + tag + ".csv";
    const std::string ref_pgm = std::string("u_ref_") + tag + ".pgm";
    const std::string hom_pgm = std::string("u_h_") + tag + ".pgm";
    write_nodal_csv(s.mesh, ref.trajectory.states[idx], (dir / ref_csv).string());
    write_nodal_csv(s.mesh, outcome.fine_states[idx], (dir / hom_csv).string());
    write_pgm(s.mesh, ref.trajectory.states[idx], (dir / ref_pgm).string());
    write_pgm(s.mesh, outcome.fine_states[idx], (dir / hom_pgm).string());
    for (const auto& f : {ref_csv, hom_csv, ref_pgm, hom_pgm}) demo.files.push_back((dir / f).string());
    manifest["times"].push_back(times[idx]);
    manifest["snapshots"].push_back({{"time", times[idx]},
                                     {"reference", ref_csv},
                                     {"homogenized", hom_csv},
                                     {"reference_image", ref_pgm},
                                     {"homogenized_image", hom_pgm}});
  }
  write_field_pgm(s.coeff, (dir / "field.pgm").string());
  demo.files.push_back((dir / "field.pgm").string());
  manifest["field_image"] = "field.pgm";
  manifest["result"] = demo.result;
  write_text((dir / "manifest.json").string(), manifest.dump(2) + "\n");
  demo.files.push_back((dir / "manifest.json").string());
  return demo;
}

StudyResult run_single(const ExperimentConfig& cfg) {
  cfg.validate();
  const Setup s = make_setup(cfg);
  StudyResult result = start_result(cfg, "solve", s.coeff);
  const Reference ref = make_reference(s, cfg);
  append_case(result, s, ref, cfg.recipe(), cfg.h.front(), to_string(cfg.equation));
  emit_csv(result, cfg, "solve.csv");
  return result;
}

}  // namespace numhom
