#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "numhom/numhom.h"

using nlohmann::json;

namespace {

struct Failure {
  nh_status status;
  std::string message;
};

[[noreturn]] void raise(nh_status status, const std::string& message) { throw Failure{status, message}; }

void check(nh_status status) {
  if (status != NH_OK) raise(status, nh_last_error());
}

std::string take(char* s) {
  std::string out = s ? s : "";
  nh_string_free(s);
  return out;
}

json read_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) raise(NH_IO_ERROR, "cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    raise(NH_INVALID_ARGUMENT, "cannot parse " + path + ": " + e.what());
  }
}

struct Common {
  std::string config;
  std::optional<int> fine_n;
  std::vector<double> h;
  std::optional<double> alpha;
  std::optional<double> c1;
  std::optional<std::string> radius;
  std::optional<std::string> t_rule;
  std::optional<std::string> medium;
  std::optional<std::string> equation;
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out;
  std::string format = "json";

  void add(CLI::App* app, bool study) {
    app->add_option("--config", config, "JSON experiment config")->check(CLI::ExistingFile);
    app->add_option("--fine-n", fine_n, "Fine cells per axis");
    app->add_option("--h", h, "Coarse spacing(s)");
    app->add_option("--alpha", alpha, "Localization exponent");
    app->add_option("--c1", c1, "Localization constant");
    app->add_option("--radius", radius, "Radius rule: log, sqrt, 3h, fixed:r, whole");
    app->add_option("--t-rule", t_rule, "Screening time rule: default, h, h2, sqrth, inf, <T>");
    app->add_option("--medium", medium, "Medium kind");
    app->add_option("--mode", mode, "Basis mode");
    app->add_option("--seed", seed, "Medium seed");
    app->add_option("--threads", threads, "Worker threads for local solves");
    app->add_option("--out", out, "Output directory");
    if (study) {
      app->add_option("--equation", equation, "elliptic, parabolic or wave");
      app->add_option("--format", format, "Result format")->check(CLI::IsMember({"csv", "json"}));
    }
  }

  json merged() const {
    json j = read_config(config);
    if (!j.is_object()) raise(NH_INVALID_ARGUMENT, "config must be a JSON object");
    if (fine_n) j["fine_n"] = *fine_n;
    if (!h.empty()) j["h"] = h;
    if (alpha) j["alpha"] = *alpha;
    if (c1) j["c1"] = *c1;
    if (radius) j["radius_rule"] = *radius;
    if (t_rule) j["t_rule"] = *t_rule;
    if (medium) j["medium"]["kind"] = *medium;
    if (equation) j["equation"] = *equation;
    if (mode) j["mode"] = *mode;
    if (seed) j["seed"] = *seed;
    if (threads) j["threads"] = *threads;
    if (!out.empty()) j["out"] = out;
    return j;
  }
};

struct Mesh {
  nh_mesh* p = nullptr;
  explicit Mesh(int n) { check(nh_mesh_create(n, &p)); }
  ~Mesh() { nh_mesh_destroy(p); }
};

struct Field {
  nh_field* p = nullptr;
  ~Field() { nh_field_destroy(p); }
};

struct Basis {
  nh_basis* p = nullptr;
  ~Basis() { nh_basis_destroy(p); }
};

json effective(const std::string& study, const json& overrides) {
  char* text = nullptr;
  check(nh_study_config(study.c_str(), overrides.dump().c_str(), &text));
  return json::parse(take(text));
}

void generate_field(const json& cfg, const Mesh& mesh, Field& field) {
  check(nh_field_generate(mesh.p, cfg.at("medium").dump().c_str(), cfg.at("seed").get<std::uint64_t>(), &field.p));
}

json field_summary(const Field& field) {
  int n = 0;
  double lo = 0, hi = 0, med = 0;
  std::uint64_t hash = 0;
  check(nh_field_info(field.p, &n, &lo, &hi, &med, &hash));
  return {{"cells_per_axis", n}, {"lambda_min", lo}, {"lambda_max", hi}, {"median", med}, {"hash", hash}};
}

int cmd_gen_field(const Common& c, const std::string& field_format) {
  const json cfg = effective("solve", c.merged());
  Mesh mesh(cfg.at("fine_n").get<int>());
  Field field;
  generate_field(cfg, mesh, field);
  const std::string dir = c.out.empty() ? "." : c.out;
  char* path = nullptr;
  check(nh_field_save(field.p, (dir + "/field").c_str(), field_format.c_str(), &path));
  json out = field_summary(field);
  out["data"] = take(path);
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_build_basis(const Common& c, const std::string& field_path) {
  const json cfg = effective("solve", c.merged());
  Mesh mesh(cfg.at("fine_n").get<int>());
  Field field;
  if (field_path.empty()) generate_field(cfg, mesh, field);
  else check(nh_field_load(field_path.c_str(), &field.p));
  const json recipe{{"mode", cfg.at("mode")},
                    {"alpha", cfg.at("alpha")},
                    {"c1", cfg.at("c1")},
                    {"radius", cfg.at("radius_rule") == "log"
                                   ? "log:" + cfg.at("c1").dump()
                                   : cfg.at("radius_rule").get<std::string>()},
                    {"shape", cfg.at("shape")},
                    {"screening", cfg.at("t_rule")},
                    {"buffer", cfg.at("buffer_rule")},
                    {"contrast_threshold", cfg.at("contrast_threshold")},
                    {"coarse", cfg.at("coarse")},
                    {"solver", cfg.at("local_solver")},
                    {"threads", cfg.at("threads")}};
  const double h = cfg.at("h").at(0).get<double>();
  Basis basis;
  check(nh_basis_build(mesh.p, field.p, h, recipe.dump().c_str(), &basis.p));
  const std::string dir = c.out.empty() ? "basis" : c.out;
  check(nh_basis_save(basis.p, dir.c_str()));
  std::size_t count = 0;
  check(nh_basis_size(basis.p, &count));
  std::cout << json{{"functions", count}, {"h", h}, {"dir", dir}, {"field", field_summary(field)}}.dump(2) << '\n';
  return 0;
}

int cmd_study(const std::string& study, const Common& c) {
  char* text = nullptr;
  check(nh_study_run(study.c_str(), c.merged().dump().c_str(), c.format.c_str(), &text));
  std::cout << take(text);
  return 0;
}

void report(nh_status status, const std::string& message) {
  const json record{{"error", {{"status", nh_status_name(status)}, {"code", static_cast<int>(status)}, {"message", message}}}};
  std::cerr << record.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Localized numerical homogenization"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_version_flag("--version", std::string(nh_version()));
  app.require_subcommand(1);

  Common gen, build, solve, study;
  std::string field_format = "binary";
  std::string field_path;

  auto* gen_cmd = app.add_subcommand("gen-field", "Generate a coefficient field and save it");
  gen.add(gen_cmd, false);
  gen_cmd->add_option("--field-format", field_format, "binary or csv")->check(CLI::IsMember({"binary", "csv"}));

  auto* build_cmd = app.add_subcommand("build-basis", "Build and save a localized basis at the first h");
  build.add(build_cmd, false);
  build_cmd->add_option("--field", field_path, "Saved field (data or sidecar path)");

  auto* solve_cmd = app.add_subcommand("solve", "Solve one equation at the first h against the fine reference");
  solve.add(solve_cmd, true);

  auto* study_cmd = app.add_subcommand("study", "Run a study");
  study_cmd->require_subcommand(1);
  std::string which;
  for (const char* name : {"convergence", "sweep", "channel", "wave"}) {
    auto* sub = study_cmd->add_subcommand(name, std::string(name) + " study");
    study.add(sub, true);
    sub->callback([&which, name] { which = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() != 0) report(NH_INVALID_ARGUMENT, e.what());
    return app.exit(e);
  }

  try {
    if (*gen_cmd) return cmd_gen_field(gen, field_format);
    if (*build_cmd) return cmd_build_basis(build, field_path);
    if (*solve_cmd) return cmd_study("solve", solve);
    return cmd_study(which, study);
  } catch (const Failure& f) {
    report(f.status, f.message);
    return static_cast<int>(f.status);
  } catch (const std::exception& e) {
    report(NH_INTERNAL_ERROR, e.what());
    return static_cast<int>(NH_INTERNAL_ERROR);
  }
}
