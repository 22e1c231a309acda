#include "numhom/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "numhom/error.hpp"

namespace numhom {

namespace fs = std::filesystem;

namespace {

void check_keys(const json& j, const char* what, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw InvalidArgument(std::string(what) + " must be a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || item.key() == k;
    if (!known) throw InvalidArgument("unknown key '" + item.key() + "' in " + what);
  }
}

template <class T>
void read_opt(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad value for '") + key + "': " + e.what());
  }
}

json number_or_string(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

std::ofstream open_out(const std::string& path, bool binary = false) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

std::ifstream open_in(const std::string& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw IoError("cannot read " + path);
  return in;
}

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw IoError("truncated binary file");
  return v;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::uint8_t> grey(std::span<const double> v) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double x : v) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  std::vector<std::uint8_t> px(v.size(), 0);
  if (!(hi > lo)) return px;
  for (std::size_t i = 0; i < v.size(); ++i) {
    px[i] = static_cast<std::uint8_t>(std::lround(255.0 * (v[i] - lo) / (hi - lo)));
  }
  return px;
}

void write_pgm_pixels(const std::string& path, int width, int height, const std::vector<std::uint8_t>& px) {
  auto out = open_out(path, true);
  out << "P5\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
  if (!out) throw IoError("cannot write " + path);
}

std::vector<double> nodal_grid(const FineMesh& mesh, std::span<const double> dofs) {
  if (dofs.size() != mesh.dof_count()) throw InvalidArgument("dof vector does not match the mesh");
  std::vector<double> grid(mesh.node_count(), 0.0);
  for (std::size_t k = 0; k < dofs.size(); ++k) grid[static_cast<std::size_t>(mesh.node_of_dof(static_cast<int>(k)))] = dofs[k];
  return grid;
}

}  // namespace

void to_json(json& j, const FieldSpec& spec) {
  j = json{{"kind", to_string(spec.kind)}, {"seed", spec.seed}, {"density", spec.density}};
  switch (spec.kind) {
    case MediumKind::Constant: j["value"] = spec.value; break;
    case MediumKind::Trig: break;
    case MediumKind::Percolation: j["gamma"] = spec.gamma; break;
    case MediumKind::LogTrig:
      j["modes"] = spec.modes;
      j["amplitude"] = spec.amplitude;
      break;
    case MediumKind::Checkerboard:
      j["gamma"] = spec.gamma;
      j["block"] = spec.block;
      break;
    case MediumKind::Channel: {
      if (!spec.channel.path.empty()) {
        json path = json::array();
        for (const Point& p : spec.channel.path) path.push_back({p.x, p.y});
        j["channel"] = {{"path", path}, {"width", spec.channel.width}};
      }
      j["channel_value"] = spec.channel_value;
      if (spec.background) j["background"] = *spec.background;
      break;
    }
  }
}

void from_json(const json& j, FieldSpec& spec) {
  check_keys(j, "medium", {"kind", "seed", "density", "value", "gamma", "modes", "amplitude", "block", "channel",
                           "channel_value", "background"});
  if (j.contains("kind")) spec.kind = medium_kind_from_string(j.at("kind").get<std::string>());
  read_opt(j, "seed", spec.seed);
  read_opt(j, "density", spec.density);
  read_opt(j, "value", spec.value);
  read_opt(j, "gamma", spec.gamma);
  read_opt(j, "modes", spec.modes);
  read_opt(j, "amplitude", spec.amplitude);
  read_opt(j, "block", spec.block);
  read_opt(j, "channel_value", spec.channel_value);
  if (j.contains("channel")) {
    const json& c = j.at("channel");
    check_keys(c, "channel", {"path", "width"});
    spec.channel.path.clear();
    for (const auto& p : c.at("path")) {
      if (!p.is_array() || p.size() != 2) throw InvalidArgument("channel path points must be [x, y]");
      spec.channel.path.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    spec.channel.width = c.at("width").get<double>();
  }
  if (j.contains("background")) {
    FieldSpec bg;
    from_json(j.at("background"), bg);
    spec.background = std::make_shared<const FieldSpec>(bg);
  }
}

void to_json(json& j, const SolverConfig& cfg) {
  j = json{{"method", to_string(cfg.method)}, {"tolerance", cfg.tolerance}, {"max_iterations", cfg.max_iterations}};
}

void from_json(const json& j, SolverConfig& cfg) {
  check_keys(j, "solver", {"method", "tolerance", "max_iterations"});
  if (j.contains("method")) cfg.method = solver_method_from_string(j.at("method").get<std::string>());
  read_opt(j, "tolerance", cfg.tolerance);
  read_opt(j, "max_iterations", cfg.max_iterations);
}

void to_json(json& j, const BasisRecipe& r) {
  j = json{{"mode", to_string(r.mode)},
           {"alpha", r.alpha},
           {"c1", r.c1},
           {"radius", r.radius.to_string()},
           {"shape", to_string(r.shape)},
           {"screening", r.screening.to_string()},
           {"buffer", r.buffer.to_string()},
           {"contrast_threshold", r.contrast_threshold},
           {"coarse", to_string(r.coarse)},
           {"solver", r.solver},
           {"threads", r.threads}};
}

void from_json(const json& j, BasisRecipe& r) {
  check_keys(j, "recipe", {"mode", "alpha", "c1", "radius", "shape", "screening", "buffer", "contrast_threshold",
                           "coarse", "solver", "threads"});
  if (j.contains("mode")) r.mode = basis_mode_from_string(j.at("mode").get<std::string>());
  read_opt(j, "alpha", r.alpha);
  read_opt(j, "c1", r.c1);
  if (j.contains("radius")) r.radius = LengthRule::parse(j.at("radius").get<std::string>());
  if (j.contains("shape")) r.shape = patch_shape_from_string(j.at("shape").get<std::string>());
  if (j.contains("screening")) r.screening = TimeRule::parse(j.at("screening").get<std::string>());
  if (j.contains("buffer")) r.buffer = LengthRule::parse(j.at("buffer").get<std::string>());
  read_opt(j, "contrast_threshold", r.contrast_threshold);
  if (j.contains("coarse")) r.coarse = coarse_kind_from_string(j.at("coarse").get<std::string>());
  if (j.contains("solver")) from_json(j.at("solver"), r.solver);
  read_opt(j, "threads", r.threads);
}

void to_json(json& j, const ExperimentConfig& c) {
  j = json{{"medium", c.medium},
           {"seed", c.seed},
           {"fine_n", c.fine_n},
           {"h", c.h},
           {"alpha", c.alpha},
           {"c1", c.c1},
           {"radius_rule", c.radius_rule},
           {"shape", c.shape},
           {"t_rule", c.t_rule},
           {"buffer_rule", c.buffer_rule},
           {"contrast_threshold", c.contrast_threshold},
           {"mode", c.mode},
           {"coarse", c.coarse},
           {"equation", to_string(c.equation)},
           {"source", c.source},
           {"dt", c.dt},
           {"t_end", c.t_end},
           {"solver", c.solver},
           {"local_solver", c.local_solver},
           {"sweep_ratios", c.sweep_ratios},
           {"sweep_t", c.sweep_t},
           {"threads", c.threads},
           {"out", c.out_dir}};
}

void from_json(const json& j, ExperimentConfig& c) {
  check_keys(j, "config", {"medium", "seed", "fine_n", "h", "alpha", "c1", "radius_rule", "shape", "t_rule",
                           "buffer_rule", "contrast_threshold", "mode", "coarse", "equation", "source", "dt", "t_end",
                           "solver", "local_solver", "sweep_ratios", "sweep_t", "threads", "out"});
  if (j.contains("medium")) from_json(j.at("medium"), c.medium);
  read_opt(j, "seed", c.seed);
  read_opt(j, "fine_n", c.fine_n);
  if (j.contains("h")) {
    const json& h = j.at("h");
    if (h.is_number()) c.h = {h.get<double>()};
    else read_opt(j, "h", c.h);
  }
  read_opt(j, "alpha", c.alpha);
  read_opt(j, "c1", c.c1);
  read_opt(j, "radius_rule", c.radius_rule);
  read_opt(j, "shape", c.shape);
  if (j.contains("t_rule")) {
    const json& t = j.at("t_rule");
    c.t_rule = t.is_number() ? fmt17(t.get<double>()) : t.get<std::string>();
  }
  read_opt(j, "buffer_rule", c.buffer_rule);
  read_opt(j, "contrast_threshold", c.contrast_threshold);
  read_opt(j, "mode", c.mode);
  read_opt(j, "coarse", c.coarse);
  if (j.contains("equation")) c.equation = equation_from_string(j.at("equation").get<std::string>());
  read_opt(j, "source", c.source);
  read_opt(j, "dt", c.dt);
  read_opt(j, "t_end", c.t_end);
  if (j.contains("solver")) from_json(j.at("solver"), c.solver);
  if (j.contains("local_solver")) from_json(j.at("local_solver"), c.local_solver);
  read_opt(j, "sweep_ratios", c.sweep_ratios);
  read_opt(j, "sweep_t", c.sweep_t);
  read_opt(j, "threads", c.threads);
  read_opt(j, "out", c.out_dir);
}

void to_json(json& j, const StudyRow& row) {
  j = json{{"case", row.label},
           {"h", row.h},
           {"radius", number_or_string(row.radius)},
           {"T", number_or_string(row.T)},
           {"l2", number_or_string(row.l2)},
           {"h1", number_or_string(row.h1)},
           {"linf", number_or_string(row.linf)},
           {"seconds", row.seconds},
           {"status", row.status}};
}

void to_json(json& j, const StudyResult& r) {
  j = json{{"study", r.study},
           {"rows", r.rows},
           {"provenance",
            {{"config_hash", r.provenance.config_hash},
             {"seed", r.provenance.seed},
             {"field_hash", r.provenance.field_hash},
             {"version", r.provenance.version}}}};
}

ExperimentConfig load_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw InvalidArgument("cannot parse " + path + ": " + e.what());
  }
  ExperimentConfig cfg;
  from_json(j, cfg);
  return cfg;
}

std::string save_field(const CoefficientField& field, const std::string& base, FieldFormat format) {
  const bool binary = format == FieldFormat::Binary;
  const std::string data = base + (binary ? ".bin" : ".csv");
  if (binary) {
    auto out = open_out(data, true);
    out.write(reinterpret_cast<const char*>(field.values().data()),
              static_cast<std::streamsize>(field.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(field.density().data()),
              static_cast<std::streamsize>(field.size() * sizeof(double)));
    if (!out) throw IoError("cannot write " + data);
  } else {
    auto out = open_out(data);
    out << "triangle,value,density\n";
    for (std::size_t t = 0; t < field.size(); ++t) {
      out << t << ',' << fmt17(field.values()[t]) << ',' << fmt17(field.density()[t]) << '\n';
    }
    if (!out) throw IoError("cannot write " + data);
  }
  json side{{"format", binary ? "binary" : "csv"},
            {"data", fs::path(data).filename().string()},
            {"cells_per_axis", field.cells_per_axis()},
            {"triangles", field.size()},
            {"seed", field.seed()},
            {"hash", field.hash()},
            {"lambda_min", field.lambda_min()},
            {"lambda_max", field.lambda_max()},
            {"spec", field.spec()},
            {"version", kVersion}};
  if (field.warning()) side["warning"] = field.warning_message();
  write_text(base + ".json", side.dump(2) + "\n");
  return data;
}

CoefficientField load_field(const std::string& path) {
  fs::path side(path);
  if (side.extension() != ".json") side.replace_extension(".json");
  json j;
  try {
    j = json::parse(read_text(side.string()));
  } catch (const json::parse_error& e) {
    throw IoError("cannot parse " + side.string() + ": " + e.what());
  }
  const int n = j.at("cells_per_axis").get<int>();
  const std::size_t count = j.at("triangles").get<std::size_t>();
  if (n < 1 || count != 2u * static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
    throw IoError("field sidecar has inconsistent sizes");
  }
  const std::string data = (side.parent_path() / j.at("data").get<std::string>()).string();
  std::vector<double> values(count), density(count);
  if (j.at("format").get<std::string>() == "binary") {
    auto in = open_in(data, true);
    in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(count * sizeof(double)));
    in.read(reinterpret_cast<char*>(density.data()), static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw IoError("truncated field data " + data);
  } else {
    auto in = open_in(data);
    std::string line;
    std::getline(in, line);
    for (std::size_t t = 0; t < count; ++t) {
      if (!std::getline(in, line)) throw IoError("truncated field data " + data);
      std::stringstream ss(line);
      std::string a, b, c;
      std::getline(ss, a, ',');
      std::getline(ss, b, ',');
      std::getline(ss, c, ',');
      try {
        if (std::stoull(a) != t) throw IoError("field rows out of order in " + data);
        values[t] = std::stod(b);
        density[t] = std::stod(c);
      } catch (const std::logic_error&) {
        throw IoError("bad field row " + std::to_string(t) + " in " + data);
      }
    }
  }
  FieldSpec spec;
  if (j.contains("spec")) from_json(j.at("spec"), spec);
  CoefficientField field(n, std::move(values), spec);
  field.set_density(std::move(density));
  if (j.contains("warning")) field.set_warning(j.at("warning").get<std::string>());
  if (j.contains("hash") && j.at("hash").get<std::uint64_t>() != field.hash()) {
    throw IoError("field hash mismatch for " + data);
  }
  return field;
}

void save_basis(const LocalizedBasis& basis, const std::string& dir) {
  if (!basis.mesh) throw InvalidArgument("basis has no mesh");
  fs::create_directories(dir);
  const fs::path root(dir);
  {
    auto out = open_out((root / "basis.bin").string(), true);
    out.write("NHBASIS1", 8);
    put<std::uint64_t>(out, basis.size());
    put<std::uint64_t>(out, basis.mesh->dof_count());
    for (const auto& f : basis.functions) {
      put<std::uint64_t>(out, f.size());
      for (int i : f.index) put<std::int32_t>(out, i);
      for (double v : f.value) put<double>(out, v);
    }
    if (!out) throw IoError("cannot write basis.bin");
  }
  json funcs = json::array();
  for (const auto& info : basis.info) {
    funcs.push_back({{"center", {info.center.x, info.center.y}},
                     {"radius", number_or_string(info.radius)},
                     {"screening_time", number_or_string(info.screening_time)},
                     {"cells", info.cells},
                     {"dofs", info.dofs},
                     {"whole_mesh", info.whole_mesh},
                     {"warning", info.warning},
                     {"iterations", info.iterations},
                     {"residual", info.residual}});
  }
  json meta{{"version", kVersion},
            {"fine_n", basis.mesh->cells_per_axis()},
            {"h", basis.h},
            {"count", basis.size()},
            {"coeff_hash", basis.coeff_hash},
            {"recipe", basis.recipe},
            {"tolerance", basis.recipe.solver.tolerance},
            {"functions", funcs}};
  write_text((root / "basis.json").string(), meta.dump(2) + "\n");
}

LocalizedBasis load_basis(const FineMesh& mesh, const std::string& dir) {
  const fs::path root(dir);
  json meta;
  try {
    meta = json::parse(read_text((root / "basis.json").string()));
  } catch (const json::parse_error& e) {
    throw IoError(std::string("cannot parse basis.json: ") + e.what());
  }
  if (meta.at("fine_n").get<int>() != mesh.cells_per_axis()) throw InvalidArgument("basis was built on another mesh");
  LocalizedBasis basis;
  basis.mesh = &mesh;
  basis.h = meta.at("h").get<double>();
  basis.coeff_hash = meta.at("coeff_hash").get<std::uint64_t>();
  from_json(meta.at("recipe"), basis.recipe);
  auto in = open_in((root / "basis.bin").string(), true);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, "NHBASIS1", 8) != 0) throw IoError("basis.bin has a bad header");
  const auto count = get<std::uint64_t>(in);
  const auto dim = get<std::uint64_t>(in);
  if (dim != mesh.dof_count()) throw IoError("basis.bin dimension does not match the mesh");
  basis.functions.resize(count);
  for (auto& f : basis.functions) {
    const auto nnz = get<std::uint64_t>(in);
    if (nnz > dim) throw IoError("basis.bin record too large");
    f.index.resize(nnz);
    f.value.resize(nnz);
    for (auto& i : f.index) {
      i = get<std::int32_t>(in);
      if (i < 0 || static_cast<std::uint64_t>(i) >= dim) throw IoError("basis.bin index out of range");
    }
    for (auto& v : f.value) v = get<double>(in);
  }
  const json& funcs = meta.at("functions");
  if (funcs.size() != count) throw IoError("basis.json and basis.bin disagree on the function count");
  auto num = [](const json& v) {
    if (v.is_string()) {
      const std::string s = v.get<std::string>();
      if (s == "inf") return std::numeric_limits<double>::infinity();
      return std::numeric_limits<double>::quiet_NaN();
    }
    return v.get<double>();
  };
  for (const auto& f : funcs) {
    LocalInfo info;
    info.center = {f.at("center")[0].get<double>(), f.at("center")[1].get<double>()};
    info.radius = num(f.at("radius"));
    info.screening_time = num(f.at("screening_time"));
    info.alpha = basis.recipe.alpha;
    info.c1 = basis.recipe.c1;
    info.cells = f.at("cells").get<std::size_t>();
    info.dofs = f.at("dofs").get<std::size_t>();
    info.whole_mesh = f.at("whole_mesh").get<bool>();
    info.warning = f.at("warning").get<bool>();
    info.iterations = f.at("iterations").get<int>();
    info.residual = f.at("residual").get<double>();
    basis.info.push_back(info);
  }
  return basis;
}

void write_nodal_csv(const FineMesh& mesh, std::span<const double> dofs, const std::string& path) {
  const auto grid = nodal_grid(mesh, dofs);
  const int m = mesh.cells_per_axis() + 1;
  auto out = open_out(path);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      if (i) out << ',';
      out << fmt17(grid[static_cast<std::size_t>(mesh.node_index(i, j))]);
    }
    out << '\n';
  }
  if (!out) throw IoError("cannot write " + path);
}

void write_pgm(const FineMesh& mesh, std::span<const double> dofs, const std::string& path) {
  const auto grid = nodal_grid(mesh, dofs);
  const int m = mesh.cells_per_axis() + 1;
  const auto px = grey(grid);
  std::vector<std::uint8_t> flipped(px.size());
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      flipped[static_cast<std::size_t>((m - 1 - j) * m + i)] = px[static_cast<std::size_t>(mesh.node_index(i, j))];
    }
  }
  write_pgm_pixels(path, m, m, flipped);
}

void write_field_pgm(const CoefficientField& field, const std::string& path) {
  const int n = field.cells_per_axis();
  std::vector<double> cells(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int c = j * n + i;
      const double mean = 0.5 * (field.value(2 * c) + field.value(2 * c + 1));
      cells[static_cast<std::size_t>((n - 1 - j) * n + i)] = std::log(mean);
    }
  }
  write_pgm_pixels(path, n, n, grey(cells));
}

void write_text(const std::string& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw IoError("cannot write " + path);
}

std::string read_text(const std::string& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace numhom
