#include "numhom/numhom.h"

#include <cstring>
#include <filesystem>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>

#include "numhom/bench.hpp"
#include "numhom/coarse.hpp"
#include "numhom/error.hpp"
#include "numhom/evolve.hpp"
#include "numhom/io.hpp"

struct nh_mesh {
  numhom::FineMesh mesh;
};

struct nh_field {
  numhom::CoefficientField field;
};

struct nh_basis {
  const numhom::FineMesh* mesh;
  numhom::LocalizedBasis basis;
};

namespace {

thread_local std::string last_error;

nh_status fail(nh_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <class F>
nh_status guard(F&& body) {
  try {
    last_error.clear();
    body();
    return NH_OK;
  } catch (const numhom::Error& e) {
    switch (e.code()) {
      case numhom::ErrorCode::InvalidArgument: return fail(NH_INVALID_ARGUMENT, e.what());
      case numhom::ErrorCode::SolverFailure: return fail(NH_SOLVER_FAILURE, e.what());
      case numhom::ErrorCode::Io: return fail(NH_IO_ERROR, e.what());
      case numhom::ErrorCode::Internal: return fail(NH_INTERNAL_ERROR, e.what());
    }
    return fail(NH_INTERNAL_ERROR, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(NH_IO_ERROR, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(NH_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(NH_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(NH_INTERNAL_ERROR, e.what());
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw numhom::InvalidArgument(what);
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

numhom::json parse_json(const char* text) {
  if (!text || !*text) return numhom::json::object();
  try {
    return numhom::json::parse(text);
  } catch (const numhom::json::parse_error& e) {
    throw numhom::InvalidArgument(std::string("malformed JSON: ") + e.what());
  }
}

numhom::ExperimentConfig merged_config(const char* study, const char* config_json) {
  require(study != nullptr, "study name is null");
  numhom::ExperimentConfig cfg = numhom::study_defaults(study);
  numhom::from_json(parse_json(config_json), cfg);
  return cfg;
}

}  // namespace

extern "C" {

const char* nh_version(void) { return numhom::kVersion; }

const char* nh_last_error(void) { return last_error.c_str(); }

const char* nh_status_name(nh_status status) {
  switch (status) {
    case NH_OK: return "ok";
    case NH_INVALID_ARGUMENT: return "invalid_argument";
    case NH_SOLVER_FAILURE: return "solver_failure";
    case NH_IO_ERROR: return "io_error";
    case NH_INTERNAL_ERROR: return "internal_error";
  }
  return "unknown";
}

void nh_string_free(char* s) { std::free(s); }

nh_status nh_mesh_create(int cells_per_axis, nh_mesh** out) {
  return guard([&] {
    require(out != nullptr, "output handle is null");
    *out = nullptr;
    *out = new nh_mesh{numhom::FineMesh(cells_per_axis)};
  });
}

void nh_mesh_destroy(nh_mesh* mesh) { delete mesh; }

nh_status nh_mesh_info(const nh_mesh* mesh, size_t* nodes, size_t* triangles, size_t* dofs) {
  return guard([&] {
    require(mesh != nullptr, "mesh handle is null");
    if (nodes) *nodes = mesh->mesh.node_count();
    if (triangles) *triangles = mesh->mesh.triangle_count();
    if (dofs) *dofs = mesh->mesh.dof_count();
  });
}

nh_status nh_field_generate(const nh_mesh* mesh, const char* spec_json, uint64_t seed, nh_field** out) {
  return guard([&] {
    require(mesh != nullptr && out != nullptr, "null handle");
    *out = nullptr;
    numhom::FieldSpec spec;
    numhom::from_json(parse_json(spec_json), spec);
    spec.seed = seed;
    *out = new nh_field{numhom::generate(mesh->mesh, spec)};
  });
}

nh_status nh_field_save(const nh_field* field, const char* base, const char* format, char** data_path) {
  return guard([&] {
    require(field != nullptr && base != nullptr, "null argument");
    const std::string fmt = format ? format : "binary";
    require(fmt == "binary" || fmt == "csv", "field format must be binary or csv");
    const std::string path = numhom::save_field(
        field->field, base, fmt == "csv" ? numhom::FieldFormat::Csv : numhom::FieldFormat::Binary);
    if (data_path) *data_path = dup(path);
  });
}

nh_status nh_field_load(const char* path, nh_field** out) {
  return guard([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    *out = new nh_field{numhom::load_field(path)};
  });
}

void nh_field_destroy(nh_field* field) { delete field; }

nh_status nh_field_info(const nh_field* field, int* cells_per_axis, double* lambda_min, double* lambda_max,
                        double* median, uint64_t* hash) {
  return guard([&] {
    require(field != nullptr, "field handle is null");
    if (cells_per_axis) *cells_per_axis = field->field.cells_per_axis();
    if (lambda_min) *lambda_min = field->field.lambda_min();
    if (lambda_max) *lambda_max = field->field.lambda_max();
    if (median) *median = field->field.median();
    if (hash) *hash = field->field.hash();
  });
}

nh_status nh_field_values(const nh_field* field, const double** values, size_t* count) {
  return guard([&] {
    require(field != nullptr && values != nullptr && count != nullptr, "null argument");
    *values = field->field.values().data();
    *count = field->field.size();
  });
}

nh_status nh_basis_build(const nh_mesh* mesh, const nh_field* field, double h, const char* recipe_json,
                         nh_basis** out) {
  return guard([&] {
    require(mesh != nullptr && field != nullptr && out != nullptr, "null handle");
    *out = nullptr;
    require(field->field.cells_per_axis() == mesh->mesh.cells_per_axis(), "field and mesh sizes differ");
    numhom::BasisRecipe recipe;
    numhom::from_json(parse_json(recipe_json), recipe);
    recipe.validate();
    const numhom::CoarseLattice lattice(mesh->mesh, h);
    const numhom::CoarseBasis coarse = numhom::build_coarse_basis(mesh->mesh, lattice, recipe.coarse);
    *out = new nh_basis{&mesh->mesh, numhom::build_basis(mesh->mesh, field->field, coarse, recipe)};
  });
}

nh_status nh_basis_save(const nh_basis* basis, const char* dir) {
  return guard([&] {
    require(basis != nullptr && dir != nullptr, "null argument");
    numhom::save_basis(basis->basis, dir);
  });
}

nh_status nh_basis_load(const nh_mesh* mesh, const char* dir, nh_basis** out) {
  return guard([&] {
    require(mesh != nullptr && dir != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    *out = new nh_basis{&mesh->mesh, numhom::load_basis(mesh->mesh, dir)};
  });
}

void nh_basis_destroy(nh_basis* basis) { delete basis; }

nh_status nh_basis_size(const nh_basis* basis, size_t* count) {
  return guard([&] {
    require(basis != nullptr && count != nullptr, "null argument");
    *count = basis->basis.size();
  });
}

nh_status nh_basis_function(const nh_basis* basis, size_t i, double* dofs, size_t len) {
  return guard([&] {
    require(basis != nullptr && dofs != nullptr, "null argument");
    require(i < basis->basis.size(), "basis index out of range");
    require(len == basis->mesh->dof_count(), "output length does not match the mesh");
    std::fill(dofs, dofs + len, 0.0);
    basis->basis.functions[i].scatter(std::span<double>(dofs, len));
  });
}

nh_status nh_solve_elliptic(const nh_mesh* mesh, const nh_field* field, const nh_basis* basis, const char* source,
                            double* dofs, size_t len) {
  return guard([&] {
    require(mesh != nullptr && field != nullptr && dofs != nullptr, "null argument");
    require(len == mesh->mesh.dof_count(), "output length does not match the mesh");
    require(field->field.cells_per_axis() == mesh->mesh.cells_per_axis(), "field and mesh sizes differ");
    const auto load = numhom::assemble_load(mesh->mesh, numhom::source_function(source ? source : "sin"));
    std::vector<double> u;
    if (basis) {
      require(basis->mesh->cells_per_axis() == mesh->mesh.cells_per_axis(), "basis and mesh sizes differ");
      const numhom::CoarseOperatorSet ops(mesh->mesh, field->field, basis->basis.functions);
      u = numhom::galerkin_elliptic(ops, load).fine.coeffs;
    } else {
      const numhom::FineOperatorSet ops(mesh->mesh, field->field);
      u = numhom::galerkin_elliptic(ops, load).fine.coeffs;
    }
    std::copy(u.begin(), u.end(), dofs);
  });
}

nh_status nh_error_report(const nh_mesh* mesh, const double* reference, const double* candidate, size_t len,
                          double errors[3]) {
  return guard([&] {
    require(mesh != nullptr && reference != nullptr && candidate != nullptr && errors != nullptr, "null argument");
    require(len == mesh->mesh.dof_count(), "input length does not match the mesh");
    const numhom::FEFunction ref(mesh->mesh, std::vector<double>(reference, reference + len));
    const numhom::FEFunction cand(mesh->mesh, std::vector<double>(candidate, candidate + len));
    const auto e = numhom::error_report(ref, cand);
    errors[0] = e.rel_l2;
    errors[1] = e.rel_h1;
    errors[2] = e.rel_linf;
  });
}

nh_status nh_study_run(const char* study, const char* config_json, const char* format, char** result) {
  return guard([&] {
    require(result != nullptr, "output pointer is null");
    *result = nullptr;
    const std::string fmt = format ? format : "json";
    require(fmt == "json" || fmt == "csv", "format must be json or csv");
    const numhom::ExperimentConfig cfg = merged_config(study, config_json);
    const std::string name = study;
    numhom::StudyResult res;
    std::vector<std::string> files;
    if (name == "convergence") res = numhom::run_convergence_study(cfg);
    else if (name == "sweep") res = numhom::run_localization_sweep(cfg);
    else if (name == "channel") res = numhom::run_channel_buffer_study(cfg);
    else if (name == "solve") res = numhom::run_single(cfg);
    else if (name == "wave") {
      auto demo = numhom::run_wave_demo(cfg);
      res = std::move(demo.result);
      files = std::move(demo.files);
    } else {
      throw numhom::InvalidArgument("unknown study '" + name + "'");
    }
    if (fmt == "csv") {
      std::ostringstream os;
      numhom::write_study_csv(res, os);
      *result = dup(os.str());
    } else {
      numhom::json j = res;
      if (!files.empty()) j["files"] = files;
      *result = dup(j.dump(2) + "\n");
    }
  });
}

nh_status nh_study_config(const char* study, const char* config_json, char** result) {
  return guard([&] {
    require(result != nullptr, "output pointer is null");
    *result = nullptr;
    const numhom::json j = merged_config(study, config_json);
    *result = dup(j.dump(2) + "\n");
  });
}

}  // extern "C"
