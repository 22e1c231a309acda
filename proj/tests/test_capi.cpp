#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "numhom/numhom.h"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  nh_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("status codes and errors") {
  CHECK(std::string(nh_version()) == "0.1.0");
  CHECK(std::string(nh_status_name(NH_SOLVER_FAILURE)) == "solver_failure");
  nh_mesh* mesh = nullptr;
  CHECK(nh_mesh_create(0, &mesh) == NH_INVALID_ARGUMENT);
  CHECK(mesh == nullptr);
  CHECK(std::strlen(nh_last_error()) > 0);
  CHECK(nh_mesh_create(8, nullptr) == NH_INVALID_ARGUMENT);
  nh_field* field = nullptr;
  CHECK(nh_field_load("/nonexistent/field.json", &field) == NH_IO_ERROR);
  char* out = nullptr;
  CHECK(nh_study_run("convergence", "{\"h\": 0.3}", "json", &out) == NH_INVALID_ARGUMENT);
  CHECK(out == nullptr);
  CHECK(nh_study_run("convergence", "{not json", "json", &out) == NH_INVALID_ARGUMENT);
  CHECK(nh_study_run("poster", nullptr, "json", &out) == NH_INVALID_ARGUMENT);
}

TEST_CASE("mesh, field and basis lifecycle") {
  nh_mesh* mesh = nullptr;
  REQUIRE(nh_mesh_create(16, &mesh) == NH_OK);
  size_t nodes = 0, tris = 0, dofs = 0;
  REQUIRE(nh_mesh_info(mesh, &nodes, &tris, &dofs) == NH_OK);
  CHECK(nodes == 289);
  CHECK(tris == 512);
  CHECK(dofs == 225);

  nh_field* field = nullptr;
  REQUIRE(nh_field_generate(mesh, "{\"kind\":\"percolation\",\"gamma\":4}", 3, &field) == NH_OK);
  int n = 0;
  double lo = 0, hi = 0, med = 0;
  uint64_t hash = 0;
  REQUIRE(nh_field_info(field, &n, &lo, &hi, &med, &hash) == NH_OK);
  CHECK(n == 16);
  CHECK(lo == 0.25);
  CHECK(hi == 4.0);
  nh_field* bad = nullptr;
  CHECK(nh_field_generate(mesh, "{\"kind\":\"plaid\"}", 3, &bad) == NH_INVALID_ARGUMENT);
  CHECK(bad == nullptr);

  const fs::path dir = fs::temp_directory_path() / "numhom-capi-test";
  fs::create_directories(dir);
  char* data = nullptr;
  REQUIRE(nh_field_save(field, (dir / "field").c_str(), "csv", &data) == NH_OK);
  nh_field* loaded = nullptr;
  REQUIRE(nh_field_load(take(data).c_str(), &loaded) == NH_OK);
  uint64_t hash2 = 0;
  REQUIRE(nh_field_info(loaded, nullptr, nullptr, nullptr, nullptr, &hash2) == NH_OK);
  CHECK(hash2 == hash);
  const double* values = nullptr;
  size_t count = 0;
  REQUIRE(nh_field_values(loaded, &values, &count) == NH_OK);
  CHECK(count == tris);
  CHECK(nh_field_save(field, (dir / "field").c_str(), "xml", nullptr) == NH_INVALID_ARGUMENT);

  nh_basis* basis = nullptr;
  REQUIRE(nh_basis_build(mesh, field, 0.25, "{\"radius\":\"3h\"}", &basis) == NH_OK);
  size_t size = 0;
  REQUIRE(nh_basis_size(basis, &size) == NH_OK);
  CHECK(size == 49);
  std::vector<double> psi(dofs);
  CHECK(nh_basis_function(basis, 24, psi.data(), psi.size()) == NH_OK);
  CHECK(nh_basis_function(basis, 49, psi.data(), psi.size()) == NH_INVALID_ARGUMENT);
  CHECK(nh_basis_function(basis, 0, psi.data(), 3) == NH_INVALID_ARGUMENT);
  nh_basis* odd = nullptr;
  CHECK(nh_basis_build(mesh, field, 0.3, nullptr, &odd) == NH_INVALID_ARGUMENT);

  REQUIRE(nh_basis_save(basis, (dir / "basis").c_str()) == NH_OK);
  nh_basis* reloaded = nullptr;
  REQUIRE(nh_basis_load(mesh, (dir / "basis").c_str(), &reloaded) == NH_OK);

  std::vector<double> fine(dofs), coarse(dofs), again(dofs);
  REQUIRE(nh_solve_elliptic(mesh, field, nullptr, "sin", fine.data(), fine.size()) == NH_OK);
  REQUIRE(nh_solve_elliptic(mesh, field, basis, "sin", coarse.data(), coarse.size()) == NH_OK);
  REQUIRE(nh_solve_elliptic(mesh, field, reloaded, "sin", again.data(), again.size()) == NH_OK);
  CHECK(coarse == again);
  double errors[3] = {0, 0, 0};
  REQUIRE(nh_error_report(mesh, fine.data(), coarse.data(), dofs, errors) == NH_OK);
  CHECK(errors[1] > 0.0);
  CHECK(errors[1] < 0.5);
  REQUIRE(nh_error_report(mesh, fine.data(), fine.data(), dofs, errors) == NH_OK);
  CHECK(errors[0] == 0.0);
  CHECK(nh_solve_elliptic(mesh, field, basis, "cos", coarse.data(), coarse.size()) == NH_INVALID_ARGUMENT);

  nh_basis_destroy(reloaded);
  nh_basis_destroy(basis);
  nh_field_destroy(loaded);
  nh_field_destroy(field);
  nh_mesh_destroy(mesh);
  nh_basis_destroy(nullptr);
  fs::remove_all(dir);
}

TEST_CASE("studies through the C API") {
  char* out = nullptr;
  REQUIRE(nh_study_config("sweep", "{\"fine_n\": 32}", &out) == NH_OK);
  const json cfg = json::parse(take(out));
  CHECK(cfg.at("fine_n") == 32);
  CHECK(cfg.at("h") == json::array({0.125}));

  REQUIRE(nh_study_run("convergence", "{\"fine_n\": 32, \"h\": [0.5, 0.25]}", "json", &out) == NH_OK);
  const json res = json::parse(take(out));
  CHECK(res.at("study") == "convergence");
  REQUIRE(res.at("rows").size() == 2);
  CHECK(res.at("rows")[1].at("h1").get<double>() < res.at("rows")[0].at("h1").get<double>());

  REQUIRE(nh_study_run("solve", "{\"fine_n\": 32, \"h\": 0.25}", "csv", &out) == NH_OK);
  const std::string csv = take(out);
  CHECK(csv.find("case,h,radius,T,l2,h1,linf,seconds,status") != std::string::npos);
  CHECK(csv.find("\nelliptic,") != std::string::npos);
}
