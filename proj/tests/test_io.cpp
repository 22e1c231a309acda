#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "numhom/error.hpp"
#include "numhom/evolve.hpp"
#include "numhom/io.hpp"

using namespace numhom;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("numhom-test-" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("field files round trip bit-exactly") {
  TempDir dir;
  const FineMesh mesh(16);
  FieldSpec spec;
  spec.kind = MediumKind::LogTrig;
  spec.modes = 3;
  spec.amplitude = 0.3;
  spec.seed = 9;
  const CoefficientField f = generate(mesh, spec);
  for (FieldFormat fmt : {FieldFormat::Binary, FieldFormat::Csv}) {
    const std::string base = dir / (fmt == FieldFormat::Binary ? "bin_field" : "csv_field");
    const std::string data = save_field(f, base, fmt);
    CHECK(fs::exists(data));
    CHECK(fs::exists(base + ".json"));
    for (const std::string& p : {data, base + ".json"}) {
      const CoefficientField g = load_field(p);
      CHECK(g.hash() == f.hash());
      CHECK(std::equal(g.values().begin(), g.values().end(), f.values().begin()));
      CHECK(std::equal(g.density().begin(), g.density().end(), f.density().begin()));
    }
    const json side = json::parse(read_text(base + ".json"));
    CHECK(side.at("cells_per_axis") == 16);
    CHECK(side.at("triangles") == mesh.triangle_count());
    CHECK(side.at("spec").at("kind") == "logtrig");
  }

  const std::string csv = dir / "csv_field.csv";
  std::string text = read_text(csv);
  const auto pos = text.find('\n', text.find('\n') + 1);
  text.insert(pos, "9");
  write_text(csv, text);
  CHECK_THROWS_AS(load_field(csv), IoError);
  CHECK_THROWS_AS(load_field(dir / "missing.json"), IoError);
}

TEST_CASE("basis files reproduce the coarse operators") {
  TempDir dir;
  const FineMesh mesh(32);
  const CoefficientField coeff = gen_trig(mesh);
  BasisRecipe r;
  r.radius = LengthRule::parse("3h");
  const LocalizedBasis basis = build_basis(mesh, coeff, build_coarse_basis(mesh, CoarseLattice(mesh, 0.25)), r);
  save_basis(basis, dir / "basis");
  const LocalizedBasis back = load_basis(mesh, dir / "basis");
  REQUIRE(back.size() == basis.size());
  CHECK(back.h == basis.h);
  CHECK(back.coeff_hash == basis.coeff_hash);
  CHECK(back.recipe.radius.to_string() == basis.recipe.radius.to_string());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    CHECK(back.functions[i].index == basis.functions[i].index);
    CHECK(back.functions[i].value == basis.functions[i].value);
    CHECK(back.info[i].dofs == basis.info[i].dofs);
  }
  const CoarseOperatorSet a(basis, coeff);
  const CoarseOperatorSet b(back, coeff);
  CHECK(a.stiffness() == b.stiffness());
  CHECK(a.mass() == b.mass());

  CHECK_THROWS_AS(load_basis(FineMesh(16), dir / "basis"), InvalidArgument);
  std::ofstream(dir / "basis/basis.bin", std::ios::binary) << "NOTABASIS";
  CHECK_THROWS_AS(load_basis(mesh, dir / "basis"), IoError);
}

TEST_CASE("snapshot writers") {
  TempDir dir;
  const FineMesh mesh(8);
  std::vector<double> u(mesh.dof_count());
  for (std::size_t d = 0; d < u.size(); ++d) u[d] = static_cast<double>(d);
  write_nodal_csv(mesh, u, dir / "u.csv");
  std::ifstream in(dir / "u.csv");
  std::string line;
  int rows = 0;
  std::getline(in, line);
  CHECK(line.rfind("0,0,0", 0) == 0);
  for (rows = 1; std::getline(in, line); ++rows) CHECK(std::count(line.begin(), line.end(), ',') == 8);
  CHECK(rows == 9);

  write_pgm(mesh, u, dir / "u.pgm");
  const std::string pgm = read_text(dir / "u.pgm");
  CHECK(pgm.rfind("P5\n9 9\n255\n", 0) == 0);
  CHECK(pgm.size() == std::string("P5\n9 9\n255\n").size() + 81);
  write_field_pgm(gen_trig(mesh), dir / "a.pgm");
  CHECK(read_text(dir / "a.pgm").rfind("P5\n8 8\n255\n", 0) == 0);
  CHECK_THROWS_AS(write_pgm(mesh, std::vector<double>(3), dir / "x.pgm"), InvalidArgument);
  CHECK_THROWS_AS(read_text(dir / "nope.txt"), IoError);
}
