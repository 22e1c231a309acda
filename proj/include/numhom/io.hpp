#pragma once

#include <json.hpp>
#include <span>
#include <string>
#include <vector>

#include "numhom/bench.hpp"
#include "numhom/coeff.hpp"
#include "numhom/fem.hpp"
#include "numhom/locbasis.hpp"

namespace numhom {

using nlohmann::json;

void to_json(json& j, const FieldSpec& spec);
void from_json(const json& j, FieldSpec& spec);
void to_json(json& j, const SolverConfig& cfg);
void from_json(const json& j, SolverConfig& cfg);
void to_json(json& j, const BasisRecipe& recipe);
void from_json(const json& j, BasisRecipe& recipe);
void to_json(json& j, const ExperimentConfig& cfg);
void from_json(const json& j, ExperimentConfig& cfg);
void to_json(json& j, const StudyRow& row);
void to_json(json& j, const StudyResult& result);

ExperimentConfig load_config(const std::string& path);

enum class FieldFormat { Binary, Csv };

/// Writes <base>.bin or <base>.csv with one value per triangle in index
/// order, plus the sidecar <base>.json (spec, seed, cells per axis, format,
/// hash). Returns the data file path.
std::string save_field(const CoefficientField& field, const std::string& base, FieldFormat format);
/// Reads a field from its sidecar or data path.
CoefficientField load_field(const std::string& path);

/// Writes basis.bin (per-function sparse records) and basis.json (recipe,
/// coefficient hash, tolerances, per-function metadata) into dir.
void save_basis(const LocalizedBasis& basis, const std::string& dir);
LocalizedBasis load_basis(const FineMesh& mesh, const std::string& dir);

/// (n+1)^2 nodal values, one grid row per line, bottom row first.
void write_nodal_csv(const FineMesh& mesh, std::span<const double> dofs, const std::string& path);
/// Binary greyscale heatmap of the nodal values, top row first.
void write_pgm(const FineMesh& mesh, std::span<const double> dofs, const std::string& path);

/// Log-scaled greyscale image of a coefficient, one pixel per square cell.
void write_field_pgm(const CoefficientField& field, const std::string& path);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace numhom
