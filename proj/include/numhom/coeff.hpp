#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "numhom/grid.hpp"

namespace numhom {

enum class MediumKind { Constant, Trig, Percolation, LogTrig, Channel, Checkerboard };

const char* to_string(MediumKind kind);
MediumKind medium_kind_from_string(const std::string& name);

struct ChannelGeometry {
  std::vector<Point> path;
  double width = 0.0;
};

/// Declarative description of a medium. Fields not used by `kind` are ignored.
struct FieldSpec {
  MediumKind kind = MediumKind::Constant;
  double value = 1.0;           // constant
  double gamma = 4.0;           // percolation, checkerboard
  int modes = 6;                // logtrig: R
  double amplitude = 0.3;       // logtrig: coefficients ~ U[-amplitude, amplitude]
  int block = 1;                // checkerboard: square cells per block
  ChannelGeometry channel;      // channel
  double channel_value = 100.0; // channel
  std::shared_ptr<const FieldSpec> background;  // channel
  double density = 1.0;         // uniform rho
  std::uint64_t seed = 0;
};

/// Piecewise constant isotropic conductivity, one value per fine triangle,
/// plus an optional density (all ones unless set).
class CoefficientField {
 public:
  CoefficientField(int cells_per_axis, std::vector<double> values, FieldSpec spec = {});

  int cells_per_axis() const noexcept { return n_; }
  std::size_t size() const noexcept { return values_.size(); }
  double value(int t) const { return values_[static_cast<std::size_t>(t)]; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> density() const noexcept { return density_; }
  void set_density(std::vector<double> density);

  double lambda_min() const noexcept { return lambda_min_; }
  double lambda_max() const noexcept { return lambda_max_; }
  double contrast() const noexcept { return lambda_max_ / lambda_min_; }
  double median() const;

  const FieldSpec& spec() const noexcept { return spec_; }
  std::uint64_t seed() const noexcept { return spec_.seed; }
  /// FNV-1a over the raw bytes of values and density.
  std::uint64_t hash() const;

  bool warning() const noexcept { return !warning_.empty(); }
  const std::string& warning_message() const noexcept { return warning_; }
  void set_warning(std::string message) { warning_ = std::move(message); }

 private:
  int n_;
  std::vector<double> values_;
  std::vector<double> density_;
  FieldSpec spec_;
  double lambda_min_ = 0.0;
  double lambda_max_ = 0.0;
  std::string warning_;
};

/// The six-term trigonometric multi-scale conductivity.
double trig_coefficient(Point p);

/// Wave vectors summed by the log-trigonometric medium: the half of the box
/// {-R..R}^2 with k1 > 0, or k1 == 0 and k2 >= 0 (k = 0 included once).
std::vector<std::array<int, 2>> logtrig_modes(int R);

/// S-shaped reference channel crossing the domain, two fine cells wide.
ChannelGeometry reference_channel(const FineMesh& mesh);

CoefficientField gen_constant(const FineMesh& mesh, double value);
CoefficientField gen_trig(const FineMesh& mesh);
CoefficientField gen_percolation(const FineMesh& mesh, double gamma, std::uint64_t seed);
CoefficientField gen_logtrig(const FineMesh& mesh, int R, double amplitude, std::uint64_t seed);
CoefficientField gen_channel(const FineMesh& mesh, const ChannelGeometry& channel, double channel_value,
                             const FieldSpec& background, std::uint64_t seed);
CoefficientField gen_checkerboard(const FineMesh& mesh, double gamma, int block);

/// Dispatches on spec.kind and applies spec.density.
CoefficientField generate(const FineMesh& mesh, const FieldSpec& spec);

/// Distance from p to a polyline.
double distance_to_path(Point p, std::span<const Point> path);

}  // namespace numhom
