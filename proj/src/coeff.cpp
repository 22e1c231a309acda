#include "numhom/coeff.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

#include "numhom/error.hpp"
#include "numhom/rng.hpp"

namespace numhom {

const char* to_string(MediumKind kind) {
  switch (kind) {
    case MediumKind::Constant: return "constant";
    case MediumKind::Trig: return "trig";
    case MediumKind::Percolation: return "percolation";
    case MediumKind::LogTrig: return "logtrig";
    case MediumKind::Channel: return "channel";
    case MediumKind::Checkerboard: return "checkerboard";
  }
  return "unknown";
}

MediumKind medium_kind_from_string(const std::string& name) {
  for (auto kind : {MediumKind::Constant, MediumKind::Trig, MediumKind::Percolation, MediumKind::LogTrig,
                    MediumKind::Channel, MediumKind::Checkerboard}) {
    if (name == to_string(kind)) return kind;
  }
  throw InvalidArgument("unknown medium kind '" + name + "'");
}

CoefficientField::CoefficientField(int cells_per_axis, std::vector<double> values, FieldSpec spec)
    : n_(cells_per_axis), values_(std::move(values)), spec_(std::move(spec)) {
  if (n_ < 1 || values_.size() != 2 * static_cast<std::size_t>(n_) * n_) {
    throw InvalidArgument("coefficient field needs one value per fine triangle");
  }
  lambda_min_ = values_.front();
  lambda_max_ = values_.front();
  for (double v : values_) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("coefficient values must be finite and strictly positive");
    }
    lambda_min_ = std::min(lambda_min_, v);
    lambda_max_ = std::max(lambda_max_, v);
  }
  density_.assign(values_.size(), 1.0);
}

void CoefficientField::set_density(std::vector<double> density) {
  if (density.size() != values_.size()) {
    throw InvalidArgument("density needs one value per fine triangle");
  }
  for (double v : density) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("density must be finite and strictly positive");
  }
  density_ = std::move(density);
}

double CoefficientField::median() const {
  std::vector<double> sorted(values_);
  const auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2);
  std::nth_element(sorted.begin(), mid, sorted.end());
  return *mid;
}

std::uint64_t CoefficientField::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  auto feed = [&h](std::span<const double> data) {
    for (double v : data) {
      unsigned char bytes[sizeof(double)];
      std::memcpy(bytes, &v, sizeof(double));
      for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ull;
      }
    }
  };
  feed(values_);
  feed(density_);
  return h;
}

double trig_coefficient(Point p) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  constexpr double eps[5] = {1.0 / 5.0, 1.0 / 13.0, 1.0 / 17.0, 1.0 / 31.0, 1.0 / 65.0};
  const double x = p.x;
  const double y = p.y;
  const double s = (1.1 + std::sin(two_pi * x / eps[0])) / (1.1 + std::sin(two_pi * y / eps[0])) +
                   (1.1 + std::sin(two_pi * y / eps[1])) / (1.1 + std::cos(two_pi * x / eps[1])) +
                   (1.1 + std::cos(two_pi * x / eps[2])) / (1.1 + std::sin(two_pi * y / eps[2])) +
                   (1.1 + std::sin(two_pi * y / eps[3])) / (1.1 + std::cos(two_pi * x / eps[3])) +
                   (1.1 + std::cos(two_pi * x / eps[4])) / (1.1 + std::sin(two_pi * y / eps[4])) +
                   std::sin(4.0 * x * x * y * y) + 1.0;
  return s / 6.0;
}

std::vector<std::array<int, 2>> logtrig_modes(int R) {
  if (R < 0) throw InvalidArgument("logtrig mode radius must be nonnegative");
  std::vector<std::array<int, 2>> modes;
  for (int k1 = 0; k1 <= R; ++k1) {
    for (int k2 = -R; k2 <= R; ++k2) {
      if (k1 == 0 && k2 < 0) continue;
      modes.push_back({k1, k2});
    }
  }
  return modes;
}

ChannelGeometry reference_channel(const FineMesh& mesh) {
  ChannelGeometry g;
  g.path = {{-1.0, -0.6}, {0.6, -0.6}, {0.6, 0.0}, {-0.6, 0.0}, {-0.6, 0.6}, {1.0, 0.6}};
  g.width = 2.0 * mesh.spacing();
  return g;
}

double distance_to_path(Point p, std::span<const Point> path) {
  if (path.empty()) return std::numeric_limits<double>::infinity();
  double best = distance(p, path.front());
  for (std::size_t k = 1; k < path.size(); ++k) {
    const Point a = path[k - 1];
    const Point b = path[k];
    const double ux = b.x - a.x;
    const double uy = b.y - a.y;
    const double len2 = ux * ux + uy * uy;
    double s = 0.0;
    if (len2 > 0.0) s = std::clamp(((p.x - a.x) * ux + (p.y - a.y) * uy) / len2, 0.0, 1.0);
    best = std::min(best, distance(p, {a.x + s * ux, a.y + s * uy}));
  }
  return best;
}

namespace {

std::vector<double> per_barycenter(const FineMesh& mesh, double (*fn)(Point)) {
  std::vector<double> values(mesh.triangle_count());
  for (std::size_t t = 0; t < values.size(); ++t) values[t] = fn(mesh.barycenter(static_cast<int>(t)));
  return values;
}

}  // namespace

CoefficientField gen_constant(const FineMesh& mesh, double value) {
  if (!(value > 0.0)) throw InvalidArgument("constant conductivity must be positive");
  FieldSpec spec;
  spec.kind = MediumKind::Constant;
  spec.value = value;
  return CoefficientField(mesh.cells_per_axis(), std::vector<double>(mesh.triangle_count(), value), spec);
}

CoefficientField gen_trig(const FineMesh& mesh) {
  FieldSpec spec;
  spec.kind = MediumKind::Trig;
  return CoefficientField(mesh.cells_per_axis(), per_barycenter(mesh, trig_coefficient), spec);
}

CoefficientField gen_percolation(const FineMesh& mesh, double gamma, std::uint64_t seed) {
  if (!(gamma > 0.0)) throw InvalidArgument("percolation contrast gamma must be positive");
  Rng rng(seed);
  const std::size_t cells = mesh.triangle_count() / 2;
  std::vector<double> values(mesh.triangle_count());
  for (std::size_t c = 0; c < cells; ++c) {
    const double v = rng.coin() ? gamma : 1.0 / gamma;
    values[2 * c] = v;
    values[2 * c + 1] = v;
  }
  FieldSpec spec;
  spec.kind = MediumKind::Percolation;
  spec.gamma = gamma;
  spec.seed = seed;
  return CoefficientField(mesh.cells_per_axis(), std::move(values), spec);
}

CoefficientField gen_logtrig(const FineMesh& mesh, int R, double amplitude, std::uint64_t seed) {
  if (!(amplitude >= 0.0)) throw InvalidArgument("logtrig amplitude must be nonnegative");
  const auto modes = logtrig_modes(R);
  Rng rng(seed);
  std::vector<double> a(modes.size());
  std::vector<double> b(modes.size());
  for (std::size_t k = 0; k < modes.size(); ++k) {
    a[k] = rng.uniform(-amplitude, amplitude);
    b[k] = rng.uniform(-amplitude, amplitude);
  }
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> values(mesh.triangle_count());
  for (std::size_t t = 0; t < values.size(); ++t) {
    const Point p = mesh.barycenter(static_cast<int>(t));
    double h = 0.0;
    for (std::size_t k = 0; k < modes.size(); ++k) {
      const double phase = two_pi * (modes[k][0] * p.x + modes[k][1] * p.y);
      h += a[k] * std::sin(phase) + b[k] * std::cos(phase);
    }
    values[t] = std::exp(h);
  }
  FieldSpec spec;
  spec.kind = MediumKind::LogTrig;
  spec.modes = R;
  spec.amplitude = amplitude;
  spec.seed = seed;
  return CoefficientField(mesh.cells_per_axis(), std::move(values), spec);
}

CoefficientField gen_channel(const FineMesh& mesh, const ChannelGeometry& channel, double channel_value,
                             const FieldSpec& background, std::uint64_t seed) {
  if (!(channel_value > 0.0)) throw InvalidArgument("channel conductivity must be positive");
  if (!(channel.width > 0.0)) throw InvalidArgument("channel width must be positive");
  if (background.kind == MediumKind::Channel) throw InvalidArgument("channel background cannot be a channel");
  for (const Point& p : channel.path) {
    if (std::abs(p.x) > 1.0 || std::abs(p.y) > 1.0) throw InvalidArgument("channel path leaves the domain");
  }
  FieldSpec bg = background;
  bg.seed = seed;
  bg.density = 1.0;
  const CoefficientField base = generate(mesh, bg);
  std::vector<double> values(base.values().begin(), base.values().end());
  const double half = 0.5 * channel.width;
  std::size_t hits = 0;
  for (std::size_t t = 0; t < values.size(); ++t) {
    if (distance_to_path(mesh.barycenter(static_cast<int>(t)), channel.path) <= half) {
      values[t] = channel_value;
      ++hits;
    }
  }
  FieldSpec spec;
  spec.kind = MediumKind::Channel;
  spec.channel = channel;
  spec.channel_value = channel_value;
  spec.background = std::make_shared<const FieldSpec>(bg);
  spec.seed = seed;
  CoefficientField field(mesh.cells_per_axis(), std::move(values), spec);
  if (hits == 0) field.set_warning("channel does not cover any cell");
  return field;
}

CoefficientField gen_checkerboard(const FineMesh& mesh, double gamma, int block) {
  if (!(gamma > 0.0)) throw InvalidArgument("checkerboard contrast must be positive");
  if (block < 1) throw InvalidArgument("checkerboard block must be at least one cell");
  const int n = mesh.cells_per_axis();
  std::vector<double> values(mesh.triangle_count());
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double v = ((i / block + j / block) % 2 == 0) ? gamma : 1.0 / gamma;
      const auto c = static_cast<std::size_t>(j * n + i);
      values[2 * c] = v;
      values[2 * c + 1] = v;
    }
  }
  FieldSpec spec;
  spec.kind = MediumKind::Checkerboard;
  spec.gamma = gamma;
  spec.block = block;
  return CoefficientField(n, std::move(values), spec);
}

CoefficientField generate(const FineMesh& mesh, const FieldSpec& spec) {
  auto field = [&]() {
    switch (spec.kind) {
      case MediumKind::Constant: return gen_constant(mesh, spec.value);
      case MediumKind::Trig: return gen_trig(mesh);
      case MediumKind::Percolation: return gen_percolation(mesh, spec.gamma, spec.seed);
      case MediumKind::LogTrig: return gen_logtrig(mesh, spec.modes, spec.amplitude, spec.seed);
      case MediumKind::Channel: {
        FieldSpec bg;
        bg.kind = MediumKind::Percolation;
        bg.gamma = 4.0;
        if (spec.background) bg = *spec.background;
        const ChannelGeometry geom = spec.channel.path.empty() ? reference_channel(mesh) : spec.channel;
        return gen_channel(mesh, geom, spec.channel_value, bg, spec.seed);
      }
      case MediumKind::Checkerboard: return gen_checkerboard(mesh, spec.gamma, spec.block);
    }
    throw InvalidArgument("unknown medium kind");
  }();
  if (spec.density != 1.0) {
    field.set_density(std::vector<double>(mesh.triangle_count(), spec.density));
  }
  return field;
}

}  // namespace numhom
