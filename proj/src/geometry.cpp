#include "porofft/geometry.hpp"

#include <cmath>
#include <random>

#include "porofft/error.hpp"

namespace porofft {
namespace {

void check_length(double v, const char* what) {
  if (!(v > 0.0 && v < 0.5)) throw ParameterError(std::string(what) + " must lie in (0, 0.5)");
}

// Minimum-image offset on the unit torus.
double wrap(double d) { return d - std::round(d); }

struct Contains {
  double x, y;
  bool operator()(const Disk& d) const {
    const double dx = wrap(x - d.center[0]);
    const double dy = wrap(y - d.center[1]);
    return dx * dx + dy * dy < d.radius * d.radius;
  }
  bool operator()(const Ellipse& e) const {
    const double dx = wrap(x - e.center[0]);
    const double dy = wrap(y - e.center[1]);
    const double c = std::cos(e.angle), s = std::sin(e.angle);
    const double u = (c * dx + s * dy) / e.semi_axes[0];
    const double v = (-s * dx + c * dy) / e.semi_axes[1];
    return u * u + v * v < 1.0;
  }
};

}  // namespace

IndicatorField make_model_geometry(const UnitCellGrid& grid, const std::vector<Obstacle>& obstacles) {
  if (grid.dim() != 2) throw ParameterError("model geometries are defined for 2D grids");
  for (const auto& o : obstacles) {
    if (const auto* d = std::get_if<Disk>(&o)) {
      check_length(d->radius, "disk radius");
    } else {
      const auto& e = std::get<Ellipse>(o);
      check_length(e.semi_axes[0], "ellipse semi-axis");
      check_length(e.semi_axes[1], "ellipse semi-axis");
    }
  }
  std::vector<double> h(grid.num_points(), 0.0);
  for (int j = 0; j < grid.extent(1); ++j) {
    for (int i = 0; i < grid.extent(0); ++i) {
      const Contains inside{grid.center(0, i), grid.center(1, j)};
      for (const auto& o : obstacles) {
        if (std::visit(inside, o)) {
          h[grid.index(i, j)] = 1.0;
          break;
        }
      }
    }
  }
  return IndicatorField(grid, std::move(h));
}

IndicatorField make_model_geometry(const UnitCellGrid& grid, double radius) {
  return make_model_geometry(grid, std::vector<Obstacle>{Disk{{0.5, 0.5}, radius}});
}

IndicatorField make_random_inclusions(const UnitCellGrid& grid, std::uint64_t seed, int count,
                                      double r_min, double r_max) {
  if (count < 1) throw ParameterError("inclusion count must be positive");
  if (!(r_min <= r_max)) throw ParameterError("r_min must not exceed r_max");
  check_length(r_min, "inclusion radius");
  check_length(r_max, "inclusion radius");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0.0, 1.0);
  std::uniform_real_distribution<double> rad(r_min, r_max);
  std::vector<Obstacle> obstacles;
  for (int k = 0; k < count; ++k) {
    const double x = pos(rng);
    const double y = pos(rng);
    obstacles.emplace_back(Disk{{x, y}, rad(rng)});
  }
  return make_model_geometry(grid, obstacles);
}

}  // namespace porofft
