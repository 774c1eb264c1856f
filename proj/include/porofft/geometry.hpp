#pragma once

#include <array>
#include <cstdint>
#include <variant>
#include <vector>

#include "porofft/grid.hpp"

namespace porofft {

/// Circular inclusion; periodic images are included when rasterizing.
struct Disk {
  std::array<double, 2> center{0.5, 0.5};
  double radius = 0.25;
};

/// Rotated elliptical inclusion (angle in radians, from the first axis).
struct Ellipse {
  std::array<double, 2> center{0.5, 0.5};
  std::array<double, 2> semi_axes{0.3, 0.15};
  double angle = 0.0;
};

using Obstacle = std::variant<Disk, Ellipse>;

/// Rasterize the union of obstacles at cell centres: H = 1 inside any obstacle.
///
/// Every characteristic length must lie in (0, 0.5) so that an obstacle
/// cannot wrap onto itself; otherwise ParameterError. Only 2D grids.
IndicatorField make_model_geometry(const UnitCellGrid& grid, const std::vector<Obstacle>& obstacles);

/// The benchmark cell: one disk of `radius` centred in the unit cell.
IndicatorField make_model_geometry(const UnitCellGrid& grid, double radius);

/// Reproducible random medium of `count` disks with radii in [r_min, r_max].
IndicatorField make_random_inclusions(const UnitCellGrid& grid, std::uint64_t seed, int count,
                                      double r_min, double r_max);

}  // namespace porofft
