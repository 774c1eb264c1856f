#include "porofft/grid.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <numeric>
#include <string>

#include "porofft/error.hpp"

namespace porofft {

UnitCellGrid::UnitCellGrid(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw ParameterError("grid needs at least one axis");
  std::size_t n = 1;
  for (int d : dims_) {
    if (d < 4) throw ParameterError("grid extent must be >= 4, got " + std::to_string(d));
    if (n > static_cast<std::size_t>(INT_MAX) / static_cast<std::size_t>(d))
      throw ParameterError("grid point count overflows the index type");
    n *= static_cast<std::size_t>(d);
  }
  num_points_ = n;
}

UnitCellGrid UnitCellGrid::uniform(int n, int dim) {
  if (dim < 1) throw ParameterError("grid dimension must be positive");
  return UnitCellGrid(std::vector<int>(static_cast<std::size_t>(dim), n));
}

double UnitCellGrid::min_spacing() const {
  return 1.0 / *std::max_element(dims_.begin(), dims_.end());
}

double UnitCellGrid::cell_volume() const {
  double v = 1.0;
  for (int d : dims_) v /= d;
  return v;
}

std::size_t UnitCellGrid::index(std::span<const int> multi) const {
  std::size_t idx = 0;
  for (int axis = dim() - 1; axis >= 0; --axis) {
    idx = idx * static_cast<std::size_t>(dims_[static_cast<std::size_t>(axis)]) +
          static_cast<std::size_t>(multi[static_cast<std::size_t>(axis)]);
  }
  return idx;
}

void UnitCellGrid::unravel(std::size_t linear, std::span<int> multi) const {
  for (std::size_t axis = 0; axis < dims_.size(); ++axis) {
    const auto n = static_cast<std::size_t>(dims_[axis]);
    multi[axis] = static_cast<int>(linear % n);
    linear /= n;
  }
}

void require_same_grid(const UnitCellGrid& a, const UnitCellGrid& b, const char* what) {
  if (!(a == b)) throw GridMismatch(std::string("grid mismatch: ") + what);
}

ScalarField::ScalarField(UnitCellGrid grid, double value)
    : grid_(std::move(grid)), values_(grid_.num_points(), value) {}

ScalarField::ScalarField(UnitCellGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.num_points())
    throw GridMismatch("scalar field size does not match its grid");
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double ScalarField::mean() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
}

VectorField::VectorField(UnitCellGrid grid, double value) : grid_(std::move(grid)) {
  comps_.assign(static_cast<std::size_t>(grid_.dim()), std::vector<double>(grid_.num_points(), value));
}

VectorField::VectorField(UnitCellGrid grid, std::span<const double> value) : grid_(std::move(grid)) {
  if (value.size() != static_cast<std::size_t>(grid_.dim()))
    throw GridMismatch("vector value has wrong component count");
  for (double v : value) comps_.emplace_back(grid_.num_points(), v);
}

bool VectorField::all_finite() const {
  return std::all_of(comps_.begin(), comps_.end(), [](const std::vector<double>& c) {
    return std::all_of(c.begin(), c.end(), [](double v) { return std::isfinite(v); });
  });
}

IndicatorField::IndicatorField(UnitCellGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.num_points())
    throw GridMismatch("indicator size does not match its grid");
  for (double v : values_) {
    if (v != 0.0 && v != 1.0) throw ParameterError("indicator values must be exactly 0 or 1");
  }
  pore_count_ = static_cast<std::size_t>(std::count(values_.begin(), values_.end(), 0.0));
}

IndicatorField IndicatorField::all_pore(UnitCellGrid grid) {
  const auto n = grid.num_points();
  return IndicatorField(std::move(grid), std::vector<double>(n, 0.0));
}

IndicatorField IndicatorField::all_solid(UnitCellGrid grid) {
  const auto n = grid.num_points();
  return IndicatorField(std::move(grid), std::vector<double>(n, 1.0));
}

double porosity(const IndicatorField& h) {
  return static_cast<double>(h.pore_count()) / static_cast<double>(h.size());
}

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double l2_norm(const VectorField& v) {
  double s = 0.0;
  for (int c = 0; c < v.components(); ++c) {
    for (double x : v.component(c)) s += x * x;
  }
  return std::sqrt(s);
}

}  // namespace porofft
