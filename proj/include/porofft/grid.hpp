#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace porofft {

/// Periodic structured grid on the unit cube [0,1)^d.
///
/// Samples live at cell centres y_j = (i_j + 1/2) h_j with h_j = 1/N_j.
/// Linear indices run with axis 0 fastest, so a 2D field is stored as
/// rows of constant second-axis index.
class UnitCellGrid {
 public:
  explicit UnitCellGrid(std::vector<int> dims);

  /// Square (or cubic) grid with n cells per axis.
  static UnitCellGrid uniform(int n, int dim = 2);

  int dim() const { return static_cast<int>(dims_.size()); }
  int extent(int axis) const { return dims_[static_cast<std::size_t>(axis)]; }
  std::span<const int> dims() const { return dims_; }
  double spacing(int axis) const { return 1.0 / extent(axis); }
  double min_spacing() const;
  std::size_t num_points() const { return num_points_; }
  /// Quadrature weight of one cell, prod_j h_j.
  double cell_volume() const;

  /// Cell-centre coordinate along `axis` of grid index `i`.
  double center(int axis, int i) const { return (i + 0.5) * spacing(axis); }

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(dims_[0]) +
           static_cast<std::size_t>(i);
  }
  std::size_t index(std::span<const int> multi) const;
  /// Inverse of index(): fills `multi` (size dim()).
  void unravel(std::size_t linear, std::span<int> multi) const;

  friend bool operator==(const UnitCellGrid&, const UnitCellGrid&) = default;

 private:
  std::vector<int> dims_;
  std::size_t num_points_ = 0;
};

/// Throws GridMismatch unless both grids are identical.
void require_same_grid(const UnitCellGrid& a, const UnitCellGrid& b, const char* what);

class ScalarField {
 public:
  explicit ScalarField(UnitCellGrid grid, double value = 0.0);
  ScalarField(UnitCellGrid grid, std::vector<double> values);

  const UnitCellGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  bool all_finite() const;
  double mean() const;

 private:
  UnitCellGrid grid_;
  std::vector<double> values_;
};

/// d real components per grid point, stored component by component.
class VectorField {
 public:
  explicit VectorField(UnitCellGrid grid, double value = 0.0);
  /// Uniform field equal to `value` (size d) everywhere.
  VectorField(UnitCellGrid grid, std::span<const double> value);

  const UnitCellGrid& grid() const { return grid_; }
  int components() const { return static_cast<int>(comps_.size()); }
  std::size_t size() const { return grid_.num_points(); }
  std::span<double> component(int c) { return comps_[static_cast<std::size_t>(c)]; }
  std::span<const double> component(int c) const { return comps_[static_cast<std::size_t>(c)]; }

  bool all_finite() const;

 private:
  UnitCellGrid grid_;
  std::vector<std::vector<double>> comps_;
};

/// Solid indicator H: 1 in the solid, 0 in the pore.
class IndicatorField {
 public:
  /// Throws ParameterError if any value is not exactly 0 or 1.
  IndicatorField(UnitCellGrid grid, std::vector<double> values);

  static IndicatorField all_pore(UnitCellGrid grid);
  static IndicatorField all_solid(UnitCellGrid grid);

  const UnitCellGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  bool is_solid(std::size_t i) const { return values_[i] != 0.0; }

  std::size_t pore_count() const { return pore_count_; }
  std::size_t solid_count() const { return values_.size() - pore_count_; }
  /// Porosity is 0 or 1: representable, but not a meaningful two-phase medium.
  bool degenerate() const { return pore_count_ == 0 || pore_count_ == values_.size(); }

 private:
  UnitCellGrid grid_;
  std::vector<double> values_;
  std::size_t pore_count_ = 0;
};

/// (1/n) sum (1 - H), in [0, 1].
double porosity(const IndicatorField& h);

/// Euclidean norm over all samples (and components).
double l2_norm(std::span<const double> v);
double l2_norm(const VectorField& v);

}  // namespace porofft
