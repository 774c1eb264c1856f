#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "porofft/grid.hpp"

namespace porofft {

enum class FieldFormat { Csv, Vtk };

FieldFormat parse_field_format(std::string_view s);

/// Grid plus one or more components, as stored on disk.
struct FieldData {
  UnitCellGrid grid;
  std::vector<std::vector<double>> components;

  ScalarField to_scalar() const;
  VectorField to_vector() const;
};

/// Write a field as CSV or legacy ASCII VTK (STRUCTURED_POINTS).
///
/// CSV: '#' header lines with dims, spacing and component count, then one
/// row per point in storage order (first axis fastest): grid indices
/// followed by the component values. Values carry 17 significant digits,
/// so re-reading reproduces them exactly.
void export_field(const ScalarField& f, FieldFormat format, const std::filesystem::path& path,
                  std::string_view name = "chi");
void export_field(const VectorField& f, FieldFormat format, const std::filesystem::path& path,
                  std::string_view name = "u");

/// Read a CSV written by export_field.
FieldData import_field_csv(const std::filesystem::path& path);

/// Shortest decimal form used by the writers ("%.17g").
std::string format_double(double v);

}  // namespace porofft
