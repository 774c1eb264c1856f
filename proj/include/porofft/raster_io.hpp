#pragma once

#include <filesystem>

#include "porofft/grid.hpp"

namespace porofft {

/// Read a grayscale raster as a solid indicator.
///
/// Formats, chosen by extension: binary PGM (P5, `.pgm`) with pixel values
/// normalized by maxval, or CSV (`.csv`) of numbers. H = 1 where the value is
/// >= threshold. Raster column index is the first grid axis, raster row
/// index (top row first) the second axis. Throws IoError on unreadable,
/// empty or ragged input.
IndicatorField load_indicator_raster(const std::filesystem::path& path, double threshold = 0.5);

/// Write H as PGM (solid = 255) or CSV (0/1 integers), chosen by extension.
void write_indicator(const IndicatorField& h, const std::filesystem::path& path);

/// Nearest-neighbour resampling of an indicator onto another grid of the same dimension.
IndicatorField resample_nearest(const IndicatorField& h, const UnitCellGrid& target);

}  // namespace porofft
