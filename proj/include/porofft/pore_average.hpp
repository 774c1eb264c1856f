#pragma once

#include <vector>

#include "porofft/grid.hpp"

namespace porofft {

/// Mean over pore cells (H = 0). Throws ParameterError when there is no pore space.
double pore_average(const ScalarField& f, const IndicatorField& h);
std::vector<double> pore_average(const VectorField& f, const IndicatorField& h);

}  // namespace porofft
