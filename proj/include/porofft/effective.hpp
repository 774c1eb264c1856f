#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "porofft/grid.hpp"
#include "porofft/pore_average.hpp"
#include "porofft/spectral.hpp"
#include "porofft/transport.hpp"

namespace porofft {

/// Dense d x d real matrix, row-major.
struct Tensor {
  int dim = 0;
  std::vector<double> v;

  explicit Tensor(int d = 0) : dim(d), v(static_cast<std::size_t>(d) * static_cast<std::size_t>(d), 0.0) {}
  double& operator()(int i, int j) { return v[static_cast<std::size_t>(i * dim + j)]; }
  double operator()(int i, int j) const { return v[static_cast<std::size_t>(i * dim + j)]; }
  /// Largest |T_ij - T_ji|.
  double asymmetry() const;
};

/// K_ij = sum over pore cells of grad u^i : grad u^j times the cell volume.
///
/// u_unit[i] is the flow driven by the i-th unit pressure gradient.
/// Gradients use `sym`; the result is symmetric by construction.
Tensor permeability(std::span<const VectorField> u_unit, const IndicatorField& h, const SpectralSymbols& sym,
                    const FourierTransform& fft);

/// D_ij = phi_p delta_ij + Pe int_pore (u_bar^i - u^i)_i chi^j + int_pore d_i chi^j.
///
/// u_unit[i] are the unit-gradient flows; chi_unit[j] solves the transport
/// problem with g_chi = e_j. Throws ParameterError without pore space.
Tensor diffusivity(std::span<const VectorField> u_unit, std::span<const TransportState> chi_unit,
                   const IndicatorField& h, double pe);

struct TensorProvenance {
  double nu = 1.0;
  double stokes_eps_abs = 0.0, stokes_eps_rel = 0.0;
  double transport_eps = 0.0;
  SymbolMode stokes_symbols = SymbolMode::CentralDifference;
  SymbolMode transport_symbols = SymbolMode::CentralDifference;
  std::vector<int> stokes_iterations;
  std::vector<int> transport_iterations;
  std::vector<double> transport_g_p;  ///< pressure gradient of the flow the chi^j were solved under
};

struct EffectiveTensors {
  Tensor K;
  std::optional<Tensor> D;  ///< absent when transport was skipped
  double porosity = 0.0;
  std::vector<std::vector<double>> u_bar;  ///< pore-averaged velocity per unit direction
  TensorProvenance meta;
};

}  // namespace porofft
