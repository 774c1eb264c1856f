#pragma once

#include <optional>
#include <string>
#include <vector>

#include "porofft/grid.hpp"
#include "porofft/spectral.hpp"

namespace porofft {

struct TransportConfig {
  double pe = 0.0;
  /// Mean composition gradient.
  std::vector<double> g_chi{1.0, 0.0};
  /// Fictitious diffusivity of the solid, in (0, 1].
  double eta = 0.01;
  /// Comparison-medium diffusivity.
  double a0 = 0.55;
  /// Comparison-medium advection magnitude, applied along the pore-averaged
  /// velocity (zero when the mean flow vanishes).
  double b0 = 1.0;
  /// Explicit comparison advection vector; overrides b0 when set.
  std::optional<std::vector<double>> b0_vector;
  double eps = 1e-5;
  int max_iter = 10000;
  SymbolMode symbol_mode = SymbolMode::CentralDifference;
  /// Growth of the residual above its running minimum that counts as divergence.
  double divergence_factor = 1e6;

  void validate(int dim) const;
};

/// Pointwise coefficients of the penalized transport equation.
struct MediumCoefficients {
  ScalarField diffusivity;    ///< (1 - H) + eta H
  VectorField advection;      ///< Pe (1 - H) u
  ScalarField source;         ///< Pe (1 - H) u_bar . g_chi
  std::vector<double> u_bar;  ///< pore-averaged velocity
  std::vector<double> b0;     ///< comparison advection vector actually used
};

/// Throws ParameterError when the cell has no pore space (u_bar undefined).
MediumCoefficients build_coefficients(const IndicatorField& h, const VectorField& u, const TransportConfig& cfg);

struct TransportState {
  ScalarField chi;
  VectorField grad_chi;
  int iter = 0;

  static TransportState zeros(const UnitCellGrid& grid);
};

struct TransportRecord {
  double r1 = 0.0, r2 = 0.0;      ///< change in chi and in grad chi
  double tol1 = 0.0, tol2 = 0.0;  ///< sqrt(n) eps with n the size of each field
};

enum class TransportStatus { Converged, MaxIterations, Diverged };

std::string_view to_string(TransportStatus s);

struct TransportReport {
  std::vector<TransportRecord> history;
  TransportStatus status = TransportStatus::MaxIterations;
  int iterations = 0;
  std::string message;

  bool converged() const { return status == TransportStatus::Converged; }
};

struct TransportResult {
  TransportState state;
  TransportReport report;
};

/// Comparison-medium fixed-point iteration for the excess composition chi.
///
/// Each step evaluates the polarization residual in real space and inverts
/// the constant-coefficient operator -a0 Lap + b0 . grad per Fourier mode.
/// The k = 0 mode of chi is held at zero.
class TransportSolver {
 public:
  TransportSolver(IndicatorField h, const VectorField& u, TransportConfig cfg);

  const IndicatorField& indicator() const { return h_; }
  const TransportConfig& config() const { return cfg_; }
  const MediumCoefficients& coefficients() const { return coef_; }
  const SpectralSymbols& symbols() const { return sym_; }
  const FourierTransform& fft() const { return fft_; }

  /// F^n = F + div[(A - a0)(grad chi + g)] - (B - b0).(grad chi + g), in Fourier space.
  SpectralField residual_rhs(const TransportState& s) const;

  /// chi_hat = F_hat / (i b0.kappa + a0 L) for k != 0, chi_hat(0) = 0; grad chi from the symbols.
  TransportState update_concentration(const SpectralField& f_hat) const;

  TransportState iterate(const TransportState& s) const;

  /// Iterate to the sqrt(n) eps tolerance; divergence and max_iter are
  /// reported in the result, not thrown.
  TransportResult solve(std::optional<TransportState> init = std::nullopt) const;

 private:
  IndicatorField h_;
  TransportConfig cfg_;
  MediumCoefficients coef_;
  SpectralSymbols sym_;
  FourierTransform fft_;
};

}  // namespace porofft
