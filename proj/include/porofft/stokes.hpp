#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "porofft/grid.hpp"
#include "porofft/spectral.hpp"

namespace porofft {

struct StokesConfig {
  double nu = 1.0;
  /// Mean pressure-gradient forcing (the flow is driven by -grad p = g_p).
  std::vector<double> g_p{1.0, 0.0};
  double eps_abs = 1e-5;
  double eps_rel = 1e-5;
  int max_iter = 10000;
  SymbolMode symbol_mode = SymbolMode::CentralDifference;

  void validate(int dim) const;
};

/// Penalty coefficients of the augmented Lagrangian and the residual-balancing schedule.
///
/// Index k of phi/tau/psi_min refers to: 0 = alpha (solid constraint),
/// 1 = beta (incompressibility), 2 = b (u = u_tilde coupling).
struct PenaltyParams {
  double alpha = 1.0;
  double beta = 1.0;
  double b = 1.0;
  std::array<double, 3> phi{1.1, 1.1, 1.1};
  std::array<double, 3> tau{20.0, 10.0, 30.0};
  std::array<double, 3> psi_min{1e-3, 1e-3, 1e-3};
  bool adaptive = false;

  /// Fixed alpha = beta = b = nu / h_min^2, the stiffness of the discrete viscous term.
  static PenaltyParams scaled_to_grid(const UnitCellGrid& grid, double nu);
  /// Residual balancing from alpha = beta = b = 1 with floors 1e-3.
  static PenaltyParams adaptive_schedule();

  double value(int k) const { return k == 0 ? alpha : (k == 1 ? beta : b); }
  void set_value(int k, double v);
  void validate() const;
};

/// One primal/dual residual pair with its tolerances.
struct ResidualPair {
  double primal = 0.0;
  double dual = 0.0;
  double primal_tol = 0.0;
  double dual_tol = 0.0;

  bool satisfied() const { return primal <= primal_tol && dual <= dual_tol; }
};

/// Residuals of one iteration: [0] solid, [1] incompressibility, [2] coupling.
using ResidualSet = std::array<ResidualPair, 3>;

inline bool all_satisfied(const ResidualSet& r) {
  return r[0].satisfied() && r[1].satisfied() && r[2].satisfied();
}

struct StokesRecord {
  ResidualSet residuals;
  double alpha = 0.0, beta = 0.0, b = 0.0;  ///< penalties used in this iteration
};

struct StokesReport {
  std::vector<StokesRecord> history;
  bool converged = false;
  int iterations = 0;
  std::string message;
};

/// ADMM iterate: velocity u, auxiliary velocity u_tilde, incompressibility
/// multiplier q, coupling multiplier a, solid multiplier lam.
struct AdmmState {
  VectorField u;
  VectorField u_tilde;
  ScalarField q;
  VectorField a;
  VectorField lam;
  int iter = 0;

  static AdmmState zeros(const UnitCellGrid& grid);
};

struct StokesResult {
  AdmmState state;
  StokesReport report;
  PenaltyParams final_penalties;
};

/// u_tilde = (a + b u - H lam) / (b + alpha H), pointwise.
VectorField aux_velocity_update(const VectorField& u, const VectorField& a, const VectorField& lam,
                                const IndicatorField& h, const PenaltyParams& pen);

/// q -= beta div_u (then re-gauged to zero mean), a += b (u - u_tilde), lam += alpha H u_tilde.
void update_multipliers(AdmmState& s, const ScalarField& div_u, const IndicatorField& h,
                        const PenaltyParams& pen);

/// Residuals and tolerances between consecutive iterates.
///
/// Tolerances are sqrt(n) eps_abs + eps_rel * (multiplier norm), with the
/// primal one also bounded below by the residual itself; n = d * n_pts.
ResidualSet stokes_residuals(const AdmmState& prev, const AdmmState& next, const ScalarField& div_prev,
                             const ScalarField& div_next, const IndicatorField& h, const PenaltyParams& pen,
                             const StokesConfig& cfg);

/// Residual balancing: grow psi_k when r_p/r_d > tau_k, shrink (floored) when r_d/r_p > tau_k.
PenaltyParams adapt_penalties(const PenaltyParams& pen, const ResidualSet& r);

/// Extended-domain Stokes cell problem solved by ADMM.
class StokesSolver {
 public:
  StokesSolver(IndicatorField h, StokesConfig cfg);

  const IndicatorField& indicator() const { return h_; }
  const StokesConfig& config() const { return cfg_; }
  const SpectralSymbols& symbols() const { return sym_; }
  const FourierTransform& fft() const { return fft_; }

  /// Step 1: per-mode solve of the u-stationarity equation with (I A + beta kappa kappa^T).
  VectorField velocity_step(const AdmmState& s, const PenaltyParams& pen) const;

  /// One full ADMM iteration (steps 1-3). div_u receives the divergence of the new u.
  AdmmState iterate(const AdmmState& s, const PenaltyParams& pen, ScalarField* div_u = nullptr) const;

  /// Iterate until all six residual tests pass or max_iter is reached.
  /// Non-convergence is reported in the result, not thrown.
  StokesResult solve(const PenaltyParams& pen, std::optional<AdmmState> init = std::nullopt) const;

 private:
  SpectralField velocity_step_spectral(const AdmmState& s, const PenaltyParams& pen) const;

  IndicatorField h_;
  StokesConfig cfg_;
  SpectralSymbols sym_;
  FourierTransform fft_;
};

}  // namespace porofft
