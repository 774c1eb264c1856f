#include "porofft/stokes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "porofft/error.hpp"
#include "porofft/parallel.hpp"

namespace porofft {

void StokesConfig::validate(int dim) const {
  if (!(nu > 0.0)) throw ParameterError("viscosity nu must be positive");
  if (static_cast<int>(g_p.size()) != dim) throw ParameterError("g_p must have one entry per axis");
  if (!(eps_abs > 0.0) || !(eps_rel > 0.0)) throw ParameterError("Stokes tolerances must be positive");
  if (max_iter < 1) throw ParameterError("max_iter must be >= 1");
}

PenaltyParams PenaltyParams::scaled_to_grid(const UnitCellGrid& grid, double nu) {
  const double h = grid.min_spacing();
  PenaltyParams p;
  p.alpha = p.beta = p.b = nu / (h * h);
  p.adaptive = false;
  return p;
}

PenaltyParams PenaltyParams::adaptive_schedule() {
  PenaltyParams p;
  p.adaptive = true;
  return p;
}

void PenaltyParams::set_value(int k, double v) {
  if (k == 0) {
    alpha = v;
  } else if (k == 1) {
    beta = v;
  } else {
    b = v;
  }
}

void PenaltyParams::validate() const {
  if (!(b > 0.0)) throw ParameterError("penalty b must be positive (the k = 0 velocity mode needs it)");
  if (!(alpha > 0.0) || !(beta > 0.0)) throw ParameterError("penalties alpha and beta must be positive");
  for (int k = 0; k < 3; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    if (!(phi[uk] > 1.0)) throw ParameterError("penalty growth factors phi must exceed 1");
    if (!(tau[uk] > 1.0)) throw ParameterError("penalty ratio thresholds tau must exceed 1");
    if (!(psi_min[uk] > 0.0)) throw ParameterError("penalty floors psi_min must be positive");
  }
}

AdmmState AdmmState::zeros(const UnitCellGrid& grid) {
  return AdmmState{VectorField(grid), VectorField(grid), ScalarField(grid), VectorField(grid), VectorField(grid), 0};
}

VectorField aux_velocity_update(const VectorField& u, const VectorField& a, const VectorField& lam,
                                const IndicatorField& h, const PenaltyParams& pen) {
  require_same_grid(u.grid(), h.grid(), "aux velocity update");
  VectorField out(u.grid());
  const auto n = static_cast<std::ptrdiff_t>(h.size());
  const auto hv = h.values();
  for (int c = 0; c < u.components(); ++c) {
    const auto uc = u.component(c), ac = a.component(c), lc = lam.component(c);
    auto oc = out.component(c);
#pragma omp parallel for if (n >= kParallelGrain) schedule(static)
    for (std::ptrdiff_t p = 0; p < n; ++p) {
      oc[p] = (ac[p] + pen.b * uc[p] - hv[p] * lc[p]) / (pen.b + pen.alpha * hv[p]);
    }
  }
  return out;
}

void update_multipliers(AdmmState& s, const ScalarField& div_u, const IndicatorField& h,
                        const PenaltyParams& pen) {
  const auto n = static_cast<std::ptrdiff_t>(h.size());
  const auto hv = h.values();
  auto q = s.q.values();
  const auto dv = div_u.values();
  for (std::ptrdiff_t p = 0; p < n; ++p) q[p] -= pen.beta * dv[p];
  // Only grad q enters the velocity equation; pin the gauge.
  const double qm = s.q.mean();
  for (auto& v : q) v -= qm;
  for (int c = 0; c < s.u.components(); ++c) {
    const auto uc = s.u.component(c), tc = s.u_tilde.component(c);
    auto ac = s.a.component(c), lc = s.lam.component(c);
#pragma omp parallel for if (n >= kParallelGrain) schedule(static)
    for (std::ptrdiff_t p = 0; p < n; ++p) {
      ac[p] += pen.b * (uc[p] - tc[p]);
      lc[p] += pen.alpha * hv[p] * tc[p];
    }
  }
}

namespace {

// Squared Euclidean distance, optionally weighted pointwise by mask.
double sq_diff(std::span<const double> x, std::span<const double> y, std::span<const double> mask = {}) {
  double s = 0.0;
  for (std::size_t p = 0; p < x.size(); ++p) {
    double d = x[p] - (y.empty() ? 0.0 : y[p]);
    if (!mask.empty()) d *= mask[p];
    s += d * d;
  }
  return s;
}

double norm_diff(const VectorField& x, const VectorField* y, std::span<const double> mask = {}) {
  double s = 0.0;
  for (int c = 0; c < x.components(); ++c) {
    s += sq_diff(x.component(c), y ? y->component(c) : std::span<const double>{}, mask);
  }
  return std::sqrt(s);
}

}  // namespace

ResidualSet stokes_residuals(const AdmmState& prev, const AdmmState& next, const ScalarField& div_prev,
                             const ScalarField& div_next, const IndicatorField& h, const PenaltyParams& pen,
                             const StokesConfig& cfg) {
  const auto hv = h.values();
  const double n_dof = static_cast<double>(h.grid().dim()) * static_cast<double>(h.size());
  const double abs_tol = std::sqrt(n_dof) * cfg.eps_abs;
  const double er = cfg.eps_rel;

  ResidualSet r;
  const double lam_norm = l2_norm(next.lam);
  r[0].primal = norm_diff(next.u_tilde, nullptr, hv);
  r[0].dual = pen.alpha * norm_diff(next.u_tilde, &prev.u_tilde, hv);
  r[0].primal_tol = abs_tol + er * std::max(r[0].primal, lam_norm);
  r[0].dual_tol = abs_tol + er * lam_norm;

  const double q_norm = l2_norm(next.q.values());
  r[1].primal = l2_norm(div_next.values());
  r[1].dual = pen.beta * std::sqrt(sq_diff(div_next.values(), div_prev.values()));
  r[1].primal_tol = abs_tol + er * std::max(r[1].primal, q_norm);
  r[1].dual_tol = abs_tol + er * q_norm;

  const double a_norm = l2_norm(next.a);
  r[2].primal = norm_diff(next.u, &next.u_tilde);
  r[2].dual = pen.b * norm_diff(next.u, &prev.u);
  r[2].primal_tol = abs_tol + er * std::max(r[2].primal, a_norm);
  r[2].dual_tol = abs_tol + er * a_norm;
  return r;
}

PenaltyParams adapt_penalties(const PenaltyParams& pen, const ResidualSet& r) {
  PenaltyParams out = pen;
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    const double rp = r[uk].primal, rd = r[uk].dual;
    if (rp == 0.0 && rd == 0.0) continue;
    const double primal_ratio = rd == 0.0 ? inf : rp / rd;
    const double dual_ratio = rp == 0.0 ? inf : rd / rp;
    const double psi = pen.value(k);
    if (primal_ratio > pen.tau[uk]) {
      out.set_value(k, pen.phi[uk] * psi);
    } else if (dual_ratio > pen.tau[uk]) {
      out.set_value(k, std::max(psi / pen.phi[uk], pen.psi_min[uk]));
    }
  }
  return out;
}

StokesSolver::StokesSolver(IndicatorField h, StokesConfig cfg)
    : h_(std::move(h)), cfg_(std::move(cfg)), sym_(h_.grid(), cfg_.symbol_mode), fft_(h_.grid()) {
  cfg_.validate(h_.grid().dim());
}

SpectralField StokesSolver::velocity_step_spectral(const AdmmState& s, const PenaltyParams& pen) const {
  if (!(pen.b > 0.0)) throw ParameterError("penalty b must be positive (the k = 0 velocity mode needs it)");
  const auto& grid = h_.grid();
  const int d = grid.dim();
  const std::size_t n = grid.num_points();

  // r = g_p - grad q - a + b u_tilde, assembled in Fourier space.
  SpectralField rhs(grid, d);
  std::vector<double> work(n);
  for (int c = 0; c < d; ++c) {
    const auto ac = s.a.component(c), tc = s.u_tilde.component(c);
    for (std::size_t p = 0; p < n; ++p) work[p] = pen.b * tc[p] - ac[p];
    fft_.forward(work, rhs.component(c));
  }
  std::vector<Complex> q_hat(n);
  fft_.forward(s.q.values(), q_hat);
  for (int c = 0; c < d; ++c) {
    auto rc = rhs.component(c);
    const auto kap = sym_.kappa(c);
    for (std::size_t p = 0; p < n; ++p) rc[p] -= Complex(0.0, kap[p]) * q_hat[p];
    // Forward transform of the constant g_p: n * g_p at k = 0.
    rc[0] += static_cast<double>(n) * cfg_.g_p[static_cast<std::size_t>(c)];
  }

  // (A I + beta kappa kappa^T)^{-1} = (1/A) [I - beta kappa kappa^T / (A + beta |kappa|^2)]
  const auto lap = sym_.laplacian();
  const auto np = static_cast<std::ptrdiff_t>(n);
  SpectralField out(grid, d);
#pragma omp parallel for if (np >= kParallelGrain) schedule(static)
  for (std::ptrdiff_t p = 0; p < np; ++p) {
    const double A = cfg_.nu * lap[p] + pen.b;
    Complex kr = 0.0;
    double kk = 0.0;
    for (int c = 0; c < d; ++c) {
      const double kc = sym_.kappa(c)[p];
      kr += kc * rhs.component(c)[p];
      kk += kc * kc;
    }
    const Complex f = pen.beta * kr / (A + pen.beta * kk);
    for (int c = 0; c < d; ++c) {
      out.component(c)[p] = (rhs.component(c)[p] - sym_.kappa(c)[p] * f) / A;
    }
  }
  return out;
}

VectorField StokesSolver::velocity_step(const AdmmState& s, const PenaltyParams& pen) const {
  return fft_.inverse_vector(velocity_step_spectral(s, pen));
}

AdmmState StokesSolver::iterate(const AdmmState& s, const PenaltyParams& pen, ScalarField* div_u) const {
  const SpectralField u_hat = velocity_step_spectral(s, pen);
  AdmmState next = s;
  next.u = fft_.inverse_vector(u_hat);
  ScalarField dv = fft_.inverse_scalar(div(u_hat, sym_));
  next.u_tilde = aux_velocity_update(next.u, s.a, s.lam, h_, pen);
  update_multipliers(next, dv, h_, pen);
  ++next.iter;
  if (div_u) *div_u = std::move(dv);
  return next;
}

StokesResult StokesSolver::solve(const PenaltyParams& pen_in, std::optional<AdmmState> init) const {
  pen_in.validate();
  const auto& grid = h_.grid();
  StokesResult result{init ? std::move(*init) : AdmmState::zeros(grid), {}, pen_in};
  require_same_grid(result.state.u.grid(), grid, "Stokes initial state");
  auto& report = result.report;

  if (h_.pore_count() == 0) {
    result.state = AdmmState::zeros(grid);
    report.converged = true;
    report.message = "all-solid cell: velocity is identically zero";
    return result;
  }
  const bool forced = std::any_of(cfg_.g_p.begin(), cfg_.g_p.end(), [](double g) { return g != 0.0; });
  if (h_.solid_count() == 0 && forced) {
    report.message = "no solid phase: a pressure-driven periodic flow is unbounded";
    return result;
  }

  PenaltyParams pen = pen_in;
  ScalarField div_prev = divergence(result.state.u, sym_, fft_);
  ScalarField div_next(grid);
  for (int it = 0; it < cfg_.max_iter; ++it) {
    AdmmState next = iterate(result.state, pen, &div_next);
    const ResidualSet r = stokes_residuals(result.state, next, div_prev, div_next, h_, pen, cfg_);
    report.history.push_back({r, pen.alpha, pen.beta, pen.b});
    result.state = std::move(next);
    std::swap(div_prev, div_next);
    report.iterations = static_cast<int>(report.history.size());

    const bool finite = std::all_of(r.begin(), r.end(), [](const ResidualPair& p) {
      return std::isfinite(p.primal) && std::isfinite(p.dual);
    });
    if (!finite) {
      report.message = "non-finite residual encountered";
      result.final_penalties = pen;
      return result;
    }
    if (all_satisfied(r)) {
      report.converged = true;
      report.message = "converged";
      result.final_penalties = pen;
      return result;
    }
    if (pen.adaptive) pen = adapt_penalties(pen, r);
  }
  report.message = "maximum iteration count reached";
  result.final_penalties = pen;
  return result;
}

}  // namespace porofft
