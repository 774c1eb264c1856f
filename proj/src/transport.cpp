#include "porofft/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "porofft/error.hpp"
#include "porofft/parallel.hpp"
#include "porofft/pore_average.hpp"

namespace porofft {

void TransportConfig::validate(int dim) const {
  if (!(pe >= 0.0)) throw ParameterError("Peclet number must be >= 0");
  if (!(eta > 0.0 && eta <= 1.0)) throw ParameterError("fictitious diffusivity eta must lie in (0, 1]");
  if (!(a0 > 0.0)) throw ParameterError("comparison diffusivity a0 must be positive");
  if (!std::isfinite(b0)) throw ParameterError("comparison advection b0 must be finite");
  if (static_cast<int>(g_chi.size()) != dim) throw ParameterError("g_chi must have one entry per axis");
  if (b0_vector && static_cast<int>(b0_vector->size()) != dim)
    throw ParameterError("b0_vector must have one entry per axis");
  if (!(eps > 0.0)) throw ParameterError("transport tolerance must be positive");
  if (max_iter < 1) throw ParameterError("max_iter must be >= 1");
  if (!(divergence_factor > 1.0)) throw ParameterError("divergence_factor must exceed 1");
}

std::string_view to_string(TransportStatus s) {
  switch (s) {
    case TransportStatus::Converged: return "converged";
    case TransportStatus::MaxIterations: return "max_iterations";
    case TransportStatus::Diverged: return "diverged";
  }
  return "unknown";
}

MediumCoefficients build_coefficients(const IndicatorField& h, const VectorField& u, const TransportConfig& cfg) {
  const auto& grid = h.grid();
  require_same_grid(u.grid(), grid, "transport coefficients");
  if (h.pore_count() == 0) throw ParameterError("no pore space: the pore-averaged velocity is undefined");
  cfg.validate(grid.dim());
  const int d = grid.dim();
  const std::size_t n = grid.num_points();
  const auto hv = h.values();

  MediumCoefficients c{ScalarField(grid), VectorField(grid), ScalarField(grid), pore_average(u, h), {}};
  double ubar_dot_g = 0.0;
  for (int a = 0; a < d; ++a) ubar_dot_g += c.u_bar[static_cast<std::size_t>(a)] * cfg.g_chi[static_cast<std::size_t>(a)];
  for (std::size_t p = 0; p < n; ++p) {
    const double pore = 1.0 - hv[p];
    c.diffusivity[p] = pore + cfg.eta * hv[p];
    c.source[p] = cfg.pe * pore * ubar_dot_g;
  }
  for (int a = 0; a < d; ++a) {
    const auto ua = u.component(a);
    auto ba = c.advection.component(a);
    for (std::size_t p = 0; p < n; ++p) ba[p] = cfg.pe * (1.0 - hv[p]) * ua[p];
  }

  if (cfg.b0_vector) {
    c.b0 = *cfg.b0_vector;
  } else {
    const double mag = l2_norm(c.u_bar);
    c.b0.assign(static_cast<std::size_t>(d), 0.0);
    if (mag > 0.0) {
      for (int a = 0; a < d; ++a) c.b0[static_cast<std::size_t>(a)] = cfg.b0 * c.u_bar[static_cast<std::size_t>(a)] / mag;
    }
  }
  return c;
}

TransportState TransportState::zeros(const UnitCellGrid& grid) {
  return TransportState{ScalarField(grid), VectorField(grid), 0};
}

TransportSolver::TransportSolver(IndicatorField h, const VectorField& u, TransportConfig cfg)
    : h_(std::move(h)),
      cfg_(std::move(cfg)),
      coef_(build_coefficients(h_, u, cfg_)),
      sym_(h_.grid(), cfg_.symbol_mode),
      fft_(h_.grid()) {}

SpectralField TransportSolver::residual_rhs(const TransportState& s) const {
  const auto& grid = h_.grid();
  require_same_grid(s.chi.grid(), grid, "transport residual");
  const int d = grid.dim();
  const std::size_t n = grid.num_points();
  const auto np = static_cast<std::ptrdiff_t>(n);
  const auto A = coef_.diffusivity.values();
  const auto F = coef_.source.values();

  // Polarization flux w = (A - a0)(grad chi + g), transformed component-wise.
  SpectralField flux(grid, d);
  std::vector<double> work(n);
  for (int a = 0; a < d; ++a) {
    const auto ga = s.grad_chi.component(a);
    const double g = cfg_.g_chi[static_cast<std::size_t>(a)];
#pragma omp parallel for if (np >= kParallelGrain) schedule(static)
    for (std::ptrdiff_t p = 0; p < np; ++p) work[p] = (A[p] - cfg_.a0) * (ga[p] + g);
    fft_.forward(work, flux.component(a));
  }
  SpectralField out = div(flux, sym_);

  // Pointwise part F - (B - b0).(grad chi + g).
  std::copy(F.begin(), F.end(), work.begin());
  for (int a = 0; a < d; ++a) {
    const auto ga = s.grad_chi.component(a);
    const auto ba = coef_.advection.component(a);
    const double g = cfg_.g_chi[static_cast<std::size_t>(a)];
    const double b0 = coef_.b0[static_cast<std::size_t>(a)];
#pragma omp parallel for if (np >= kParallelGrain) schedule(static)
    for (std::ptrdiff_t p = 0; p < np; ++p) work[p] -= (ba[p] - b0) * (ga[p] + g);
  }
  std::vector<Complex> local(n);
  fft_.forward(work, local);
  auto o = out.component(0);
  for (std::size_t p = 0; p < n; ++p) o[p] += local[p];
  return out;
}

TransportState TransportSolver::update_concentration(const SpectralField& f_hat) const {
  const auto& grid = h_.grid();
  require_same_grid(f_hat.grid(), grid, "concentration update");
  const int d = grid.dim();
  const std::size_t n = grid.num_points();
  const auto lap = sym_.laplacian();
  const auto f = f_hat.component(0);

  SpectralField chi_hat(grid, 1);
  auto c = chi_hat.component(0);
  for (std::size_t p = 1; p < n; ++p) {
    double adv = 0.0;
    for (int a = 0; a < d; ++a) adv += coef_.b0[static_cast<std::size_t>(a)] * sym_.kappa(a)[p];
    const Complex den(cfg_.a0 * lap[p], adv);
    if (den == Complex(0.0, 0.0)) throw std::logic_error("singular comparison operator at a nonzero mode");
    c[p] = f[p] / den;
  }
  c[0] = 0.0;  // zero-mean gauge

  TransportState s{fft_.inverse_scalar(chi_hat), fft_.inverse_vector(grad(chi_hat, sym_)), 0};
  return s;
}

TransportState TransportSolver::iterate(const TransportState& s) const {
  TransportState next = update_concentration(residual_rhs(s));
  next.iter = s.iter + 1;
  return next;
}

TransportResult TransportSolver::solve(std::optional<TransportState> init) const {
  const auto& grid = h_.grid();
  TransportResult result{init ? std::move(*init) : TransportState::zeros(grid), {}};
  require_same_grid(result.state.chi.grid(), grid, "transport initial state");
  auto& report = result.report;
  const double n = static_cast<double>(grid.num_points());
  const double tol1 = std::sqrt(n) * cfg_.eps;
  const double tol2 = std::sqrt(n * grid.dim()) * cfg_.eps;
  double best = std::numeric_limits<double>::infinity();

  for (int it = 0; it < cfg_.max_iter; ++it) {
    TransportState next = iterate(result.state);
    TransportRecord rec;
    double s1 = 0.0;
    for (std::size_t p = 0; p < next.chi.size(); ++p) {
      const double dlt = next.chi[p] - result.state.chi[p];
      s1 += dlt * dlt;
    }
    double s2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      const auto x = next.grad_chi.component(a), y = result.state.grad_chi.component(a);
      for (std::size_t p = 0; p < x.size(); ++p) s2 += (x[p] - y[p]) * (x[p] - y[p]);
    }
    rec.r1 = std::sqrt(s1);
    rec.r2 = std::sqrt(s2);
    rec.tol1 = tol1;
    rec.tol2 = tol2;
    report.history.push_back(rec);
    report.iterations = static_cast<int>(report.history.size());
    result.state = std::move(next);

    const double r = rec.r1 + rec.r2;
    if (!std::isfinite(r) || r > cfg_.divergence_factor * best) {
      report.status = TransportStatus::Diverged;
      report.message = "residual grew beyond the divergence threshold (comparison medium too small?)";
      return result;
    }
    best = std::min(best, r);
    if (rec.r1 <= tol1 && rec.r2 <= tol2) {
      report.status = TransportStatus::Converged;
      report.message = "converged";
      return result;
    }
  }
  report.status = TransportStatus::MaxIterations;
  report.message = "maximum iteration count reached";
  return result;
}

}  // namespace porofft
