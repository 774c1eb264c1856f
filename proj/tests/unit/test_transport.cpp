#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "oracle.hpp"
#include "porofft/error.hpp"
#include "porofft/geometry.hpp"
#include "porofft/pore_average.hpp"
#include "porofft/stokes.hpp"
#include "porofft/transport.hpp"

using namespace porofft;

namespace {

VectorField random_velocity(const UnitCellGrid& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  VectorField u(g);
  for (int c = 0; c < g.dim(); ++c)
    for (auto& x : u.component(c)) x = d(rng);
  return u;
}

VectorField disk_flow(int n) {
  const auto h = make_model_geometry(UnitCellGrid::uniform(n), 0.25);
  StokesConfig c;
  c.eps_abs = c.eps_rel = 1e-6;
  return StokesSolver(h, c).solve(PenaltyParams::scaled_to_grid(h.grid(), 1.0)).state.u;
}

}  // namespace

TEST_CASE("medium coefficients") {
  const auto g = UnitCellGrid::uniform(8);
  TransportConfig c;
  c.pe = 3.0;
  c.g_chi = {0.5, 2.0};
  const std::vector<double> uc{0.4, -0.2};
  const auto m = build_coefficients(IndicatorField::all_pore(g), VectorField(g, uc), c);
  for (std::size_t p = 0; p < g.num_points(); ++p) {
    REQUIRE(m.diffusivity[p] == 1.0);
    REQUIRE(m.advection.component(0)[p] == doctest::Approx(1.2));
    REQUIRE(m.source[p] == doctest::Approx(3.0 * (0.2 - 0.4)));
  }
  CHECK(m.b0[0] == doctest::Approx(2.0 / std::sqrt(5.0)));
  c.pe = 0.0;
  const auto h = make_model_geometry(g, 0.25);
  const auto z = build_coefficients(h, random_velocity(g, 1), c);
  CHECK(l2_norm(z.advection) == 0.0);
  CHECK(l2_norm(z.source.values()) == 0.0);
  for (std::size_t p = 0; p < g.num_points(); ++p) REQUIRE(z.diffusivity[p] == (h.is_solid(p) ? c.eta : 1.0));
  CHECK_THROWS_AS(build_coefficients(IndicatorField::all_solid(g), VectorField(g), c), ParameterError);
}

TEST_CASE("config validation") {
  TransportConfig c;
  c.a0 = 0.0;
  CHECK_THROWS_AS(c.validate(2), ParameterError);
  c = TransportConfig{};
  c.eta = 0.0;
  CHECK_THROWS_AS(c.validate(2), ParameterError);
  c = TransportConfig{};
  c.b0_vector = std::vector<double>{1.0};
  CHECK_THROWS_AS(c.validate(2), ParameterError);
}

TEST_CASE("homogeneous medium has no fluctuation") {
  const auto g = UnitCellGrid::uniform(8);
  const TransportConfig c;
  const TransportSolver s(IndicatorField::all_pore(g), VectorField(g), c);
  const auto r = s.solve();
  CHECK(r.report.converged());
  CHECK(r.report.iterations <= 2);
  CHECK(l2_norm(r.state.chi.values()) == 0.0);
}

TEST_CASE("residual rhs of a matched comparison medium is the mean source") {
  const auto g = UnitCellGrid::uniform(8);
  TransportConfig c;
  c.a0 = 1.0;
  c.pe = 2.0;
  const std::vector<double> uc{0.6, 0.0};
  c.b0_vector = std::vector<double>{1.2, 0.0};
  const TransportSolver s(IndicatorField::all_pore(g), VectorField(g, uc), c);
  const auto f = s.residual_rhs(TransportState::zeros(g));
  // Only the source Pe (u . g_chi) survives, at k = 0.
  CHECK(std::abs(f.component(0)[0] - 64.0 * 2.0 * 0.6) < 1e-12);
  for (std::size_t p = 1; p < g.num_points(); ++p) REQUIRE(std::abs(f.component(0)[p]) < 1e-12);
}

TEST_CASE("residual rhs matches dense operators") {
  const auto g = UnitCellGrid::uniform(8);
  std::mt19937 rng(3);
  std::vector<double> hv(64);
  for (auto& x : hv) x = rng() % 3 == 0 ? 1.0 : 0.0;
  const IndicatorField h(g, hv);
  TransportConfig c;
  c.pe = 7.0;
  c.g_chi = {0.3, 0.8};
  const TransportSolver s(h, random_velocity(g, 4), c);
  TransportState st = TransportState::zeros(g);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (auto& x : st.chi.values()) x = d(rng);
  st.grad_chi = gradient(st.chi, s.symbols(), s.fft());
  const auto fr = s.fft().inverse_scalar(s.residual_rhs(st));

  const auto ops = oracle::build_operators(g, SymbolMode::CentralDifference);
  const auto& m = s.coefficients();
  const Eigen::Map<const Eigen::VectorXd> A(m.diffusivity.values().data(), 64), F(m.source.values().data(), 64),
      chi(st.chi.values().data(), 64);
  Eigen::VectorXd ref = F;
  for (int j = 0; j < 2; ++j) {
    const Eigen::Map<const Eigen::VectorXd> B(m.advection.component(j).data(), 64);
    const Eigen::VectorXd flux = ops.grad[j] * chi + Eigen::VectorXd::Constant(64, c.g_chi[j]);
    ref += ops.grad[j] * (A.array() - c.a0).matrix().cwiseProduct(flux);
    ref -= (B.array() - m.b0[j]).matrix().cwiseProduct(flux);
  }
  double num = 0.0;
  for (int p = 0; p < 64; ++p) num += std::pow(fr[p] - ref(p), 2);
  CHECK(std::sqrt(num) / ref.norm() <= 1e-10);
}

TEST_CASE("concentration update inverts the comparison operator") {
  const auto g = UnitCellGrid::uniform(8);
  TransportConfig c;
  c.b0_vector = std::vector<double>{1.0, 0.0};
  const TransportSolver s(make_model_geometry(g, 0.25), VectorField(g), c);
  SpectralField f(g, 1);
  f.component(0)[g.index(2, 1)] = Complex(3.0, 1.0);
  f.component(0)[g.index(6, 7)] = Complex(3.0, -1.0);
  const auto st = s.update_concentration(f);
  CHECK(std::abs(st.chi.mean()) < 1e-15);
  const auto fr = s.fft().inverse_scalar(f);
  const auto ops = oracle::build_operators(g, SymbolMode::CentralDifference);
  const Eigen::Map<const Eigen::VectorXd> chi(st.chi.values().data(), 64), rhs(fr.values().data(), 64);
  const Eigen::VectorXd lhs = c.a0 * ops.neg_lap * chi + ops.grad[0] * chi;
  CHECK((lhs - rhs).norm() <= 1e-10 * rhs.norm());
  const Eigen::Map<const Eigen::VectorXd> gx(st.grad_chi.component(0).data(), 64);
  CHECK((gx - ops.grad[0] * chi).norm() <= 1e-12 * gx.norm());

  const auto zero = s.update_concentration(SpectralField(g, 1));
  CHECK(l2_norm(zero.chi.values()) == 0.0);
}

TEST_CASE("pure Poisson scaling of one harmonic") {
  const auto g = UnitCellGrid::uniform(8);
  TransportConfig c;
  c.b0 = 0.0;
  c.a0 = 0.8;
  const TransportSolver s(make_model_geometry(g, 0.25), VectorField(g), c);
  SpectralField f(g, 1);
  const auto k = g.index(1, 0);
  f.component(0)[k] = 2.0;
  f.component(0)[g.index(7, 0)] = 2.0;
  const auto fh = s.fft().forward(s.update_concentration(f).chi);
  CHECK(std::abs(fh.component(0)[k] - 2.0 / (0.8 * s.symbols().laplacian()[k])) < 1e-12);
}

TEST_CASE("gauge and nyquist filter hold every iteration") {
  const auto g = UnitCellGrid::uniform(16);
  const auto h = make_model_geometry(g, 0.25);
  TransportConfig c;
  c.pe = 50.0;
  const TransportSolver s(h, disk_flow(16), c);
  TransportState st = TransportState::zeros(g);
  for (int it = 0; it < 5; ++it) {
    st = s.iterate(st);
    CHECK(std::abs(st.chi.mean()) < 1e-14);
    const auto gh = s.fft().forward(st.grad_chi);
    CHECK(std::abs(gh.component(0)[g.index(8, 3)]) < 1e-12);
    CHECK(std::abs(gh.component(1)[g.index(3, 8)]) < 1e-12);
  }
}

TEST_CASE("converged transport is a fixed point") {
  const auto g = UnitCellGrid::uniform(16);
  const auto h = make_model_geometry(g, 0.25);
  TransportConfig c;
  c.pe = 50.0;
  c.eps = 1e-6;
  const TransportSolver s(h, disk_flow(16), c);
  const auto r = s.solve();
  REQUIRE(r.report.converged());
  const auto next = s.iterate(r.state);
  double d1 = 0.0, d2 = 0.0;
  for (std::size_t p = 0; p < g.num_points(); ++p) d1 += std::pow(next.chi[p] - r.state.chi[p], 2);
  for (int a = 0; a < 2; ++a)
    for (std::size_t p = 0; p < g.num_points(); ++p)
      d2 += std::pow(next.grad_chi.component(a)[p] - r.state.grad_chi.component(a)[p], 2);
  CHECK(std::sqrt(d1) <= std::sqrt(256.0) * c.eps);
  CHECK(std::sqrt(d2) <= std::sqrt(512.0) * c.eps);
}

TEST_CASE("low comparison diffusivity is reported as divergence") {
  const auto g = UnitCellGrid::uniform(32);
  const auto h = make_model_geometry(g, 0.25);
  TransportConfig c;
  c.pe = 50.0;
  c.a0 = 0.2;
  const auto r = TransportSolver(h, disk_flow(32), c).solve();
  CHECK(r.report.status == TransportStatus::Diverged);
  CHECK(r.report.iterations < 1000);
  c.max_iter = 3;
  c.a0 = 0.55;
  const auto m = TransportSolver(h, disk_flow(32), c).solve();
  CHECK(m.report.status == TransportStatus::MaxIterations);
}

TEST_CASE("flux is continuous across a layered interface") {
  // Solid stripe across the second axis, driven along that axis: the flux
  // normal to the stripe is uniform in the exact solution.
  const int n = 32;
  const UnitCellGrid g({4, n});
  std::vector<double> hv(g.num_points(), 0.0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < 4; ++i) hv[g.index(i, j)] = (j >= n / 4 && j < 3 * n / 4) ? 1.0 : 0.0;
  const IndicatorField h(g, hv);
  TransportConfig c;
  c.g_chi = {0.0, 1.0};
  c.eta = 0.1;
  c.eps = 1e-9;
  c.max_iter = 50000;
  const TransportSolver s(h, VectorField(g), c);
  const auto r = s.solve();
  REQUIRE(r.report.converged());
  const auto& m = s.coefficients();
  // Series conductance of the two layers.
  const double flux_exact = 1.0 / (0.5 / 1.0 + 0.5 / c.eta);
  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    const auto p = g.index(0, j);
    const double flux = m.diffusivity[p] * (r.state.grad_chi.component(1)[p] + 1.0);
    if (j == n / 4 - 1 || j == n / 4 || j == 3 * n / 4 - 1 || j == 3 * n / 4) continue;  // interface cells
    worst = std::max(worst, std::abs(flux - flux_exact) / flux_exact);
  }
  CHECK(worst <= 4.0 / n);
}
