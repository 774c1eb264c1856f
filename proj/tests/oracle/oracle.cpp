#include "oracle.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace oracle {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// 1D derivative and negative second-derivative matrices on n periodic cells.
void one_axis(int n, SymbolMode mode, MatrixXd& d1, MatrixXd& l1) {
  const double h = 1.0 / n;
  d1 = MatrixXd::Zero(n, n);
  l1 = MatrixXd::Zero(n, n);
  if (mode == SymbolMode::CentralDifference) {
    for (int a = 0; a < n; ++a) {
      const int up = (a + 1) % n, dn = (a + n - 1) % n;
      d1(a, up) += 0.5 / h;
      d1(a, dn) -= 0.5 / h;
      l1(a, a) += 2.0 / (h * h);
      l1(a, up) -= 1.0 / (h * h);
      l1(a, dn) -= 1.0 / (h * h);
    }
    return;
  }
  const double tau = 2.0 * std::numbers::pi;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      std::complex<double> sd = 0.0, sl = 0.0;
      for (int m = -(n / 2); m < n - n / 2; ++m) {
        const auto e = std::polar(1.0, tau * m * (a - b) / n);
        const bool nyquist = n % 2 == 0 && m == -n / 2;
        if (!nyquist) sd += std::complex<double>(0.0, tau * m) * e;
        sl += (tau * m) * (tau * m) * e;
      }
      d1(a, b) = sd.real() / n;
      l1(a, b) = sl.real() / n;
    }
  }
}

void check_size(const UnitCellGrid& g) {
  if (g.num_points() > kMaxPoints) throw std::invalid_argument("oracle grid too large for dense solves");
}

VectorXd to_eigen(std::span<const double> v) { return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())); }

}  // namespace

DenseOperators build_operators(const UnitCellGrid& grid, SymbolMode mode) {
  check_size(grid);
  const int d = grid.dim();
  const auto n = static_cast<Eigen::Index>(grid.num_points());
  DenseOperators ops;
  ops.grad.assign(static_cast<std::size_t>(d), MatrixXd::Zero(n, n));
  ops.neg_lap = MatrixXd::Zero(n, n);
  std::vector<int> mp(static_cast<std::size_t>(d)), mq(static_cast<std::size_t>(d));
  for (int axis = 0; axis < d; ++axis) {
    MatrixXd d1, l1;
    one_axis(grid.extent(axis), mode, d1, l1);
    for (Eigen::Index p = 0; p < n; ++p) {
      grid.unravel(static_cast<std::size_t>(p), mp);
      mq = mp;
      const int ia = mp[static_cast<std::size_t>(axis)];
      for (int t = 0; t < grid.extent(axis); ++t) {
        mq[static_cast<std::size_t>(axis)] = t;
        const auto q = static_cast<Eigen::Index>(grid.index(mq));
        ops.grad[static_cast<std::size_t>(axis)](p, q) += d1(ia, t);
        ops.neg_lap(p, q) += l1(ia, t);
      }
    }
  }
  return ops;
}

StokesSolution stokes(const IndicatorField& h, double nu, const std::vector<double>& g, SymbolMode mode) {
  const auto& grid = h.grid();
  const int d = grid.dim();
  const auto ops = build_operators(grid, mode);
  const auto n = static_cast<Eigen::Index>(grid.num_points());

  std::vector<Eigen::Index> pore;
  for (Eigen::Index p = 0; p < n; ++p) {
    if (h[static_cast<std::size_t>(p)] == 0.0) pore.push_back(p);
  }
  const auto np = static_cast<Eigen::Index>(pore.size());
  if (np == 0 || np == n) throw std::invalid_argument("oracle Stokes needs both pore and solid cells");

  MatrixXd kpp(np, np);
  for (Eigen::Index a = 0; a < np; ++a)
    for (Eigen::Index b = 0; b < np; ++b) kpp(a, b) = nu * ops.neg_lap(pore[a], pore[b]);
  const Eigen::LLT<MatrixXd> kinv(kpp);
  if (kinv.info() != Eigen::Success) throw std::runtime_error("pore Laplacian not positive definite");

  // Schur complement on the pressure: S = sum_j Gj[p,:]^T K^-1 Gj[p,:].
  MatrixXd s = MatrixXd::Zero(n, n);
  VectorXd rhs = VectorXd::Zero(n);
  std::vector<MatrixXd> gp(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    MatrixXd rows(np, n);
    for (Eigen::Index a = 0; a < np; ++a) rows.row(a) = ops.grad[static_cast<std::size_t>(j)].row(pore[a]);
    const MatrixXd kr = kinv.solve(rows);
    s += rows.transpose() * kr;
    rhs += rows.transpose() * kinv.solve(VectorXd::Constant(np, g[static_cast<std::size_t>(j)]));
    gp[static_cast<std::size_t>(j)] = std::move(rows);
  }
  // div u = -sum_j rows_j^T u_j (rows are antisymmetric); u_j = K^-1 (g_j - rows_j q)
  // gives S q = rhs. S is singular (constants, and checkerboards in central mode).
  const Eigen::SelfAdjointEigenSolver<MatrixXd> es(s);
  const VectorXd lam = es.eigenvalues();
  const double cut = 1e-10 * lam.cwiseAbs().maxCoeff();
  VectorXd c = es.eigenvectors().transpose() * rhs;
  for (Eigen::Index k = 0; k < n; ++k) c(k) = std::abs(lam(k)) > cut ? c(k) / lam(k) : 0.0;
  VectorXd q = es.eigenvectors() * c;
  q.array() -= q.mean();

  StokesSolution out{VectorField(grid), ScalarField(grid)};
  for (Eigen::Index p = 0; p < n; ++p) out.q[static_cast<std::size_t>(p)] = q(p);
  for (int j = 0; j < d; ++j) {
    const VectorXd uj = kinv.solve(VectorXd::Constant(np, g[static_cast<std::size_t>(j)]) - gp[static_cast<std::size_t>(j)] * q);
    auto comp = out.u.component(j);
    for (Eigen::Index a = 0; a < np; ++a) comp[static_cast<std::size_t>(pore[a])] = uj(a);
  }
  return out;
}

TransportSolution transport(const IndicatorField& h, const VectorField& u, const TransportProblem& pb) {
  const auto& grid = h.grid();
  const int d = grid.dim();
  const auto ops = build_operators(grid, pb.mode);
  const auto n = static_cast<Eigen::Index>(grid.num_points());

  VectorXd diff(n), src(n);
  std::vector<VectorXd> adv(static_cast<std::size_t>(d), VectorXd(n));
  std::vector<double> ubar(static_cast<std::size_t>(d), 0.0);
  std::size_t npore = 0;
  for (Eigen::Index p = 0; p < n; ++p) {
    if (h[static_cast<std::size_t>(p)] != 0.0) continue;
    ++npore;
    for (int j = 0; j < d; ++j) ubar[static_cast<std::size_t>(j)] += u.component(j)[static_cast<std::size_t>(p)];
  }
  if (npore == 0) throw std::invalid_argument("oracle transport needs pore cells");
  double ubar_g = 0.0;
  for (int j = 0; j < d; ++j) {
    ubar[static_cast<std::size_t>(j)] /= static_cast<double>(npore);
    ubar_g += ubar[static_cast<std::size_t>(j)] * pb.g_chi[static_cast<std::size_t>(j)];
  }
  for (Eigen::Index p = 0; p < n; ++p) {
    const double hv = h[static_cast<std::size_t>(p)];
    diff(p) = (1.0 - hv) + pb.eta * hv;
    src(p) = pb.pe * (1.0 - hv) * ubar_g;
    for (int j = 0; j < d; ++j)
      adv[static_cast<std::size_t>(j)](p) = pb.pe * (1.0 - hv) * u.component(j)[static_cast<std::size_t>(p)];
  }

  MatrixXd m = pb.a0 * ops.neg_lap;
  VectorXd f = src;
  for (int j = 0; j < d; ++j) {
    const MatrixXd& gj = ops.grad[static_cast<std::size_t>(j)];
    const double gc = pb.g_chi[static_cast<std::size_t>(j)];
    m += pb.a0 * gj * gj;
    m -= gj * diff.asDiagonal() * gj;
    m += adv[static_cast<std::size_t>(j)].asDiagonal() * gj;
    f += gj * (diff * gc);
    f -= adv[static_cast<std::size_t>(j)] * gc;
  }
  // Pin the mean: (P M + 1 1^T / n) chi = P f.
  const VectorXd ones = VectorXd::Ones(n);
  const MatrixXd pm = m - ones * (ones.transpose() * m) / static_cast<double>(n);
  const MatrixXd aug = pm + ones * ones.transpose() / static_cast<double>(n);
  const VectorXd pf = f - ones * f.mean();
  const VectorXd chi = aug.partialPivLu().solve(pf);

  TransportSolution out{ScalarField(grid), VectorField(grid)};
  for (Eigen::Index p = 0; p < n; ++p) out.chi[static_cast<std::size_t>(p)] = chi(p);
  for (int j = 0; j < d; ++j) {
    const VectorXd gc = ops.grad[static_cast<std::size_t>(j)] * chi;
    auto comp = out.grad_chi.component(j);
    for (Eigen::Index p = 0; p < n; ++p) comp[static_cast<std::size_t>(p)] = gc(p);
  }
  return out;
}

double rel_l2(const VectorField& a, const VectorField& ref) {
  double num = 0.0, den = 0.0;
  for (int c = 0; c < ref.components(); ++c) {
    const auto x = a.component(c), y = ref.component(c);
    for (std::size_t i = 0; i < y.size(); ++i) {
      num += (x[i] - y[i]) * (x[i] - y[i]);
      den += y[i] * y[i];
    }
  }
  return std::sqrt(num / den);
}

double rel_l2(const ScalarField& a, const ScalarField& ref) {
  const VectorXd x = to_eigen(a.values()), y = to_eigen(ref.values());
  return (x - y).norm() / y.norm();
}

}  // namespace oracle
