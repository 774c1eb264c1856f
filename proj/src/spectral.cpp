#include "porofft/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "porofft/error.hpp"
#include "porofft/parallel.hpp"

namespace porofft {
namespace {

// FFTW planning and plan destruction are not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }
fftw_complex* as_fftw(const Complex* p) { return reinterpret_cast<fftw_complex*>(const_cast<Complex*>(p)); }

}  // namespace

std::string_view to_string(SymbolMode mode) {
  return mode == SymbolMode::Exact ? "exact" : "central";
}

SymbolMode parse_symbol_mode(std::string_view s) {
  if (s == "exact") return SymbolMode::Exact;
  if (s == "central" || s == "central-difference") return SymbolMode::CentralDifference;
  throw ParameterError("unknown symbol mode '" + std::string(s) + "' (expected exact|central)");
}

SpectralField::SpectralField(UnitCellGrid grid, int components) : grid_(std::move(grid)) {
  comps_.assign(static_cast<std::size_t>(components), std::vector<Complex>(grid_.num_points()));
}

SpectralSymbols::SpectralSymbols(const UnitCellGrid& grid, SymbolMode mode) : grid_(grid), mode_(mode) {
  const int d = grid.dim();
  const std::size_t n = grid.num_points();
  kappa_.assign(static_cast<std::size_t>(d), std::vector<double>(n, 0.0));
  lap_.assign(n, 0.0);

  // Per-axis tables, then combined over the multi-index.
  std::vector<std::vector<double>> kap1(static_cast<std::size_t>(d)), lap1(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) {
    const int na = grid.extent(a);
    const double h = grid.spacing(a);
    auto& ka = kap1[static_cast<std::size_t>(a)];
    auto& la = lap1[static_cast<std::size_t>(a)];
    ka.resize(static_cast<std::size_t>(na));
    la.resize(static_cast<std::size_t>(na));
    for (int i = 0; i < na; ++i) {
      const int m = frequency(i, na);
      const double k = 2.0 * std::numbers::pi * m;
      const bool nyquist = (na % 2 == 0) && (m == -na / 2);
      if (mode == SymbolMode::Exact) {
        ka[static_cast<std::size_t>(i)] = nyquist ? 0.0 : k;
        la[static_cast<std::size_t>(i)] = k * k;
      } else {
        ka[static_cast<std::size_t>(i)] = nyquist ? 0.0 : std::sin(h * k) / h;
        const double s = std::sin(0.5 * h * k);
        la[static_cast<std::size_t>(i)] = 4.0 * s * s / (h * h);
      }
    }
  }
  std::vector<int> idx(static_cast<std::size_t>(d));
  for (std::size_t p = 0; p < n; ++p) {
    grid.unravel(p, idx);
    double l = 0.0;
    for (int a = 0; a < d; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      const auto ia = static_cast<std::size_t>(idx[ua]);
      kappa_[ua][p] = kap1[ua][ia];
      l += lap1[ua][ia];
    }
    lap_[p] = l;
  }
}

struct FourierTransform::Plans {
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
  }
};

FourierTransform::FourierTransform(const UnitCellGrid& grid) : grid_(grid) {
  // FFTW is row-major (last index fastest); our axis 0 is fastest.
  std::vector<int> n(grid.dims().rbegin(), grid.dims().rend());
  std::vector<Complex> a(grid.num_points()), b(grid.num_points());
  auto plans = std::make_shared<Plans>();
  {
    std::lock_guard lock(planner_mutex());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    plans->fwd = fftw_plan_dft(grid.dim(), n.data(), as_fftw(a.data()), as_fftw(b.data()), FFTW_FORWARD, flags);
    plans->inv = fftw_plan_dft(grid.dim(), n.data(), as_fftw(a.data()), as_fftw(b.data()), FFTW_BACKWARD, flags);
  }
  if (!plans->fwd || !plans->inv) throw ParameterError("FFTW could not plan the transform");
  plans_ = std::move(plans);
}

void FourierTransform::forward(std::span<const Complex> in, std::span<Complex> out) const {
  if (in.size() != grid_.num_points() || out.size() != grid_.num_points())
    throw GridMismatch("transform size does not match its plan");
  fftw_execute_dft(plans_->fwd, as_fftw(in.data()), as_fftw(out.data()));
}

void FourierTransform::forward(std::span<const double> in, std::span<Complex> out) const {
  if (in.size() != grid_.num_points()) throw GridMismatch("transform size does not match its plan");
  std::vector<Complex> tmp(in.begin(), in.end());
  forward(std::span<const Complex>(tmp), out);
}

void FourierTransform::inverse(std::span<const Complex> in, std::span<double> out, double* max_imag) const {
  const std::size_t n = grid_.num_points();
  if (in.size() != n || out.size() != n) throw GridMismatch("transform size does not match its plan");
  std::vector<Complex> tmp(n);
  fftw_execute_dft(plans_->inv, as_fftw(in.data()), as_fftw(tmp.data()));
  const double scale = 1.0 / static_cast<double>(n);
  double worst = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    out[p] = tmp[p].real() * scale;
    worst = std::max(worst, std::abs(tmp[p].imag()) * scale);
  }
  if (max_imag) *max_imag = worst;
}

SpectralField FourierTransform::forward(const ScalarField& f) const {
  require_same_grid(f.grid(), grid_, "forward transform");
  SpectralField out(grid_, 1);
  forward(f.values(), out.component(0));
  return out;
}

SpectralField FourierTransform::forward(const VectorField& f) const {
  require_same_grid(f.grid(), grid_, "forward transform");
  SpectralField out(grid_, f.components());
  for (int c = 0; c < f.components(); ++c) forward(f.component(c), out.component(c));
  return out;
}

ScalarField FourierTransform::inverse_scalar(const SpectralField& f, double* max_imag) const {
  require_same_grid(f.grid(), grid_, "inverse transform");
  if (f.components() != 1) throw GridMismatch("inverse_scalar needs a one-component spectrum");
  ScalarField out(grid_);
  inverse(f.component(0), out.values(), max_imag);
  return out;
}

VectorField FourierTransform::inverse_vector(const SpectralField& f, double* max_imag) const {
  require_same_grid(f.grid(), grid_, "inverse transform");
  if (f.components() != grid_.dim()) throw GridMismatch("inverse_vector needs d components");
  VectorField out(grid_);
  double worst = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    double m = 0.0;
    inverse(f.component(c), out.component(c), &m);
    worst = std::max(worst, m);
  }
  if (max_imag) *max_imag = worst;
  return out;
}

SpectralField grad(const SpectralField& scalar, const SpectralSymbols& sym) {
  require_same_grid(scalar.grid(), sym.grid(), "grad");
  if (scalar.components() != 1) throw GridMismatch("grad expects a scalar spectrum");
  const int d = sym.grid().dim();
  SpectralField out(sym.grid(), d);
  const auto f = scalar.component(0);
  const auto n = static_cast<std::ptrdiff_t>(f.size());
  for (int a = 0; a < d; ++a) {
    const auto kap = sym.kappa(a);
    auto o = out.component(a);
#pragma omp parallel for if (n >= kParallelGrain) schedule(static)
    for (std::ptrdiff_t p = 0; p < n; ++p) o[p] = Complex(0.0, kap[p]) * f[p];
  }
  return out;
}

SpectralField div(const SpectralField& vec, const SpectralSymbols& sym) {
  require_same_grid(vec.grid(), sym.grid(), "div");
  const int d = sym.grid().dim();
  if (vec.components() != d) throw GridMismatch("div expects a d-component spectrum");
  SpectralField out(sym.grid(), 1);
  auto o = out.component(0);
  const auto n = static_cast<std::ptrdiff_t>(o.size());
  for (int a = 0; a < d; ++a) {
    const auto kap = sym.kappa(a);
    const auto v = vec.component(a);
#pragma omp parallel for if (n >= kParallelGrain) schedule(static)
    for (std::ptrdiff_t p = 0; p < n; ++p) o[p] += Complex(0.0, kap[p]) * v[p];
  }
  return out;
}

SpectralField apply_laplacian(const SpectralField& f, const SpectralSymbols& sym) {
  require_same_grid(f.grid(), sym.grid(), "laplacian");
  SpectralField out(sym.grid(), f.components());
  const auto lap = sym.laplacian();
  const auto n = static_cast<std::ptrdiff_t>(lap.size());
  for (int c = 0; c < f.components(); ++c) {
    const auto in = f.component(c);
    auto o = out.component(c);
#pragma omp parallel for if (n >= kParallelGrain) schedule(static)
    for (std::ptrdiff_t p = 0; p < n; ++p) o[p] = -lap[p] * in[p];
  }
  return out;
}

VectorField gradient(const ScalarField& f, const SpectralSymbols& sym, const FourierTransform& fft) {
  return fft.inverse_vector(grad(fft.forward(f), sym));
}

ScalarField divergence(const VectorField& v, const SpectralSymbols& sym, const FourierTransform& fft) {
  return fft.inverse_scalar(div(fft.forward(v), sym));
}

}  // namespace porofft
