#pragma once

#include <complex>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "porofft/grid.hpp"

namespace porofft {

using Complex = std::complex<double>;

/// How derivatives are represented per Fourier mode.
///
/// Exact:             kappa_j = 2 pi m_j,          L = sum_j (2 pi m_j)^2
/// CentralDifference: kappa_j = sin(h_j k_j)/h_j,  L = sum_j 4 sin^2(h_j k_j / 2)/h_j^2
///
/// The first-derivative symbol is i*kappa_j. kappa_j is zero at the Nyquist
/// frequency m_j = -N_j/2 in both modes so real fields map to real fields.
enum class SymbolMode { Exact, CentralDifference };

std::string_view to_string(SymbolMode mode);
/// Accepts "exact", "central", "central-difference" (case-sensitive).
SymbolMode parse_symbol_mode(std::string_view s);

/// Complex coefficients per mode, for 1 or d components. Mode layout matches
/// the real-space layout; per axis the order is 0..N/2-1, -N/2..-1.
class SpectralField {
 public:
  SpectralField(UnitCellGrid grid, int components);

  const UnitCellGrid& grid() const { return grid_; }
  int components() const { return static_cast<int>(comps_.size()); }
  std::size_t size() const { return grid_.num_points(); }
  std::span<Complex> component(int c) { return comps_[static_cast<std::size_t>(c)]; }
  std::span<const Complex> component(int c) const { return comps_[static_cast<std::size_t>(c)]; }

 private:
  UnitCellGrid grid_;
  std::vector<std::vector<Complex>> comps_;
};

class SpectralSymbols {
 public:
  SpectralSymbols(const UnitCellGrid& grid, SymbolMode mode);

  const UnitCellGrid& grid() const { return grid_; }
  SymbolMode mode() const { return mode_; }
  /// Real first-derivative factor kappa_axis(k) for every mode.
  std::span<const double> kappa(int axis) const { return kappa_[static_cast<std::size_t>(axis)]; }
  /// Nonnegative Laplacian symbol L(k); the operator is -L.
  std::span<const double> laplacian() const { return lap_; }

  /// Signed integer frequency of FFT index `i` on an axis of `n` points.
  static int frequency(int i, int n) { return i < (n + 1) / 2 ? i : i - n; }

 private:
  UnitCellGrid grid_;
  SymbolMode mode_;
  std::vector<std::vector<double>> kappa_;
  std::vector<double> lap_;
};

/// Multi-dimensional DFT over a fixed grid (FFTW backed).
///
/// Normalization: the forward transform is unnormalized, so the k = 0
/// coefficient equals n_pts * mean; the inverse divides by n_pts, making
/// inverse(forward(f)) = f. The object is immutable and may be shared by
/// concurrent callers.
class FourierTransform {
 public:
  explicit FourierTransform(const UnitCellGrid& grid);

  const UnitCellGrid& grid() const { return grid_; }

  void forward(std::span<const double> in, std::span<Complex> out) const;
  void forward(std::span<const Complex> in, std::span<Complex> out) const;
  /// Real part of the normalized inverse; the largest discarded imaginary
  /// magnitude is stored in *max_imag when given.
  void inverse(std::span<const Complex> in, std::span<double> out, double* max_imag = nullptr) const;

  SpectralField forward(const ScalarField& f) const;
  SpectralField forward(const VectorField& f) const;
  ScalarField inverse_scalar(const SpectralField& f, double* max_imag = nullptr) const;
  VectorField inverse_vector(const SpectralField& f, double* max_imag = nullptr) const;

 private:
  struct Plans;
  UnitCellGrid grid_;
  std::shared_ptr<const Plans> plans_;
};

/// Component j of the result is i * kappa_j * f.
SpectralField grad(const SpectralField& scalar, const SpectralSymbols& sym);
/// sum_j i * kappa_j * v_j.
SpectralField div(const SpectralField& vec, const SpectralSymbols& sym);
/// -L(k) * f(k), per component.
SpectralField apply_laplacian(const SpectralField& f, const SpectralSymbols& sym);

/// Convenience real-space wrappers: transform, apply the symbol, transform back.
VectorField gradient(const ScalarField& f, const SpectralSymbols& sym, const FourierTransform& fft);
ScalarField divergence(const VectorField& v, const SpectralSymbols& sym, const FourierTransform& fft);

}  // namespace porofft
