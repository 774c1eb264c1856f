#include "porofft/effective.hpp"

#include <algorithm>
#include <cmath>

#include "porofft/error.hpp"

namespace porofft {

double pore_average(const ScalarField& f, const IndicatorField& h) {
  require_same_grid(f.grid(), h.grid(), "pore average");
  if (h.pore_count() == 0) throw ParameterError("pore average of a cell without pore space");
  double s = 0.0;
  for (std::size_t p = 0; p < h.size(); ++p) {
    if (!h.is_solid(p)) s += f[p];
  }
  return s / static_cast<double>(h.pore_count());
}

std::vector<double> pore_average(const VectorField& f, const IndicatorField& h) {
  require_same_grid(f.grid(), h.grid(), "pore average");
  if (h.pore_count() == 0) throw ParameterError("pore average of a cell without pore space");
  std::vector<double> out(static_cast<std::size_t>(f.components()), 0.0);
  for (int c = 0; c < f.components(); ++c) {
    const auto fc = f.component(c);
    double s = 0.0;
    for (std::size_t p = 0; p < h.size(); ++p) {
      if (!h.is_solid(p)) s += fc[p];
    }
    out[static_cast<std::size_t>(c)] = s / static_cast<double>(h.pore_count());
  }
  return out;
}

double Tensor::asymmetry() const {
  double worst = 0.0;
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) worst = std::max(worst, std::abs((*this)(i, j) - (*this)(j, i)));
  }
  return worst;
}

Tensor permeability(std::span<const VectorField> u_unit, const IndicatorField& h, const SpectralSymbols& sym,
                    const FourierTransform& fft) {
  const auto& grid = h.grid();
  const int d = grid.dim();
  if (static_cast<int>(u_unit.size()) != d) throw ParameterError("permeability needs one flow per axis");
  require_same_grid(sym.grid(), grid, "permeability symbols");

  // grads[i][c] = d-component gradient of velocity component c of flow i.
  std::vector<std::vector<VectorField>> grads(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    require_same_grid(u_unit[static_cast<std::size_t>(i)].grid(), grid, "permeability flow");
    const SpectralField u_hat = fft.forward(u_unit[static_cast<std::size_t>(i)]);
    for (int c = 0; c < d; ++c) {
      SpectralField comp(grid, 1);
      std::copy(u_hat.component(c).begin(), u_hat.component(c).end(), comp.component(0).begin());
      grads[static_cast<std::size_t>(i)].push_back(fft.inverse_vector(grad(comp, sym)));
    }
  }

  Tensor k(d);
  const double w = grid.cell_volume();
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      double s = 0.0;
      for (int c = 0; c < d; ++c) {
        const auto& gi = grads[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
        const auto& gj = grads[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)];
        for (int a = 0; a < d; ++a) {
          const auto x = gi.component(a), y = gj.component(a);
          for (std::size_t p = 0; p < h.size(); ++p) {
            if (!h.is_solid(p)) s += x[p] * y[p];
          }
        }
      }
      k(i, j) = k(j, i) = s * w;
    }
  }
  return k;
}

Tensor diffusivity(std::span<const VectorField> u_unit, std::span<const TransportState> chi_unit,
                   const IndicatorField& h, double pe) {
  const auto& grid = h.grid();
  const int d = grid.dim();
  if (static_cast<int>(u_unit.size()) != d || static_cast<int>(chi_unit.size()) != d)
    throw ParameterError("diffusivity needs one flow and one concentration solution per axis");
  if (h.pore_count() == 0) throw ParameterError("diffusivity of a cell without pore space");
  const double w = grid.cell_volume();
  const double phi = porosity(h);

  Tensor dt(d);
  for (int i = 0; i < d; ++i) {
    const auto& ui = u_unit[static_cast<std::size_t>(i)];
    require_same_grid(ui.grid(), grid, "diffusivity flow");
    const double ubar_i = pore_average(ui, h)[static_cast<std::size_t>(i)];
    const auto uii = ui.component(i);
    for (int j = 0; j < d; ++j) {
      const auto& cj = chi_unit[static_cast<std::size_t>(j)];
      require_same_grid(cj.chi.grid(), grid, "diffusivity concentration");
      const auto dchi = cj.grad_chi.component(i);
      double advective = 0.0, gradient = 0.0;
      for (std::size_t p = 0; p < h.size(); ++p) {
        if (h.is_solid(p)) continue;
        advective += (ubar_i - uii[p]) * cj.chi[p];
        gradient += dchi[p];
      }
      dt(i, j) = (i == j ? phi : 0.0) + pe * advective * w + gradient * w;
    }
  }
  return dt;
}

}  // namespace porofft
