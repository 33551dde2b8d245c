#pragma once

#include <functional>
#include <span>

#include "mvlab/grid.hpp"

namespace mvlab::detail {

/// out = IFFT( m(|xi|^2) * FFT(in) ). `in` and `out` may alias.
void apply_radial_multiplier(const SpatialGrid& grid, std::span<const double> in, std::span<double> out,
                             const std::function<double(double)>& multiplier);

/// (1/M^dim) * sum_k |U_k|^2, i.e. sum_j u_j^2 by Parseval.
double spectral_energy(const SpatialGrid& grid, std::span<const double> in);

}  // namespace mvlab::detail
