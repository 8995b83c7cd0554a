#pragma once

#include <cstdint>
#include <random>

#include "bht/field.hpp"

namespace bht {

using Rng = std::mt19937_64;

/// Band-limited field with iid complex Gaussian coefficients on
/// max(|kx|,|ky|) <= kmax; `real` forces Hermitian symmetry.
Field2D random_bandlimited2d(int n, double L, int kmax, Rng& rng, bool real = false);
Field1D random_bandlimited1d(int n, double L, int kmax, Rng& rng, bool real = false);

/// Rescaled so that the L^infinity norm is <= 1 (and typically close to it).
Field2D random_bounded2d(int n, double L, int kmax, Rng& rng);

} // namespace bht
