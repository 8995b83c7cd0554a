#pragma once

#include <vector>

#include "bht/field.hpp"
#include "bht/multiplier.hpp"

namespace bht {

/// Fourier symbol of the mollifier eta at scale j: etahat(xi / 2^{jJ}),
/// supported in |xi| <= 2^{(j-2)J}.  eta itself is positive with integral 1
/// (autocorrelation-of-bump construction) and has polynomial decay of
/// certified order > 40.
double eta_symbol(double u, int J); // u = xi / 2^{jJ}; support |u| <= 2^{-2J}

/// Symbol vector for convolution with eta_j on an n-grid of period L.
std::vector<double> eta_symbol_vector(int n, double L, int j, int J);

/// chi_{E,j} for a 1D union of grid-aligned cells E (convolution with eta_j).
struct SmoothCutoff1D {
    Field1D field;
    int j = 0;
    Rational measure{0};
};

/// chi_{E,j} for a 2D set E, smoothed in the x coordinate only.
struct SmoothCutoff2D {
    Field2D field;
    int j = 0;
    Rational measure{0};
};

/// Sampled indicator of a union of half-open cells [lo, hi) x [lo, hi).
Field2D indicator2d(int n, double L, const std::vector<RationalRect>& cells);
Field1D indicator1d(int n, double L, const std::vector<RationalInterval>& cells);

SmoothCutoff1D smooth_cutoff(int n, double L, const std::vector<RationalInterval>& cells,
                             int j, int J);
SmoothCutoff2D smooth_cutoff(int n, double L, const std::vector<RationalRect>& cells,
                             int j, int J);

/// chi-tilde weight (1 + dist_T(x, c)/|I|)^{-1} sampled on the grid.
std::vector<double> chi_tilde_interval(int n, double L, const RationalInterval& I);
/// Tensor weight chi~_I(x) chi~_J(y), optionally raised to an integer power.
Field2D chi_tilde_rect(int n, double L, const RationalRect& R, int power = 1);
std::vector<double> powered(const std::vector<double>& w, int power);

/// Indicator of a closed rect sampled on half-open cells (for annular cutoffs).
Field2D indicator_rect(int n, double L, const RationalRect& R);

} // namespace bht
