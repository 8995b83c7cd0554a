#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "bht/field.hpp"

namespace bht {

// Smooth profile library. All are C^infinity or C^k with known constants.

/// 0 -> 1 transition on [0,1], C^infinity (exp-type), clamped outside.
double smooth_step(double t);
/// cos^pow(pi u) on |u| <= 1/2, zero outside; C^{pow-1} at the edges.
double cos_pow_bump(double u, int pow);
/// 1 on |u| <= 1/4, smooth rolloff to 0 at |u| = 1/2 (exp-type).
double plateau_bump(double u);

/// A 1D Fourier multiplier sampled on the integer frequency lattice of an
/// N = 2^n grid with period L.  `sym[q]` is the value at bin q.  The symbol
/// vanishes identically outside `support` (exact zeros).
struct Multiplier1D {
    int n = 0;
    double L = 1.0;
    std::vector<double> sym;
    RationalInterval support;
    int order = 0;          ///< certified adaptation order
    double constant = 0.0;  ///< measured adaptation constant

    int N() const { return 1 << n; }
    double at_freq(int s) const { return sym[freq_bin(s, N())]; }
};

/// 2D multiplier; either a tensor product sx(xi) * sy(eta) or a full grid.
struct Multiplier2D {
    int n = 0;
    double L = 1.0;
    bool tensor = true;
    std::vector<double> sx, sy;    // tensor factors (size N), valid when tensor
    std::vector<double> grid;      // full N*N symbol, valid when !tensor

    int N() const { return 1 << n; }
    double value(int qx, int qy) const {
        return tensor ? sx[qx] * sy[qy] : grid[std::size_t(qy) * N() + qx];
    }
};

/// Measured adaptation constant: max over 1 <= a <= order of
/// max_q |Delta^a sym| * (|support| L)^a, plus the a = 0 sup bound.
double certify_adaptation(const std::vector<double>& sym, double support_len_freq,
                          double freq_spacing, int order);

/// Smooth bump adapted to `support`, cos^4 profile (certified at order 2).
Multiplier1D adapted_bump(int n, double L, const RationalInterval& support, int order = 2);

/// Bump supported in `support` vanishing at the point v in `support`.
Multiplier1D vanishing_bump(int n, double L, const RationalInterval& support,
                            const Rational& v, int order = 2);

/// Indicator-sharp multiplier of the lattice points in `support` (0/1 symbol).
Multiplier1D sharp_projection(int n, double L, const RationalInterval& support);

/// Low-pass symbol: 1 for |xi| <= 2^{1+e}, supported in |xi| <= 2^{2+e}
/// (frequencies in cycles; e may be any integer, edges beyond Nyquist clamp).
Multiplier1D lowpass_T(int n, double L, int e);
/// Band symbol S = T_e - T_{e-1}.
Multiplier1D band_S(int n, double L, int e);

/// Generic band symbol: 1 on [one_lo, one_hi] (absolute value of frequency),
/// supported in [supp_lo, supp_hi]; smooth transitions; even in xi.
Multiplier1D even_band(int n, double L, double supp_lo, double one_lo, double one_hi,
                       double supp_hi);

Multiplier2D tensor_multiplier(const Multiplier1D& mx, const Multiplier1D& my);

// --- application -----------------------------------------------------------

Field2D apply_multiplier_x(const Field2D& F, const Multiplier1D& m);
Field2D apply_multiplier_y(const Field2D& F, const Multiplier1D& m);
Field2D apply_multiplier_2d(const Field2D& F, const Multiplier2D& m);
Field1D apply_multiplier(const Field1D& f, const Multiplier1D& m);

// --- weighted Bernstein check ----------------------------------------------

struct BernsteinReport {
    double ratio = 0;       ///< ||w f||_inf / (sqrt(W) ||w f||_2), W = band width
    double essconst_C = 0;  ///< measured essential-constancy constant of w
    double band_leak = 0;   ///< relative spectral mass outside the band
};

/// f must be band-limited to `omega` (relative leak <= 1e-10) and w essentially
/// constant at scale 1/|omega| with constant <= max_essconst.
BernsteinReport bernstein_check(const Field1D& f, const RationalInterval& omega,
                                const std::vector<double>& w, double max_essconst = 16.0);

} // namespace bht
