#pragma once

#include <complex>
#include <vector>

#include "bht/dyadic.hpp"
#include "bht/errors.hpp"
#include "bht/fft.hpp"
#include "bht/rational.hpp"

namespace bht {

/// Complex samples on a periodic 1D grid of N = 2^n points, period L.
struct Field1D {
    int n = 0;
    double L = 1.0;
    std::vector<cplx> v;

    Field1D() = default;
    Field1D(int n_, double L_ = 1.0) : n(n_), L(L_), v(std::size_t(1) << n_) {}

    int N() const { return 1 << n; }
    double dx() const { return L / N(); }
    double x(int k) const { return k * dx(); }
};

/// Complex samples on a periodic N x N grid (N = 2^n), period L per axis.
/// Row-major storage, index (ix, iy) -> iy*N + ix; x is the fast axis.
struct Field2D {
    int n = 0;
    double L = 1.0;
    std::vector<cplx> v;

    Field2D() = default;
    Field2D(int n_, double L_ = 1.0) : n(n_), L(L_), v((std::size_t(1) << n_) * (std::size_t(1) << n_)) {}

    int N() const { return 1 << n; }
    double dx() const { return L / N(); }
    std::size_t idx(int ix, int iy) const { return std::size_t(iy) * N() + ix; }
    cplx& at(int ix, int iy) { return v[idx(ix, iy)]; }
    const cplx& at(int ix, int iy) const { return v[idx(ix, iy)]; }
    double x(int k) const { return k * dx(); }
    double y(int k) const { return k * dx(); }
    Rational xr(int k) const { return Rational(k) * Rational(1, N()); } // for L == 1 grids
};

/// Signed frequency index of FFT bin q on an N-point grid: q for q < N/2, else q - N.
inline int signed_freq(int q, int N) { return q < N / 2 ? q : q - N; }
/// FFT bin of signed frequency s in [-N/2, N/2).
inline int freq_bin(int s, int N) { return s >= 0 ? s : s + N; }

// --- transforms -----------------------------------------------------------

std::vector<cplx> spectrum(const Field1D& f);              // unnormalized forward
std::vector<cplx> spectrum2d(const Field2D& F);            // unnormalized forward, both axes
Field1D field_from_spectrum(std::vector<cplx> spec, double L);
Field2D field2d_from_spectrum(std::vector<cplx> spec, double L);

// --- norms and pairings ----------------------------------------------------

/// Riemann-sum L^p norm, p in [1, inf]; p = INFINITY gives the max modulus.
double lp_norm(const Field1D& f, double p);
double lp_norm(const Field2D& F, double p);

/// Riemann-sum inner product  sum F conj(G) * cell.
cplx inner(const Field1D& f, const Field1D& g);
cplx inner(const Field2D& F, const Field2D& G);

/// Riemann integral of F over the torus.
cplx integral(const Field2D& F);

// --- exact lattice symmetries ---------------------------------------------

/// G(x, y) = F(x + dx, y + dy); spectral phase shift, exact for trig interpolants.
Field2D translate_eval(const Field2D& F, double dx, double dy);
Field1D translate_eval(const Field1D& f, double dx);

/// G = e^{2 pi i (kx x + ky y)/L} F, integer modulation (exact on the lattice).
Field2D modulate(const Field2D& F, long kx, long ky);
Field1D modulate(const Field1D& f, long k);

/// G(x, y) = F(2^k x, 2^k y), k >= 0; exact lattice resampling.
Field2D dilate_dyadic(const Field2D& F, int k);

/// G(z) = F(A^{-1} z) for unimodular integer A (torus automorphism); exact
/// lattice permutation.  a,b,c,d are the entries of A row-major, |det| = 1.
Field2D compose_unimodular(const Field2D& F, long a, long b, long c, long d);

// --- fibers ----------------------------------------------------------------

Field1D fiber(const Field2D& F, int iy);
void set_fiber(Field2D& F, int iy, const Field1D& row);

// --- arithmetic helpers ----------------------------------------------------

Field2D operator+(const Field2D& a, const Field2D& b);
Field2D operator-(const Field2D& a, const Field2D& b);
Field2D operator*(const cplx& s, const Field2D& a);
Field2D pointwise(const Field2D& a, const Field2D& b);

} // namespace bht
