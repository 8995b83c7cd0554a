#include "bht/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bht {

namespace {
constexpr double TWO_PI = 2.0 * std::numbers::pi;

void check_same_grid(int n1, double L1, int n2, double L2, const char* who) {
    if (n1 != n2 || L1 != L2) throw parameter_error(std::string(who) + ": grid mismatch");
}
} // namespace

std::vector<cplx> spectrum(const Field1D& f) {
    std::vector<cplx> s = f.v;
    fft_inplace(s.data(), s.size(), -1);
    return s;
}

std::vector<cplx> spectrum2d(const Field2D& F) {
    std::vector<cplx> s = F.v;
    const std::size_t N = F.N();
    fft_rows(s.data(), N, -1);
    fft_cols(s.data(), N, -1);
    return s;
}

Field1D field_from_spectrum(std::vector<cplx> spec, double L) {
    std::size_t N = spec.size();
    fft_inplace(spec.data(), N, +1);
    Field1D f;
    f.n = 0;
    while ((std::size_t(1) << f.n) < N) ++f.n;
    f.L = L;
    f.v = std::move(spec);
    const double inv = 1.0 / double(N);
    for (auto& z : f.v) z *= inv;
    return f;
}

Field2D field2d_from_spectrum(std::vector<cplx> spec, double L) {
    std::size_t NN = spec.size();
    std::size_t N = 1;
    while (N * N < NN) N <<= 1;
    if (N * N != NN) throw parameter_error("field2d_from_spectrum: not a square power-of-two array");
    fft_cols(spec.data(), N, +1);
    fft_rows(spec.data(), N, +1);
    Field2D F;
    F.n = 0;
    while ((std::size_t(1) << F.n) < N) ++F.n;
    F.L = L;
    F.v = std::move(spec);
    const double inv = 1.0 / double(NN);
    for (auto& z : F.v) z *= inv;
    return F;
}

namespace {
template <class V>
double lp_impl(const V& v, double p, double cell) {
    if (p < 1.0) throw parameter_error("lp_norm: p must be >= 1");
    if (std::isinf(p)) {
        double m = 0;
        for (const auto& z : v) m = std::max(m, std::abs(z));
        return m;
    }
    double acc = 0;
    for (const auto& z : v) acc += std::pow(std::abs(z), p);
    return std::pow(acc * cell, 1.0 / p);
}
} // namespace

double lp_norm(const Field1D& f, double p) { return lp_impl(f.v, p, f.dx()); }
double lp_norm(const Field2D& F, double p) { return lp_impl(F.v, p, F.dx() * F.dx()); }

cplx inner(const Field1D& f, const Field1D& g) {
    check_same_grid(f.n, f.L, g.n, g.L, "inner");
    cplx acc = 0;
    for (std::size_t k = 0; k < f.v.size(); ++k) acc += f.v[k] * std::conj(g.v[k]);
    return acc * f.dx();
}

cplx inner(const Field2D& F, const Field2D& G) {
    check_same_grid(F.n, F.L, G.n, G.L, "inner");
    cplx acc = 0;
    for (std::size_t k = 0; k < F.v.size(); ++k) acc += F.v[k] * std::conj(G.v[k]);
    return acc * F.dx() * F.dx();
}

cplx integral(const Field2D& F) {
    cplx acc = 0;
    for (const auto& z : F.v) acc += z;
    return acc * F.dx() * F.dx();
}

Field2D translate_eval(const Field2D& F, double dx, double dy) {
    auto s = spectrum2d(F);
    const int N = F.N();
    for (int qy = 0; qy < N; ++qy) {
        const double ky = signed_freq(qy, N) / F.L;
        for (int qx = 0; qx < N; ++qx) {
            const double kx = signed_freq(qx, N) / F.L;
            s[std::size_t(qy) * N + qx] *= std::polar(1.0, TWO_PI * (kx * dx + ky * dy));
        }
    }
    return field2d_from_spectrum(std::move(s), F.L);
}

Field1D translate_eval(const Field1D& f, double dx) {
    auto s = spectrum(f);
    const int N = f.N();
    for (int q = 0; q < N; ++q)
        s[q] *= std::polar(1.0, TWO_PI * (signed_freq(q, N) / f.L) * dx);
    return field_from_spectrum(std::move(s), f.L);
}

Field2D modulate(const Field2D& F, long kx, long ky) {
    Field2D G = F;
    const int N = F.N();
    for (int iy = 0; iy < N; ++iy)
        for (int ix = 0; ix < N; ++ix)
            G.at(ix, iy) *= std::polar(1.0, TWO_PI * (double(kx) * F.x(ix) + double(ky) * F.y(iy)) / F.L);
    return G;
}

Field1D modulate(const Field1D& f, long k) {
    Field1D g = f;
    for (int i = 0; i < f.N(); ++i) g.v[i] *= std::polar(1.0, TWO_PI * double(k) * f.x(i) / f.L);
    return g;
}

Field2D dilate_dyadic(const Field2D& F, int k) {
    if (k < 0) throw parameter_error("dilate_dyadic: k must be >= 0");
    Field2D G(F.n, F.L);
    const int N = F.N();
    const long m = 1L << k;
    for (int iy = 0; iy < N; ++iy)
        for (int ix = 0; ix < N; ++ix)
            G.at(ix, iy) = F.at(int((long(ix) * m) % N), int((long(iy) * m) % N));
    return G;
}

Field2D compose_unimodular(const Field2D& F, long a, long b, long c, long d) {
    if (std::labs(a * d - b * c) != 1) throw parameter_error("compose_unimodular: |det| must be 1");
    // A^{-1} = sgn(det) * [[d, -b], [-c, a]]
    long det = a * d - b * c;
    long ia = d * det, ib = -b * det, ic = -c * det, id = a * det;
    Field2D G(F.n, F.L);
    const int N = F.N();
    auto wrap = [N](long t) { return int(((t % N) + N) % N); };
    for (int iy = 0; iy < N; ++iy)
        for (int ix = 0; ix < N; ++ix)
            G.at(ix, iy) = F.at(wrap(ia * ix + ib * iy), wrap(ic * ix + id * iy));
    return G;
}

Field1D fiber(const Field2D& F, int iy) {
    Field1D f(F.n, F.L);
    const int N = F.N();
    std::copy_n(F.v.begin() + std::size_t(iy) * N, N, f.v.begin());
    return f;
}

void set_fiber(Field2D& F, int iy, const Field1D& row) {
    check_same_grid(F.n, F.L, row.n, row.L, "set_fiber");
    std::copy(row.v.begin(), row.v.end(), F.v.begin() + std::size_t(iy) * F.N());
}

Field2D operator+(const Field2D& a, const Field2D& b) {
    check_same_grid(a.n, a.L, b.n, b.L, "operator+");
    Field2D out = a;
    for (std::size_t k = 0; k < out.v.size(); ++k) out.v[k] += b.v[k];
    return out;
}

Field2D operator-(const Field2D& a, const Field2D& b) {
    check_same_grid(a.n, a.L, b.n, b.L, "operator-");
    Field2D out = a;
    for (std::size_t k = 0; k < out.v.size(); ++k) out.v[k] -= b.v[k];
    return out;
}

Field2D operator*(const cplx& s, const Field2D& a) {
    Field2D out = a;
    for (auto& z : out.v) z *= s;
    return out;
}

Field2D pointwise(const Field2D& a, const Field2D& b) {
    check_same_grid(a.n, a.L, b.n, b.L, "pointwise");
    Field2D out = a;
    for (std::size_t k = 0; k < out.v.size(); ++k) out.v[k] *= b.v[k];
    return out;
}

} // namespace bht
