#include "bht/cutoff.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace bht {

namespace {

// Autocorrelation A(u) = int b(t) b(t+u) dt of b(t) = cos^22(pi t) on [-1/2,1/2],
// normalized to A(0) = 1.  C^21 with compact support [-1,1]; its inverse
// transform is |b-check|^2 >= 0 with decay ~ |x|^{-46}.
double autocorr_cos22(double u) {
    u = std::abs(u);
    if (u >= 1.0) return 0.0;
    const double lo = -0.5, hi = 0.5 - u;
    const int panels = 512;
    const double h = (hi - lo) / panels;
    auto b = [](double t) { return cos_pow_bump(t, 22); };
    double acc = b(lo) * b(lo + u) + b(hi) * b(hi + u);
    for (int k = 1; k < panels; ++k) {
        const double t = lo + k * h;
        acc += 2.0 * (k % 2 ? 2.0 : 1.0) * b(t) * b(t + u);
    }
    return acc * h / 3.0;
}

double autocorr_norm() {
    static const double a0 = autocorr_cos22(0.0);
    return a0;
}

} // namespace

double eta_symbol(double u, int J) {
    const double scale = std::ldexp(1.0, 2 * J); // support |u| <= 2^{-2J}
    return autocorr_cos22(u * scale) / autocorr_norm();
}

std::vector<double> eta_symbol_vector(int n, double L, int j, int J) {
    static std::mutex mtx;
    static std::map<std::tuple<int, double, int, int>, std::vector<double>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_tuple(n, L, j, J);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const int N = 1 << n;
    std::vector<double> sym(N);
    const double s = std::ldexp(1.0, j * J); // eta_j scale
    for (int q = 0; q < N; ++q) sym[q] = eta_symbol(signed_freq(q, N) / L / s, J);
    cache.emplace(key, sym);
    return sym;
}

Field1D indicator1d(int n, double L, const std::vector<RationalInterval>& cells) {
    Field1D f(n, L);
    const int N = f.N();
    const Rational h = Rational(BigInt(std::llround(L))) / N; // valid for integer L
    for (int k = 0; k < N; ++k) {
        const Rational x = Rational(k) * h;
        for (const auto& c : cells)
            if (c.lo <= x && x < c.hi) {
                f.v[k] += 1.0;
            }
    }
    return f;
}

Field2D indicator2d(int n, double L, const std::vector<RationalRect>& cells) {
    Field2D F(n, L);
    const int N = F.N();
    const Rational h = Rational(BigInt(std::llround(L))) / N;
    for (int iy = 0; iy < N; ++iy) {
        const Rational y = Rational(iy) * h;
        for (int ix = 0; ix < N; ++ix) {
            const Rational x = Rational(ix) * h;
            for (const auto& c : cells)
                if (c.x.lo <= x && x < c.x.hi && c.y.lo <= y && y < c.y.hi) F.at(ix, iy) += 1.0;
        }
    }
    return F;
}

Field2D indicator_rect(int n, double L, const RationalRect& R) {
    return indicator2d(n, L, {R});
}

namespace {
void check_scale(int n, double L, int j, int J) {
    // cells of sidelength 2^{-jJ} L must be unions of grid cells
    if (j * J > n) throw scale_range_error("smooth_cutoff: scale 2^{-jJ} below the grid resolution");
    (void)L;
}
} // namespace

SmoothCutoff1D smooth_cutoff(int n, double L, const std::vector<RationalInterval>& cells,
                             int j, int J) {
    check_scale(n, L, j, J);
    SmoothCutoff1D out;
    out.j = j;
    Field1D ind = indicator1d(n, L, cells);
    for (const auto& c : cells) out.measure += c.length();
    auto s = spectrum(ind);
    auto sym = eta_symbol_vector(n, L, j, J);
    for (std::size_t q = 0; q < s.size(); ++q) s[q] *= sym[q];
    out.field = field_from_spectrum(std::move(s), L);
    return out;
}

SmoothCutoff2D smooth_cutoff(int n, double L, const std::vector<RationalRect>& cells,
                             int j, int J) {
    check_scale(n, L, j, J);
    SmoothCutoff2D out;
    out.j = j;
    Field2D ind = indicator2d(n, L, cells);
    for (const auto& c : cells) out.measure += c.area();
    // x-only convolution
    const std::size_t N = ind.N();
    fft_rows(ind.v.data(), N, -1);
    auto sym = eta_symbol_vector(n, L, j, J);
    for (std::size_t iy = 0; iy < N; ++iy)
        for (std::size_t q = 0; q < N; ++q) ind.v[iy * N + q] *= sym[q];
    fft_rows(ind.v.data(), N, +1);
    const double inv = 1.0 / double(N);
    for (auto& z : ind.v) z *= inv;
    out.field = std::move(ind);
    return out;
}

std::vector<double> chi_tilde_interval(int n, double L, const RationalInterval& I) {
    const int N = 1 << n;
    std::vector<double> w(N);
    const double c = to_double(I.center());
    const double len = to_double(I.length());
    for (int k = 0; k < N; ++k) {
        double d = std::abs(k * (L / N) - c);
        d = std::min(d, L - d);
        w[k] = 1.0 / (1.0 + d / len);
    }
    return w;
}

std::vector<double> powered(const std::vector<double>& w, int power) {
    std::vector<double> out = w;
    for (auto& x : out) x = std::pow(x, power);
    return out;
}

Field2D chi_tilde_rect(int n, double L, const RationalRect& R, int power) {
    Field2D W(n, L);
    auto wx = chi_tilde_interval(n, L, R.x);
    auto wy = chi_tilde_interval(n, L, R.y);
    const int N = W.N();
    for (int iy = 0; iy < N; ++iy)
        for (int ix = 0; ix < N; ++ix)
            W.at(ix, iy) = std::pow(wx[ix] * wy[iy], power);
    return W;
}

} // namespace bht
