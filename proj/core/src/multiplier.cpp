#include "bht/multiplier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bht {

double smooth_step(double t) {
    if (t <= 0) return 0.0;
    if (t >= 1) return 1.0;
    double a = std::exp(-1.0 / t);
    double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

double cos_pow_bump(double u, int pow) {
    if (std::abs(u) >= 0.5) return 0.0;
    return std::pow(std::cos(std::numbers::pi * u), pow);
}

double plateau_bump(double u) {
    double a = std::abs(u);
    if (a >= 0.5) return 0.0;
    if (a <= 0.25) return 1.0;
    return smooth_step(2.0 - 4.0 * a);
}

double certify_adaptation(const std::vector<double>& sym, double support_len_freq,
                          double freq_spacing, int order) {
    // |Delta^a sym| / spacing^a estimates |d^a m|; adaptation wants <= C len^{-a}.
    std::vector<double> cur = sym;
    double constant = *std::max_element(cur.begin(), cur.end(),
                                        [](double a, double b) { return std::abs(a) < std::abs(b); });
    constant = std::abs(constant);
    const std::size_t N = sym.size();
    double scale = support_len_freq / freq_spacing;
    double fac = 1.0;
    for (int a = 1; a <= order; ++a) {
        std::vector<double> nxt(N);
        for (std::size_t q = 0; q < N; ++q) nxt[q] = cur[(q + 1) % N] - cur[q];
        cur = std::move(nxt);
        fac *= scale;
        double m = 0;
        for (double x : cur) m = std::max(m, std::abs(x));
        constant = std::max(constant, m * fac);
    }
    return constant;
}

namespace {

Multiplier1D from_shape(int n, double L, const RationalInterval& support,
                        const std::function<double(double)>& shape, int order) {
    Multiplier1D m;
    m.n = n;
    m.L = L;
    m.support = support;
    m.sym.assign(std::size_t(1) << n, 0.0);
    const int N = m.N();
    const double c = to_double(support.center());
    const double len = to_double(support.length());
    for (int q = 0; q < N; ++q) {
        const int s = signed_freq(q, N);
        // exact support test on the rational lattice point s/L (L is exact here
        // only for integer L; fall back to double comparison otherwise)
        bool inside;
        if (L == 1.0) {
            inside = support.contains(Rational(s));
        } else {
            double f = s / L;
            inside = f >= to_double(support.lo) && f <= to_double(support.hi);
        }
        if (!inside) continue;
        m.sym[q] = shape((s / L - c) / len);
    }
    m.order = order;
    m.constant = certify_adaptation(m.sym, len, 1.0 / L, order);
    return m;
}

} // namespace

Multiplier1D adapted_bump(int n, double L, const RationalInterval& support, int order) {
    return from_shape(n, L, support, [](double u) { return cos_pow_bump(u, 4); }, order);
}

Multiplier1D vanishing_bump(int n, double L, const RationalInterval& support,
                            const Rational& v, int order) {
    const double v0 = to_double(v);
    const double c = to_double(support.center());
    const double len = to_double(support.length());
    const double vr = (v0 - c) / len; // v in bump coordinates
    auto shape = [vr](double u) {
        return cos_pow_bump(u, 4) * std::sin(std::numbers::pi * (u - vr) / 2.0);
    };
    return from_shape(n, L, support, shape, order);
}

Multiplier1D sharp_projection(int n, double L, const RationalInterval& support) {
    return from_shape(n, L, support, [](double) { return 1.0; }, 0);
}

Multiplier1D even_band(int n, double L, double supp_lo, double one_lo, double one_hi,
                       double supp_hi) {
    if (!(supp_lo <= one_lo && one_lo <= one_hi && one_hi <= supp_hi))
        throw parameter_error("even_band: edges out of order");
    Multiplier1D m;
    m.n = n;
    m.L = L;
    m.sym.assign(std::size_t(1) << n, 0.0);
    const int N = m.N();
    for (int q = 0; q < N; ++q) {
        const double a = std::abs(signed_freq(q, N) / L);
        double val;
        if (a < supp_lo || a > supp_hi) val = 0.0;
        else if (a < one_lo) val = smooth_step((a - supp_lo) / (one_lo - supp_lo));
        else if (a <= one_hi) val = 1.0;
        else val = smooth_step((supp_hi - a) / (supp_hi - one_hi));
        m.sym[q] = val;
    }
    m.support = RationalInterval(Rational(-BigInt(std::ceil(supp_hi * L))),
                                 Rational(BigInt(std::ceil(supp_hi * L))));
    return m;
}

Multiplier1D lowpass_T(int n, double L, int e) {
    Multiplier1D m;
    m.n = n;
    m.L = L;
    m.sym.assign(std::size_t(1) << n, 0.0);
    const int N = m.N();
    const double s1 = std::ldexp(1.0, e + 1); // symbol 1 up to here
    const double s0 = std::ldexp(1.0, e + 2); // supported up to here
    for (int q = 0; q < N; ++q) {
        const double a = std::abs(signed_freq(q, N) / L);
        if (a <= s1) m.sym[q] = 1.0;
        else if (a < s0) m.sym[q] = smooth_step((s0 - a) / (s0 - s1));
    }
    m.support = RationalInterval(-Rational(BigInt(std::ceil(s0 * L))),
                                 Rational(BigInt(std::ceil(s0 * L))));
    return m;
}

Multiplier1D band_S(int n, double L, int e) {
    Multiplier1D t1 = lowpass_T(n, L, e);
    Multiplier1D t0 = lowpass_T(n, L, e - 1);
    for (std::size_t q = 0; q < t1.sym.size(); ++q) t1.sym[q] -= t0.sym[q];
    return t1;
}

Multiplier2D tensor_multiplier(const Multiplier1D& mx, const Multiplier1D& my) {
    if (mx.n != my.n || mx.L != my.L) throw parameter_error("tensor_multiplier: grid mismatch");
    Multiplier2D m;
    m.n = mx.n;
    m.L = mx.L;
    m.tensor = true;
    m.sx = mx.sym;
    m.sy = my.sym;
    return m;
}

namespace {
void check_lattice(int fn, double fL, int mn, double mL, const char* who) {
    if (fn != mn || fL != mL) throw parameter_error(std::string(who) + ": frequency lattice mismatch");
}
} // namespace

Field2D apply_multiplier_x(const Field2D& F, const Multiplier1D& m) {
    check_lattice(F.n, F.L, m.n, m.L, "apply_multiplier_x");
    Field2D G = F;
    const std::size_t N = F.N();
    fft_rows(G.v.data(), N, -1);
    for (std::size_t iy = 0; iy < N; ++iy)
        for (std::size_t q = 0; q < N; ++q) G.v[iy * N + q] *= m.sym[q];
    fft_rows(G.v.data(), N, +1);
    const double inv = 1.0 / double(N);
    for (auto& z : G.v) z *= inv;
    return G;
}

Field2D apply_multiplier_y(const Field2D& F, const Multiplier1D& m) {
    check_lattice(F.n, F.L, m.n, m.L, "apply_multiplier_y");
    Field2D G = F;
    const std::size_t N = F.N();
    fft_cols(G.v.data(), N, -1);
    for (std::size_t q = 0; q < N; ++q)
        for (std::size_t ix = 0; ix < N; ++ix) G.v[q * N + ix] *= m.sym[q];
    fft_cols(G.v.data(), N, +1);
    const double inv = 1.0 / double(N);
    for (auto& z : G.v) z *= inv;
    return G;
}

Field2D apply_multiplier_2d(const Field2D& F, const Multiplier2D& m) {
    check_lattice(F.n, F.L, m.n, m.L, "apply_multiplier_2d");
    auto s = spectrum2d(F);
    const std::size_t N = F.N();
    for (std::size_t qy = 0; qy < N; ++qy)
        for (std::size_t qx = 0; qx < N; ++qx) s[qy * N + qx] *= m.value(int(qx), int(qy));
    return field2d_from_spectrum(std::move(s), F.L);
}

Field1D apply_multiplier(const Field1D& f, const Multiplier1D& m) {
    check_lattice(f.n, f.L, m.n, m.L, "apply_multiplier");
    auto s = spectrum(f);
    for (std::size_t q = 0; q < s.size(); ++q) s[q] *= m.sym[q];
    return field_from_spectrum(std::move(s), f.L);
}

BernsteinReport bernstein_check(const Field1D& f, const RationalInterval& omega,
                                const std::vector<double>& w, double max_essconst) {
    BernsteinReport rep;
    const int N = f.N();
    if (int(w.size()) != N) throw parameter_error("bernstein_check: weight size mismatch");

    auto s = spectrum(f);
    double inside = 0, outside = 0;
    for (int q = 0; q < N; ++q) {
        const double e = std::norm(s[q]);
        if (omega.contains(Rational(signed_freq(q, N)) / Rational(BigInt(std::llround(f.L)), 1)))
            inside += e;
        else
            outside += e;
    }
    rep.band_leak = inside > 0 ? std::sqrt(outside / (inside + outside)) : (outside > 0 ? 1.0 : 0.0);
    if (rep.band_leak > 1e-10)
        throw precondition_error("bernstein_check: input is not band-limited to omega");

    const double W = to_double(omega.length());
    const double r = 1.0 / W;
    double C = 0;
    for (int a = 0; a < N; ++a) {
        for (int b = 0; b < N; b += std::max(1, N / 256)) {
            if (w[a] <= 0 || w[b] <= 0) throw precondition_error("bernstein_check: weight must be positive");
            double d = std::abs(f.x(a) - f.x(b));
            d = std::min(d, f.L - d);
            const double bound = std::pow(1.0 + d / r, 100.0);
            C = std::max(C, (w[a] / w[b]) / bound);
        }
    }
    rep.essconst_C = C;
    if (C > max_essconst)
        throw precondition_error("bernstein_check: weight is not essentially constant at scale 1/|omega|");

    double winf = 0, w2 = 0;
    for (int k = 0; k < N; ++k) {
        const double m = w[k] * std::abs(f.v[k]);
        winf = std::max(winf, m);
        w2 += m * m;
    }
    w2 = std::sqrt(w2 * f.dx());
    rep.ratio = w2 > 0 ? winf / (std::sqrt(W) * w2) : 0.0;
    return rep;
}

} // namespace bht
