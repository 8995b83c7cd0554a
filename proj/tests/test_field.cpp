#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bht/cutoff.hpp"
#include "bht/field.hpp"
#include "bht/multiplier.hpp"
#include "bht/random.hpp"

using namespace bht;

namespace {
Field2D harmonic2d(int n, int kx, int ky) {
    Field2D F(n);
    const int N = F.N();
    for (int iy = 0; iy < N; ++iy)
        for (int ix = 0; ix < N; ++ix)
            F.at(ix, iy) = std::polar(1.0, 2 * M_PI * (kx * F.x(ix) + ky * F.y(iy)));
    return F;
}

double field_dist(const Field2D& a, const Field2D& b) { return lp_norm(a - b, INFINITY); }
} // namespace

TEST_CASE("fft round trip") {
    Rng rng(7);
    Field2D F = random_bandlimited2d(6, 1.0, 20, rng);
    auto s = spectrum2d(F);
    Field2D G = field2d_from_spectrum(std::move(s), 1.0);
    CHECK(field_dist(F, G) / lp_norm(F, INFINITY) < 1e-12);
}

TEST_CASE("identity multiplier leaves fields unchanged") {
    Rng rng(3);
    Field2D F = random_bandlimited2d(5, 1.0, 10, rng);
    Multiplier1D one;
    one.n = 5;
    one.L = 1.0;
    one.sym.assign(32, 1.0);
    one.support = RationalInterval(-16, 16);
    CHECK(field_dist(apply_multiplier_x(F, one), F) < 1e-12);

    Multiplier2D one2 = tensor_multiplier(one, one);
    CHECK(field_dist(apply_multiplier_2d(F, one2), F) < 1e-12);
}

TEST_CASE("multiplier annihilates a harmonic outside its support") {
    Field2D F = harmonic2d(5, 9, 0);
    auto m = adapted_bump(5, 1.0, RationalInterval(1, 5));
    CHECK(lp_norm(apply_multiplier_x(F, m), INFINITY) < 1e-12);
}

TEST_CASE("indicator symbols are idempotent") {
    Rng rng(11);
    Field2D F = random_bandlimited2d(5, 1.0, 12, rng);
    auto m = sharp_projection(5, 1.0, RationalInterval(-3, 4));
    auto once = apply_multiplier_x(F, m);
    auto twice = apply_multiplier_x(once, m);
    CHECK(field_dist(once, twice) < 1e-12);
}

TEST_CASE("linearity and composition of multipliers") {
    Rng rng(5);
    Field2D F = random_bandlimited2d(5, 1.0, 12, rng);
    Field2D G = random_bandlimited2d(5, 1.0, 12, rng);
    auto m1 = adapted_bump(5, 1.0, RationalInterval(-6, 2));
    auto m2 = adapted_bump(5, 1.0, RationalInterval(-2, 6));

    cplx a(1.5, -0.25), b(-0.75, 2.0);
    auto lhs = apply_multiplier_x(a * F + b * G, m1);
    auto rhs = a * apply_multiplier_x(F, m1) + b * apply_multiplier_x(G, m1);
    CHECK(field_dist(lhs, rhs) / lp_norm(lhs, INFINITY) < 1e-12);

    auto comp = apply_multiplier_x(apply_multiplier_x(F, m1), m2);
    Multiplier1D prod = m1;
    for (std::size_t q = 0; q < prod.sym.size(); ++q) prod.sym[q] *= m2.sym[q];
    auto direct = apply_multiplier_x(F, prod);
    CHECK(field_dist(comp, direct) / std::max(1e-30, lp_norm(direct, INFINITY)) < 1e-10);
}

TEST_CASE("tensor 2d multiplier agrees with the x path") {
    Rng rng(13);
    Field2D F = random_bandlimited2d(6, 1.0, 20, rng);
    auto mx = adapted_bump(6, 1.0, RationalInterval(-10, -2));
    Multiplier1D oney;
    oney.n = 6;
    oney.L = 1.0;
    oney.sym.assign(64, 1.0);
    auto lhs = apply_multiplier_2d(F, tensor_multiplier(mx, oney));
    auto rhs = apply_multiplier_x(F, mx);
    CHECK(field_dist(lhs, rhs) / std::max(1e-30, lp_norm(rhs, INFINITY)) < 1e-12);
}

TEST_CASE("disjointly supported multipliers annihilate") {
    Rng rng(17);
    Field2D F = random_bandlimited2d(6, 1.0, 20, rng);
    auto m1 = adapted_bump(6, 1.0, RationalInterval(2, 10));
    auto m2 = adapted_bump(6, 1.0, RationalInterval(-10, -2));
    auto out = apply_multiplier_x(apply_multiplier_x(F, m1), m2);
    CHECK(lp_norm(out, INFINITY) <= 1e-12 * lp_norm(F, INFINITY));
}

TEST_CASE("fiber independence of x multipliers") {
    Rng rng(23);
    Field2D F = random_bandlimited2d(5, 1.0, 12, rng);
    auto m = adapted_bump(5, 1.0, RationalInterval(-6, 6));
    auto full = apply_multiplier_x(F, m);
    for (int iy = 0; iy < F.N(); iy += 7) {
        auto row = apply_multiplier(fiber(F, iy), m);
        auto ref = fiber(full, iy);
        double d = 0;
        for (int k = 0; k < row.N(); ++k) d = std::max(d, std::abs(row.v[k] - ref.v[k]));
        CHECK(d < 1e-12);
    }
}

TEST_CASE("lp norms") {
    Field2D C(5);
    for (auto& z : C.v) z = cplx(0, -2.5);
    CHECK(lp_norm(C, 3.0) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(lp_norm(C, INFINITY) == doctest::Approx(2.5).epsilon(1e-12));

    // indicator of half the torus, p = 2
    Field2D H(5);
    for (int iy = 0; iy < 32; ++iy)
        for (int ix = 0; ix < 16; ++ix) H.at(ix, iy) = 1.0;
    CHECK(lp_norm(H, 2.0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));

    CHECK_THROWS_AS(lp_norm(H, 0.5), parameter_error);

    // Parseval
    Rng rng(29);
    Field2D F = random_bandlimited2d(6, 1.0, 20, rng);
    auto s = spectrum2d(F);
    double par = 0;
    for (auto& z : s) par += std::norm(z);
    const double N2 = double(F.N()) * F.N();
    par = par / (N2 * N2); // sum |coeff|^2 with coeff = raw/N^2; cell area folds to 1
    const double l2 = lp_norm(F, 2.0);
    CHECK(std::abs(par - l2 * l2) / (l2 * l2) < 1e-10);
}

TEST_CASE("adapted bumps certify with modest constants") {
    auto m = adapted_bump(8, 1.0, RationalInterval(-32, 32), 2);
    CHECK(m.constant <= 64.0);
    CHECK(m.constant > 0.0);
    for (int q = 0; q < m.N(); ++q) {
        int s = signed_freq(q, m.N());
        if (s < -32 || s > 32) CHECK(m.sym[q] == 0.0);
    }
}

TEST_CASE("littlewood-paley telescoping and band structure") {
    Rng rng(31);
    Field2D F = random_bandlimited2d(7, 1.0, 50, rng);
    // sum_{j0+1}^{j1} S_j + T_{j0} = T_{j1}
    Field2D acc = apply_multiplier_x(F, lowpass_T(7, 1.0, 1));
    for (int e = 2; e <= 5; ++e) acc = acc + apply_multiplier_x(F, band_S(7, 1.0, e));
    auto top = apply_multiplier_x(F, lowpass_T(7, 1.0, 5));
    CHECK(field_dist(acc, top) / lp_norm(top, INFINITY) < 1e-12);

    // harmonic inside the flat region passes through T_j
    Field2D h = harmonic2d(7, 3, 5);
    auto th = apply_multiplier_x(h, lowpass_T(7, 1.0, 1)); // flat up to 4
    CHECK(field_dist(th, h) < 1e-12);

    // square-function energy within [1/3, 3] of the input energy
    double sum = 0;
    for (int e = 0; e <= 6; ++e) {
        double ns = lp_norm(apply_multiplier_x(F, band_S(7, 1.0, e)), 2.0);
        sum += ns * ns;
    }
    double total = lp_norm(F, 2.0);
    total *= total;
    CHECK(sum > total / 3.0);
    CHECK(sum < total * 3.0);
}

TEST_CASE("smooth cutoff: mass, additivity, constant set") {
    const int n = 7, J = 1;
    // whole torus
    SmoothCutoff2D full = smooth_cutoff(n, 1.0, std::vector<RationalRect>{
        {RationalInterval(0, 1), RationalInterval(0, 1)}}, 2, J);
    for (const auto& z : full.field.v) CHECK(std::abs(z - 1.0) < 1e-12);

    // disjoint additivity
    RationalRect E1{RationalInterval(0, Rational(1, 4)), RationalInterval(0, Rational(1, 4))};
    RationalRect E2{RationalInterval(Rational(1, 2), Rational(3, 4)),
                    RationalInterval(Rational(1, 2), Rational(3, 4))};
    auto cU = smooth_cutoff(n, 1.0, std::vector<RationalRect>{E1, E2}, 2, J);
    auto c1 = smooth_cutoff(n, 1.0, std::vector<RationalRect>{E1}, 2, J);
    auto c2 = smooth_cutoff(n, 1.0, std::vector<RationalRect>{E2}, 2, J);
    CHECK(field_dist(cU.field, c1.field + c2.field) < 1e-12);

    // mass preservation (exact mean preservation)
    auto mass = integral(cU.field);
    CHECK(std::abs(mass.real() - to_double(cU.measure)) < 1e-10);
    CHECK(std::abs(mass.imag()) < 1e-14);

    CHECK_THROWS_AS(smooth_cutoff(n, 1.0, std::vector<RationalRect>{E1}, 9, J), scale_range_error);
}

TEST_CASE("smooth cutoff mass preserved over random unions") {
    Rng rng(41);
    const int n = 6, J = 1;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<RationalRect> cells;
        int parts = 1 + int(rng() % 4);
        for (int p = 0; p < parts; ++p) {
            int scale = 2 + int(rng() % 3);
            Rational side = pow2(-scale);
            Rational x0 = Rational(int(rng() % (1 << scale))) * side;
            Rational y0 = Rational(int(rng() % (1 << scale))) * side;
            cells.push_back({RationalInterval(x0, x0 + side), RationalInterval(y0, y0 + side)});
        }
        int j = 1 + int(rng() % 3);
        auto c = smooth_cutoff(n, 1.0, cells, j, J);
        // measure of the sampled union (cells may overlap; compare against the
        // sampled indicator mass, which the convolution preserves exactly)
        auto ind = indicator2d(n, 1.0, cells);
        double indmass = integral(ind).real();
        CHECK(std::abs(integral(c.field).real() - indmass) < 1e-10);
    }
}

TEST_CASE("smooth cutoff boundary decay exponent is at least 20") {
    // The mollifier transition spans ~2^{2J} cells, so the decaying flank is
    // only resolved once the scale leaves that many octaves below the torus;
    // this configuration exposes it and measures q = 20.9.
    const int n = 11, J = 2, j = 5;
    std::vector<RationalInterval> E{RationalInterval(Rational(1, 4), Rational(1, 2))};
    auto c = smooth_cutoff(n, 1.0, E, j, J);
    auto ind = indicator1d(n, 1.0, E);
    const int N = 1 << n;
    const double scale = std::ldexp(1.0, j * J);
    // fit log|diff| against log(1 + 2^{jJ} d) on the decaying flank,
    // above the double-precision noise floor
    std::vector<double> xs, ys;
    for (int k = 0; k < N; ++k) {
        double x = double(k) / N;
        if (x > 0.26 && x < 0.49) continue; // interior of E
        double d = std::min(std::abs(x - 0.25), std::abs(x - 0.5));
        if (d > 0.2) continue; // keep clear of the torus wrap midpoint
        double u = scale * d;
        double diff = std::abs(c.field.v[k] - ind.v[k]);
        if (u >= 1.0 && diff > 1e-11 && diff < 1e-2) {
            xs.push_back(std::log1p(u));
            ys.push_back(std::log(diff));
        }
    }
    REQUIRE(xs.size() >= 4);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sx += xs[k];
        sy += ys[k];
        sxx += xs[k] * xs[k];
        sxy += xs[k] * ys[k];
    }
    const double m = xs.size();
    double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    CHECK(-slope >= 20.0);
}

TEST_CASE("bernstein check") {
    // pure harmonic with unit weight: ratio = 2^{-jJ/2} with W = |omega|
    const int n = 8, N = 1 << n;
    Field1D f(n);
    for (int k = 0; k < N; ++k) f.v[k] = std::polar(1.0, 2 * M_PI * 5 * f.x(k));
    std::vector<double> w(N, 1.0);
    auto rep = bernstein_check(f, RationalInterval(4, 8), w);
    CHECK(rep.ratio == doctest::Approx(1.0 / 2.0).epsilon(1e-10)); // W = 4
    CHECK(rep.essconst_C <= 1.0 + 1e-12);

    // violating band-limitation
    Field1D g = f;
    g.v[0] += 1.0;
    CHECK_THROWS_AS(bernstein_check(g, RationalInterval(4, 8), w), precondition_error);

    // weight that is not essentially constant at the band scale
    std::vector<double> bad(N, 1.0);
    for (int k = 0; k < N; ++k) bad[k] = (k % 2) ? 1.0 : 1e9;
    CHECK_THROWS_AS(bernstein_check(f, RationalInterval(4, 8), bad), precondition_error);
}

TEST_CASE("bernstein sweep over random band-limited data stays bounded") {
    Rng rng(57);
    const int n = 8;
    RationalInterval omega(8, 16);
    auto w = powered(chi_tilde_interval(n, 1.0, RationalInterval(Rational(1, 4), Rational(1, 2))), 10);
    double worst = 0;
    for (int t = 0; t < 100; ++t) {
        std::vector<cplx> spec(1 << n, 0.0);
        std::normal_distribution<double> g(0, 1);
        for (int s = 8; s <= 16; ++s) spec[freq_bin(s, 1 << n)] = cplx(g(rng), g(rng));
        Field1D f = field_from_spectrum(std::move(spec), 1.0);
        worst = std::max(worst, bernstein_check(f, omega, w).ratio);
    }
    // frozen from the first calibration run of the implemented eta and bumps
    // (measured max 2.38 over this seeded family)
    CHECK(worst <= 3.0);
}

TEST_CASE("exact lattice symmetries") {
    Rng rng(61);
    Field2D F = random_bandlimited2d(5, 1.0, 7, rng);
    auto G = translate_eval(F, 3.0 / 32.0, 5.0 / 32.0);
    // translation by lattice vectors is an exact sample permutation
    double d = 0;
    for (int iy = 0; iy < 32; ++iy)
        for (int ix = 0; ix < 32; ++ix)
            d = std::max(d, std::abs(G.at(ix, iy) - F.at((ix + 3) % 32, (iy + 5) % 32)));
    CHECK(d < 1e-11);

    auto M = compose_unimodular(F, 1, 1, 0, 1);
    CHECK(std::abs(lp_norm(M, 2.0) - lp_norm(F, 2.0)) < 1e-12);
}
