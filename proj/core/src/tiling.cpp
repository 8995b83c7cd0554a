#include "bht/tiling.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace bht {

namespace {

/// smallest grid endpoint lambda (l' + L/3) >= w_lo, as a value
Rational first_grid_point(const Rational& w_lo, const Rational& lambda, int L) {
    const Rational shift(L, 3);
    BigInt l = rational_floor(w_lo / lambda - shift);
    while (lambda * (Rational(l) + shift) < w_lo) ++l;
    return lambda * (Rational(l) + shift);
}

} // namespace

CubeFamily build_cube_family(const GridParams& params, int j_min, int j_max,
                             const RationalInterval& window) {
    params.validate();
    if (j_min > j_max) throw parameter_error("build_cube_family: empty scale range");
    CubeFamily fam;
    fam.params = params;

    const BigInt step = BigInt(1) << params.J; // positions l = 0 mod (2^J + 1)
    const BigInt stride = step + 1;

    for (int j = j_min; j <= j_max; ++j) {
        const int e = params.J * j;
        const Rational ell = pow2(e);
        bool any = false;

        BigInt l0 = rational_floor(window.lo / ell);
        // advance to the first admissible sparse index fully inside the window
        BigInt l = floor_div(l0, stride) * stride;
        while (Rational(l) * ell < window.lo) l += stride;
        for (; Rational(l + 1) * ell <= window.hi; l += stride) {
            ++fam.report.candidates;
            DyadicInterval omega = standard_interval(e, l);
            const Rational c = omega.center();

            // companion interval from the scaled shifted quasi-grid (all three
            // 1/3 shifts): length lambda, left endpoint within the containment
            // window for enlarge_lo w <= wbar <= enlarge_hi w
            const Rational lambda = (params.enlarge_lo + params.enlarge_hi) / 2 * ell;
            const Rational w_lo = c - params.enlarge_hi / 2 * ell;
            const Rational w_hi = c - params.enlarge_lo / 2 * ell;
            std::optional<Rational> eo;
            for (int L = 0; L < 3 && !eo; ++L) {
                Rational cand = first_grid_point(w_lo, lambda, L);
                if (cand <= w_hi) eo = cand;
            }
            if (!eo) {
                ++fam.report.skipped_no_companion;
                continue;
            }
            RationalInterval omega_bar(*eo, *eo + lambda);

            DyadicInterval omega3 = standard_interval_containing(e, -2 * c);
            RationalInterval img(-2 * omega_bar.hi, -2 * omega_bar.lo);
            if (!dilate(omega3, params.C0).contains(img)) {
                ++fam.report.skipped_offset;
                continue;
            }

            fam.cubes.push_back(FrequencyCube{omega, omega3, omega_bar, j});
            any = true;
        }
        if (!any) fam.report.empty_scales.push_back(j);
    }
    validate_cube_family(fam);
    return fam;
}

void validate_cube_family(const CubeFamily& fam) {
    const auto& P = fam.params;
    std::map<std::pair<int, std::string>, int> seen_omega, seen_omega3;
    for (std::size_t idx = 0; idx < fam.cubes.size(); ++idx) {
        const auto& Q = fam.cubes[idx];
        const Rational ell = pow2(P.J * Q.j);
        if (Q.omega.length() != ell || Q.omega3.length() != ell)
            throw parameter_error("cube family: component length is not 2^{Jj}");
        if (!Q.omega_bar.contains(dilate(Q.omega.interval(), P.enlarge_lo)))
            throw parameter_error("cube family: companion does not contain the enlarged omega");
        if (!dilate(Q.omega.interval(), P.enlarge_hi).contains(Q.omega_bar))
            throw parameter_error("cube family: companion exceeds the outer dilate");
        RationalInterval img(-2 * Q.omega_bar.hi, -2 * Q.omega_bar.lo);
        if (!dilate(Q.omega3.interval(), P.C0).contains(img))
            throw parameter_error("cube family: -2 omega_bar escapes C0 omega3");

        auto key = std::make_pair(Q.j, to_string(Q.omega.lo()));
        if (seen_omega.count(key)) throw parameter_error("cube family: omega repeated");
        seen_omega[key] = int(idx);
        auto key3 = std::make_pair(Q.j, to_string(Q.omega3.lo()));
        if (seen_omega3.count(key3)) throw parameter_error("cube family: omega3 repeated");
        seen_omega3[key3] = int(idx);
    }
    // pairwise separation per scale, both components
    for (std::size_t a = 0; a < fam.cubes.size(); ++a)
        for (std::size_t b = a + 1; b < fam.cubes.size(); ++b) {
            const auto& QA = fam.cubes[a];
            const auto& QB = fam.cubes[b];
            if (QA.j != QB.j) continue;
            if (!separation_ok(QA.omega, QB.omega, P.J) ||
                !separation_ok(QA.omega3, QB.omega3, P.J))
                throw parameter_error("cube family: same-scale separation violated");
        }
}

TileSet tiles_for_region(const CubeFamily& family, const RationalRect& region) {
    TileSet out;
    out.family = family;
    for (std::size_t ci = 0; ci < family.cubes.size(); ++ci) {
        const int j = family.cubes[ci].j;
        for (auto& sq : squares_in_rect(-family.params.J * j, region))
            out.tiles.push_back(MultiTile{sq, int(ci), j});
    }
    return out;
}

std::vector<PsiConeMultiTile> psi_cone_tiles(const GridParams& params, int j_min, int j_max,
                                             const RationalInterval& window,
                                             const RationalInterval& spatial) {
    params.validate();
    std::vector<PsiConeMultiTile> out;
    const BigInt stride = (BigInt(1) << params.J) + 1;
    for (int j = j_min; j <= j_max; ++j) {
        const int e = params.J * j;
        const Rational ell = pow2(e);

        std::vector<std::array<DyadicInterval, 3>> triples;
        BigInt l = floor_div(rational_floor(window.lo / ell), stride) * stride;
        while (Rational(l) * ell < window.lo) l += stride;
        for (; Rational(l + 1) * ell <= window.hi; l += stride) {
            DyadicInterval o1 = standard_interval(e, l);
            DyadicInterval o2 = standard_interval(e, l + 6);
            DyadicInterval o3 =
                standard_interval_containing(e, -2 * o1.center() - 6 * ell);
            triples.push_back({o1, o2, o3});
        }

        // spatial intervals of the dual scale inside the region
        std::vector<DyadicInterval> Is;
        const Rational side = pow2(-e);
        BigInt li = rational_floor(spatial.lo / side);
        if (Rational(li) * side < spatial.lo) ++li;
        for (; Rational(li + 1) * side <= spatial.hi; ++li) Is.push_back(standard_interval(-e, li));

        for (const auto& tr : triples)
            for (const auto& I : Is) {
                PsiConeMultiTile t{I, tr[0], tr[1], tr[2]};
                validate_psi_cone_tile(t, params);
                out.push_back(std::move(t));
            }
    }
    return out;
}

void validate_psi_cone_tile(const PsiConeMultiTile& t, const GridParams& params) {
    if (t.omega1.length() != t.omega2.length() || t.omega1.length() != t.omega3.length())
        throw parameter_error("psi tile: unequal frequency lengths");
    if (t.I.length() * t.omega1.length() != 1)
        throw parameter_error("psi tile: |I| |omega| != 1");
    auto twice = [](const DyadicInterval& o) { return dilate(o, Rational(2)); };
    auto big = [&](const DyadicInterval& o) { return dilate(o, params.C0); };
    auto neg_half = [](const RationalInterval& S) {
        return RationalInterval(-S.hi / 2, -S.lo / 2);
    };
    auto neg_double = [](const RationalInterval& S) {
        return RationalInterval(-2 * S.hi, -2 * S.lo);
    };
    auto check = [](bool ok, const char* msg) {
        if (!ok) throw parameter_error(std::string("psi tile: ") + msg);
    };
    const auto S1 = twice(t.omega1), S2 = twice(t.omega2), S3 = twice(t.omega3);
    // xi in 2w1 => xi in C0 w2 \ 2w2 and -2 xi in C0 w3 \ 2w3
    check(!S1.intersects(S2) && big(t.omega2).contains(S1), "rule i=1 vs omega2");
    check(!neg_double(S1).intersects(S3) && big(t.omega3).contains(neg_double(S1)),
          "rule i=1 vs omega3");
    // xi in 2w2
    check(!S2.intersects(S1) && big(t.omega1).contains(S2), "rule i=2 vs omega1");
    check(!neg_double(S2).intersects(S3) && big(t.omega3).contains(neg_double(S2)),
          "rule i=2 vs omega3");
    // -2 xi in 2w3
    const auto T3 = neg_half(S3);
    check(!T3.intersects(S1) && big(t.omega1).contains(T3), "rule i=3 vs omega1");
    check(!T3.intersects(S2) && big(t.omega2).contains(T3), "rule i=3 vs omega2");
}

namespace {

double prototype_l2() {
    // continuum L2 norm of the plateau prototype, from its Fourier profile
    static const double val = [] {
        double acc = 0;
        const int M = 4096;
        for (int i = 0; i < M; ++i) {
            const double u = -0.5 + (i + 0.5) / M;
            const double b = plateau_bump(u);
            acc += b * b / M;
        }
        return std::sqrt(acc);
    }();
    return val;
}

} // namespace

Field1D wave_packet(const PsiConeMultiTile& t, int i, int n, double L) {
    const DyadicInterval& om = i == 1 ? t.omega1 : (i == 2 ? t.omega2 : t.omega3);
    const int N = 1 << n;
    const double lenI = to_double(t.I.length());
    const double c_om = to_double(om.center());
    const double c_I = to_double(t.I.center());
    const double half_band = 1.0 / (2.0 * lenI);
    if (std::abs(c_om) + half_band >= N / 2.0 / L)
        throw parameter_error("wave_packet: prototype frequency support exceeds the lattice");

    std::vector<cplx> spec(N, 0.0);
    for (int s = -N / 2; s < N / 2; ++s) {
        const double u = lenI * (s / L - c_om);
        const double shape = plateau_bump(u);
        if (shape == 0) continue;
        spec[freq_bin(s, N)] =
            std::sqrt(lenI) * shape * std::polar(1.0, 2 * M_PI * (c_om - s / L) * c_I);
    }
    Field1D f = field_from_spectrum(std::move(spec), L);
    const double nrm = lp_norm(f, 2.0);
    if (nrm > 0) {
        const double target = prototype_l2();
        for (auto& z : f.v) z *= target / nrm;
    }
    return f;
}

int vertical_dictionary_size() { return 4; }

Field1D vertical_packet(const DyadicInterval& Jint, int n, double L, int dict_entry) {
    const int N = 1 << n;
    const double lenJ = to_double(Jint.length());
    const double c_J = to_double(Jint.center());
    auto shape = [dict_entry](double u) -> double {
        switch (dict_entry) {
            case 0: return plateau_bump(u);
            case 1: return plateau_bump(2 * (u - 0.25));
            case 2: return plateau_bump(2 * (u + 0.25));
            default: return plateau_bump(u) * std::sin(2 * M_PI * u);
        }
    };
    std::vector<cplx> spec(N, 0.0);
    for (int s = -N / 2; s < N / 2; ++s) {
        const double v = shape(lenJ * s / L);
        if (v == 0) continue;
        spec[freq_bin(s, N)] = std::sqrt(lenJ) * v * std::polar(1.0, -2 * M_PI * (s / L) * c_J);
    }
    return field_from_spectrum(std::move(spec), L);
}

WavePacketCoeffs extract_coeffs(const Field2D& F1, const Field2D& F2, const Field2D& F3,
                                const std::vector<PsiConeMultiTile>& tiles,
                                const std::vector<HyperMultiTile>& hyper) {
    WavePacketCoeffs out;
    out.grid_n = F1.n;
    const int N = F1.N();
    const std::size_t T = tiles.size();
    for (auto& v : out.a) v.assign(T * N, 0.0);
    out.b.assign(hyper.size(), 0.0);

    const double h = F1.dx();

    for (std::size_t ti = 0; ti < T; ++ti) {
        const auto& t = tiles[ti];
        Field1D p1 = wave_packet(t, 1, F1.n, F1.L);
        Field1D p2 = wave_packet(t, 2, F1.n, F1.L);
        Field1D p3 = wave_packet(t, 3, F1.n, F1.L);

        // fiberwise pairings
        std::vector<cplx> g3(N, 0.0);
        for (int iy = 0; iy < N; ++iy) {
            cplx s1 = 0, s2 = 0, s3 = 0;
            for (int ix = 0; ix < N; ++ix) {
                s1 += F1.at(ix, iy) * std::conj(p1.v[ix]);
                s2 += F2.at(ix, iy) * std::conj(p2.v[ix]);
                s3 += F3.at(ix, iy) * std::conj(p3.v[ix]);
            }
            out.a[0][ti * N + iy] = std::abs(s1 * h);
            out.a[1][ti * N + iy] = std::abs(s2 * h);
            g3[iy] = s3 * h;
        }

        // vertical pairings over the dyadic rows of length |I|
        const Rational side = t.I.length();
        const double lenI = to_double(side);
        const int rows = std::max(1, int(std::lround(F1.L / lenI)));
        const int per_row = N / rows;
        for (int r = 0; r < rows; ++r) {
            DyadicInterval Jr = standard_interval(t.I.scale_exp, r);
            double best = 0;
            for (int d = 0; d < vertical_dictionary_size(); ++d) {
                Field1D psi = vertical_packet(Jr, F1.n, F1.L, d);
                cplx acc = 0;
                for (int iy = 0; iy < N; ++iy) acc += g3[iy] * std::conj(psi.v[iy]);
                best = std::max(best, std::abs(acc * h));
            }
            const double a3 = best / std::sqrt(lenI);
            for (int iy = r * per_row; iy < (r + 1) * per_row; ++iy)
                out.a[2][ti * N + iy] = a3;
        }
    }

    for (std::size_t hi = 0; hi < hyper.size(); ++hi) {
        const auto& H = hyper[hi];
        const auto& t = tiles[H.tile];
        Field1D p3 = wave_packet(t, 3, F1.n, F1.L);
        std::vector<cplx> g3(N, 0.0);
        for (int iy = 0; iy < N; ++iy) {
            cplx s3 = 0;
            for (int ix = 0; ix < N; ++ix) s3 += F3.at(ix, iy) * std::conj(p3.v[ix]);
            g3[iy] = s3 * h;
        }
        double best = 0;
        for (int d = 0; d < vertical_dictionary_size(); ++d) {
            Field1D psi = vertical_packet(H.Jint, F1.n, F1.L, d);
            cplx acc = 0;
            for (int iy = 0; iy < N; ++iy) acc += g3[iy] * std::conj(psi.v[iy]);
            best = std::max(best, std::abs(acc * h));
        }
        out.b[hi] = best;
    }
    return out;
}

} // namespace bht
