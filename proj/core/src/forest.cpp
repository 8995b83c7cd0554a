#include "bht/forest.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace bht {

namespace {

std::string rkey(const Rational& r) { return to_string(r); }

std::string top_key(const DyadicSquare& R) {
    return rkey(R.x.lo()) + "," + rkey(R.y.lo()) + "," + std::to_string(R.x.scale_exp);
}

double ipow(double x, int p) {
    double out = 1;
    for (int k = 0; k < p; ++k) out *= x;
    return out;
}

/// torus membership of a grid point in the f-dilate of a square (sup norm)
inline bool in_dilate(double x, double y, double cx, double cy, double half, double L) {
    double dx = std::abs(x - cx);
    dx = std::min(dx, L - dx);
    if (dx > half) return false;
    double dy = std::abs(y - cy);
    dy = std::min(dy, L - dy);
    return dy <= half;
}

} // namespace

Rational bar_half_length(const GridParams& p, int j) {
    return p.enlarge_lo / 6 * pow2(p.J * j);
}

RationalInterval top_window(const GridParams& p, const Rational& xi, int j) {
    const Rational h = bar_half_length(p, j);
    return RationalInterval(xi - h, xi + h);
}

RationalInterval core_window(const GridParams& p, const Rational& xi, int j) {
    const Rational h = pow2(p.J * j) / 2;
    return RationalInterval(xi - h, xi + h);
}

int square_scale_step(const GridParams& p, const DyadicSquare& R) {
    const int e = -R.x.scale_exp;
    if (e < 0 || e % p.J != 0)
        throw parameter_error("square_scale_step: square is not J-dyadic");
    return e / p.J;
}

Tree::Kind classify_tree(const TileSet& ts, const GridParams&,
                         const std::vector<int>& tiles, const Rational& xi) {
    bool all_in = true, all_out = true;
    for (int t : tiles) {
        const bool in = dilate(ts.cube_of(ts.tiles[t]).omega, Rational(2)).contains(xi);
        all_in &= in;
        all_out &= !in;
    }
    if (all_in && !tiles.empty()) return Tree::Kind::overlapping;
    if (all_out) return Tree::Kind::lacunary;
    return Tree::Kind::mixed;
}

std::vector<int> maximal_tree_tiles(const TileSet& ts, const GridParams& p,
                                    const std::vector<int>& pool, const Rational& xi,
                                    const DyadicSquare& top) {
    const int j_top = square_scale_step(p, top);
    const RationalInterval win = top_window(p, xi, j_top);
    std::vector<int> out;
    const RationalRect toprect = rect_of(top);
    for (int t : pool) {
        const auto& tile = ts.tiles[t];
        if (!toprect.contains(rect_of(tile.square))) continue;
        if (!ts.cube_of(tile).omega_bar.contains(win)) continue;
        out.push_back(t);
    }
    return out;
}

std::optional<Tree> maximal_tree(const TileSet& ts, const GridParams& p,
                                 const std::vector<int>& pool, const Rational& xi,
                                 const DyadicSquare& top) {
    auto tiles = maximal_tree_tiles(ts, p, pool, xi, top);
    if (tiles.empty()) return std::nullopt;
    Tree t;
    t.tiles = std::move(tiles);
    t.xi = xi;
    t.top = top;
    t.kind = classify_tree(ts, p, t.tiles, xi);
    return t;
}

std::pair<std::optional<Tree>, std::optional<Tree>> split_lac_over(const TileSet& ts,
                                                                   const GridParams&,
                                                                   const Tree& t) {
    Tree lac = t, over = t;
    lac.tiles.clear();
    over.tiles.clear();
    for (int idx : t.tiles) {
        if (dilate(ts.cube_of(ts.tiles[idx]).omega, Rational(2)).contains(t.xi))
            over.tiles.push_back(idx);
        else
            lac.tiles.push_back(idx);
    }
    lac.kind = Tree::Kind::lacunary;
    over.kind = Tree::Kind::overlapping;
    std::pair<std::optional<Tree>, std::optional<Tree>> out;
    if (!lac.tiles.empty()) out.first = std::move(lac);
    if (!over.tiles.empty()) out.second = std::move(over);
    return out;
}

bool strongly_disjoint(const TileSet& ts, const Tree& a, const Tree& b) {
    if (a.kind != Tree::Kind::lacunary || b.kind != Tree::Kind::lacunary)
        throw precondition_error("strongly_disjoint: both trees must be lacunary");
    std::set<int> as(a.tiles.begin(), a.tiles.end());
    for (int t : b.tiles)
        if (as.count(t)) return false;
    auto check = [&](const Tree& t1, const Tree& t2) {
        const RationalRect top1 = rect_of(t1.top);
        for (int pa : t1.tiles) {
            const auto oa = ts.cube_of(ts.tiles[pa]).omega.interval();
            for (int pb : t2.tiles) {
                const auto ob = ts.cube_of(ts.tiles[pb]).omega.interval();
                const bool proper = ob.contains(oa) && !(oa == ob);
                if (!proper) continue;
                if (top1.intersects(rect_of(ts.tiles[pb].square))) return false;
            }
        }
        return true;
    };
    return check(a, b) && check(b, a);
}

// --- SizeEngine --------------------------------------------------------------

SizeEngine::SizeEngine(const TileSet& ts, const GridParams& p, int grid_n, double L,
                       const Field2D* F1, const Field2D* F2, const Field2D* F3)
    : tiles_(ts), params_(p), n_(grid_n), L_(L), F_{F1, F2, F3} {}

namespace {

/// Four-entry adapted dictionary on an interval.
Multiplier1D dict_multiplier(int n, double L, const RationalInterval& omega, int entry) {
    switch (entry) {
        case 0: return adapted_bump(n, L, omega);
        case 1: return adapted_bump(n, L, RationalInterval(omega.lo, omega.center()));
        case 2: return adapted_bump(n, L, RationalInterval(omega.center(), omega.hi));
        default: return vanishing_bump(n, L, omega, omega.center());
    }
}

std::vector<double> density_of(const Field2D& G) {
    std::vector<double> d(G.v.size());
    for (std::size_t k = 0; k < d.size(); ++k) d[k] = std::norm(G.v[k]);
    return d;
}

} // namespace

const std::vector<double>& SizeEngine::projected_density(int i, int cube, int entry) {
    auto key = std::make_tuple(i, cube, entry);
    auto it = proj_cache_.find(key);
    if (it != proj_cache_.end()) return it->second;
    const auto& Q = tiles_.family.cubes[cube];
    Field2D G;
    if (i <= 2) {
        auto m = dict_multiplier(n_, L_, Q.omega.interval(), entry);
        G = apply_multiplier_x(*F_[i - 1], m);
    } else {
        auto mx = dict_multiplier(n_, L_, Q.omega3.interval(), entry);
        const Rational len = Q.omega3.length();
        auto my = adapted_bump(n_, L_, RationalInterval(len, 2 * len));
        G = apply_multiplier_2d(*F_[2], tensor_multiplier(mx, my));
    }
    return proj_cache_.emplace(key, density_of(G)).first->second;
}

double SizeEngine::weighted_l2sq(const std::vector<double>& density, const DyadicSquare& R,
                                 int n) {
    const int N = 1 << n_;
    const double cell = (L_ / N) * (L_ / N);
    const double cx = to_double(R.x.center()), cy = to_double(R.y.center());
    const double side = to_double(R.side());
    const double lenx = side, leny = side;
    double acc = 0;
    for (int iy = 0; iy < N; ++iy) {
        const double y = iy * (L_ / N);
        double dy = std::abs(y - cy);
        dy = std::min(dy, L_ - dy);
        const double wy = 1.0 / (1.0 + dy / leny);
        for (int ix = 0; ix < N; ++ix) {
            const double x = ix * (L_ / N);
            double dxv = std::abs(x - cx);
            dxv = std::min(dxv, L_ - dxv);
            if (n >= 0) {
                const double half_out = std::ldexp(side / 2, n + 1);
                const bool in_out = std::max(dxv, dy) <= half_out;
                if (!in_out) continue;
                if (n >= 1) {
                    const double half_in = std::ldexp(side / 2, n);
                    if (std::max(dxv, dy) <= half_in) continue;
                }
            }
            const double w = wy / (1.0 + dxv / lenx);
            acc += density[std::size_t(iy) * N + ix] * ipow(w, 20);
        }
    }
    return acc * cell;
}

double SizeEngine::tile_weight(int i, int tile, int n) {
    auto key = std::make_tuple(i, tile, n);
    auto it = weight_cache_.find(key);
    if (it != weight_cache_.end()) return it->second;
    const auto& T = tiles_.tiles[tile];
    double best = 0;
    for (int e = 0; e < 4; ++e)
        best = std::max(best, weighted_l2sq(projected_density(i, T.cube, e), T.square, n));
    weight_cache_.emplace(key, best);
    return best;
}

double SizeEngine::lacunary_size(int i, const std::vector<int>& tl, const DyadicSquare& top) {
    double acc = 0;
    for (int t : tl) acc += tile_weight(i, t, -1);
    const double area = to_double(top.area());
    return std::sqrt(acc / area);
}

Rational SizeEngine::vanishing_point(const Rational& xi, int j_top, int v_idx) const {
    const Rational ell = pow2(params_.J * j_top);
    const int half = (std::max(1, params_.J) * 0 + 1); // lattice spans +-3 ell around xi
    (void)half;
    const int m = v_idx - 1; // default three-point lattice {-3,0,3} ell
    return xi + Rational(3 * m) * ell;
}

namespace {

/// symbol samples of a bump adapted to `piece` and supported in `window`.
void add_piece_bump(std::vector<double>& sym, int n, double L, const RationalInterval& window,
                    const RationalInterval& piece, double scale) {
    const Rational lo = std::max(piece.lo, window.lo);
    const Rational hi = std::min(piece.hi, window.hi);
    if (lo >= hi) return;
    RationalInterval used(lo, hi);
    const int N = 1 << n;
    const double c = to_double(used.center());
    const double len = to_double(used.length());
    for (int q = 0; q < N; ++q) {
        const double f = signed_freq(q, N) / L;
        sym[q] += scale * cos_pow_bump((f - c) / len, 4);
    }
}

} // namespace

const std::vector<double>& SizeEngine::overlapping_density(int i, const Rational& xi,
                                                           int j_top, int s, int sign,
                                                           int v_idx) {
    std::ostringstream os;
    os << i << "|" << rkey(xi) << "|" << j_top << "|" << s << "|" << sign << "|" << v_idx;
    auto it = over_cache_.find(os.str());
    if (it != over_cache_.end()) return it->second;

    const Rational ell = pow2(params_.J * j_top);
    const Rational v = vanishing_point(xi, j_top, v_idx);
    const RationalInterval window(xi - 5 * ell, xi + 5 * ell); // 10 omega_T
    const Rational unit = 10 * ell;
    RationalInterval piece = sign > 0
        ? RationalInterval(v + unit * pow2(-s), v + unit * pow2(2 - s))
        : RationalInterval(v - unit * pow2(2 - s), v - unit * pow2(-s));

    Multiplier1D m;
    m.n = n_;
    m.L = L_;
    m.sym.assign(std::size_t(1) << n_, 0.0);
    add_piece_bump(m.sym, n_, L_, window, piece, 1.0);
    Field2D G = apply_multiplier_x(*F_[i - 1], m);
    return over_cache_.emplace(os.str(), density_of(G)).first->second;
}

const std::vector<double>& SizeEngine::overlapping_density_sum(int i, const Rational& xi,
                                                               int j_top, int v_idx) {
    std::ostringstream os;
    os << i << "|" << rkey(xi) << "|" << j_top << "|sum|" << v_idx;
    auto it = over_cache_.find(os.str());
    if (it != over_cache_.end()) return it->second;

    const Rational ell = pow2(params_.J * j_top);
    const Rational v = vanishing_point(xi, j_top, v_idx);
    const RationalInterval window(xi - 5 * ell, xi + 5 * ell);
    const Rational unit = 10 * ell;

    Multiplier1D m;
    m.n = n_;
    m.L = L_;
    m.sym.assign(std::size_t(1) << n_, 0.0);
    for (int s = 0; s <= 4; ++s) {
        const double w = std::ldexp(1.0, -s);
        add_piece_bump(m.sym, n_, L_, window,
                       RationalInterval(v + unit * pow2(-s), v + unit * pow2(2 - s)), w);
        add_piece_bump(m.sym, n_, L_, window,
                       RationalInterval(v - unit * pow2(2 - s), v - unit * pow2(-s)), w);
    }
    Field2D G = apply_multiplier_x(*F_[i - 1], m);
    return over_cache_.emplace(os.str(), density_of(G)).first->second;
}

double SizeEngine::overlapping_piece(int i, const Rational& xi, const DyadicSquare& top,
                                     int s, int sign, int v_idx, int n) {
    const int j_top = square_scale_step(params_, top);
    const auto& d = overlapping_density(i, xi, j_top, s, sign, v_idx);
    const double area = to_double(top.area());
    return std::sqrt(weighted_l2sq(d, top, n) / area);
}

double SizeEngine::overlapping_size(int i, const Rational& xi, const DyadicSquare& top,
                                    int* witness_v) {
    const int j_top = square_scale_step(params_, top);
    const double area = to_double(top.area());
    double best = 0;
    for (int v = 0; v < 3; ++v) {
        const auto& d = overlapping_density_sum(i, xi, j_top, v);
        const double val = std::sqrt(weighted_l2sq(d, top, -1) / area);
        if (val > best) {
            best = val;
            if (witness_v) *witness_v = v;
        }
    }
    return best;
}

double SizeEngine::size3(const std::vector<int>& tl, const DyadicSquare& top) {
    double acc = 0;
    for (int t : tl) acc += tile_weight(3, t, -1);
    return std::sqrt(acc / to_double(top.area()));
}

SizeReport SizeEngine::size_i(const Tree& t, int i) {
    SizeReport rep;
    rep.witness_xi = t.xi;
    rep.witness_top = t.top;
    if (t.kind == Tree::Kind::mixed)
        throw precondition_error("size_i: tree must be purely lacunary or overlapping");
    if (t.kind == Tree::Kind::lacunary) {
        rep.value = lacunary_size(i, t.tiles, t.top);
    } else {
        rep.overlapping = true;
        rep.value = overlapping_size(i, t.xi, t.top, &rep.dict_id);
    }
    return rep;
}

SizeReport SizeEngine::size_3(const Tree& t) {
    SizeReport rep;
    rep.witness_xi = t.xi;
    rep.witness_top = t.top;
    rep.value = size3(t.tiles, t.top);
    return rep;
}

std::vector<DyadicSquare> SizeEngine::candidate_tops(const std::vector<int>& pool) const {
    std::set<std::string> seen;
    std::vector<DyadicSquare> out;
    for (int t : pool) {
        const auto& sq = tiles_.tiles[t].square;
        int jp = square_scale_step(params_, sq);
        BigInt lx = sq.x.index, ly = sq.y.index;
        for (int j = jp; j >= 0; --j) {
            DyadicSquare anc(standard_interval(-params_.J * j, lx),
                             standard_interval(-params_.J * j, ly));
            auto key = top_key(anc);
            if (seen.insert(key).second) out.push_back(anc);
            lx = floor_div(lx, BigInt(1) << params_.J);
            ly = floor_div(ly, BigInt(1) << params_.J);
        }
    }
    return out;
}

std::vector<Rational> SizeEngine::xi_lattice(const std::vector<int>& pool,
                                             const std::vector<int>& top_scales) const {
    std::set<Rational> pts;
    for (int t : pool) {
        const auto& Q = tiles_.cube_of(tiles_.tiles[t]);
        const Rational c = Q.omega.center();
        const Rational l = Q.omega.length();
        pts.insert(c);
        pts.insert(c - l);
        pts.insert(c + l);
        pts.insert(c - 50 * l);
        pts.insert(c + 50 * l);
        for (int j : top_scales) {
            const Rational h = bar_half_length(params_, j);
            pts.insert(Q.omega_bar.lo + h);
            pts.insert(Q.omega_bar.hi - h);
        }
    }
    std::vector<Rational> sorted(pts.begin(), pts.end());
    std::vector<Rational> out;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        out.push_back(sorted[k]);
        if (k + 1 < sorted.size()) out.push_back((sorted[k] + sorted[k + 1]) / 2);
    }
    return out;
}

SizeReport SizeEngine::max_size(const std::vector<int>& pool, int i) {
    SizeReport best;
    if (pool.empty()) return best;
    auto tops = candidate_tops(pool);
    std::set<int> scaleset;
    for (const auto& R : tops) scaleset.insert(square_scale_step(params_, R));
    std::vector<int> scales(scaleset.begin(), scaleset.end());
    auto xis = xi_lattice(pool, scales);

    for (const auto& R : tops) {
        for (const auto& xi : xis) {
            auto members = maximal_tree_tiles(tiles_, params_, pool, xi, R);
            if (members.empty()) continue;
            if (i == 3) {
                const double v = size3(members, R);
                if (v > best.value) {
                    best.value = v;
                    best.witness_xi = xi;
                    best.witness_top = R;
                    best.overlapping = false;
                }
                continue;
            }
            std::vector<int> lac, over;
            for (int t : members) {
                if (dilate(tiles_.cube_of(tiles_.tiles[t]).omega, Rational(2)).contains(xi))
                    over.push_back(t);
                else
                    lac.push_back(t);
            }
            if (!lac.empty()) {
                const double v = lacunary_size(i, lac, R);
                if (v > best.value) {
                    best.value = v;
                    best.witness_xi = xi;
                    best.witness_top = R;
                    best.overlapping = false;
                }
            }
            if (!over.empty()) {
                int wv = -1;
                const double v = overlapping_size(i, xi, R, &wv);
                if (v > best.value) {
                    best.value = v;
                    best.witness_xi = xi;
                    best.witness_top = R;
                    best.overlapping = true;
                    best.dict_id = wv;
                }
            }
        }
    }
    return best;
}

// --- greedy selection ---------------------------------------------------------

namespace {

struct BadTree {
    Rational xi{0};
    DyadicSquare top;
    double value = 0;
    int v_idx = -1;
    Rational v{0};
    bool found = false;
};

/// canonical order key for tops: larger side first, then position
bool top_before(const DyadicSquare& a, const DyadicSquare& b) {
    if (a.side() != b.side()) return a.side() > b.side();
    if (a.x.lo() != b.x.lo()) return a.x.lo() < b.x.lo();
    return a.y.lo() < b.y.lo();
}

std::vector<DyadicSquare> companion_squares(const GridParams& p, const DyadicSquare& top,
                                            int n, double torus) {
    const int j = square_scale_step(p, top);
    const BigInt per_axis = BigInt(1) << (p.J * j); // squares across the torus
    (void)torus;
    const long count = 1L << (n + 3);
    std::vector<DyadicSquare> out;
    std::set<std::pair<std::string, std::string>> seen;
    const BigInt lx = top.x.index, ly = top.y.index;
    const long reach = count / 2;
    for (long dx = -reach; dx <= reach; ++dx) {
        for (long dy = -reach; dy <= reach; ++dy) {
            BigInt kx = lx + dx, ky = ly + dy;
            if (per_axis > 0) {
                kx = ((kx % per_axis) + per_axis) % per_axis;
                ky = ((ky % per_axis) + per_axis) % per_axis;
            }
            DyadicSquare sq(standard_interval(top.x.scale_exp, kx),
                            standard_interval(top.y.scale_exp, ky));
            auto key = std::make_pair(to_string(sq.x.lo()), to_string(sq.y.lo()));
            if (seen.insert(key).second) out.push_back(sq);
        }
    }
    std::sort(out.begin(), out.end(), top_before);
    return out;
}

} // namespace

SelectionResult greedy_select(SizeEngine& eng, const std::vector<int>& pool, int i,
                              const SelectionParams& params) {
    const TileSet& ts = eng.tiles();
    const GridParams& gp = eng.params();
    SelectionResult res;
    std::vector<int> remaining = pool;

    std::map<std::tuple<int, int, int>, BesselBucket> buckets;

    auto eliminate = [&](const Rational& xi, const DyadicSquare& bad_top, int pass, int n,
                         int s, double bad_value) {
        auto companions = (pass == 4)
                              ? std::vector<DyadicSquare>{bad_top}
                              : companion_squares(gp, bad_top, n, eng.field(1).L);
        int removed_total = 0;
        for (const auto& sq : companions) {
            auto members = maximal_tree_tiles(ts, gp, remaining, xi, sq);
            if (members.empty()) continue;
            Tree t;
            t.tiles = members;
            t.xi = xi;
            t.top = sq;
            t.kind = classify_tree(ts, gp, members, xi);
            res.selected.push_back(t);
            res.selected_top_area += to_double(sq.area());
            auto& bucket = buckets[{pass, n, s}];
            bucket.pass = pass;
            bucket.n = n;
            bucket.s = s;
            bucket.top_area += to_double(sq.area());
            bucket.trees += 1;
            std::set<int> kill(members.begin(), members.end());
            std::vector<int> next;
            next.reserve(remaining.size());
            for (int t2 : remaining)
                if (!kill.count(t2)) next.push_back(t2);
            removed_total += int(remaining.size() - next.size());
            remaining = std::move(next);
        }
        SelectionRecord rec;
        rec.pass = pass;
        rec.n = n;
        rec.s = s;
        rec.xi = xi;
        rec.top = bad_top;
        rec.bad_value = bad_value;
        rec.tiles_removed = removed_total;
        res.log.push_back(rec);
    };

    // ---- lacunary passes (i in {1,2}) ----
    auto scan_lacunary = [&](int n, bool upper) -> BadTree {
        BadTree best;
        const double thr = std::ldexp(params.lambda * params.lambda, -n - 10);
        auto tops = eng.candidate_tops(remaining);
        std::sort(tops.begin(), tops.end(), top_before);
        std::set<int> scaleset;
        for (const auto& R : tops) scaleset.insert(square_scale_step(gp, R));
        std::vector<int> scales(scaleset.begin(), scaleset.end());
        auto xis = eng.xi_lattice(remaining, scales);
        for (const auto& R : tops) {
            const double area = to_double(R.area());
            for (std::size_t xi_i = 0; xi_i < xis.size(); ++xi_i) {
                const Rational& xi = upper ? xis[xi_i] : xis[xis.size() - 1 - xi_i];
                if (best.found) {
                    if (upper && xi > best.xi) break;
                    if (!upper && xi < best.xi) break;
                }
                auto tree_tiles = maximal_tree_tiles(ts, gp, remaining, xi, R);
                double sum = 0;
                for (int t : tree_tiles) {
                    const auto& Q = ts.cube_of(ts.tiles[t]);
                    const Rational c = Q.omega.center();
                    if (upper ? !(c < xi) : !(c > xi)) continue;
                    if (dilate(Q.omega, Rational(2)).contains(xi)) continue;
                    sum += eng.tile_weight(i, t, n);
                }
                if (sum / area >= thr) {
                    const bool better =
                        !best.found || (upper ? xi < best.xi : xi > best.xi) ||
                        (xi == best.xi && top_before(R, best.top) && !(best.top == R));
                    if (better) {
                        best.found = true;
                        best.xi = xi;
                        best.top = R;
                        best.value = std::sqrt(sum / area);
                    }
                    break; // first qualifying xi for this top in scan order
                }
            }
        }
        return best;
    };

    // ---- overlapping passes (i in {1,2}) ----
    auto scan_overlapping = [&](int n, int s, int sign) -> BadTree {
        BadTree best;
        const double thr = std::ldexp(params.lambda, -n - 10);
        auto tops = eng.candidate_tops(remaining);
        std::sort(tops.begin(), tops.end(), top_before);
        std::set<int> scaleset;
        for (const auto& R : tops) scaleset.insert(square_scale_step(gp, R));
        std::vector<int> scales(scaleset.begin(), scaleset.end());
        auto xis = eng.xi_lattice(remaining, scales);
        for (const auto& R : tops) {
            for (const auto& xi : xis) {
                auto members = maximal_tree_tiles(ts, gp, remaining, xi, R);
                bool overlapping_nonempty = false;
                for (int t : members)
                    if (dilate(ts.cube_of(ts.tiles[t]).omega, Rational(2)).contains(xi)) {
                        overlapping_nonempty = true;
                        break;
                    }
                if (!overlapping_nonempty) continue;
                for (int vi = 0; vi < params.n_v; ++vi) {
                    const int v_idx = sign < 0 ? vi : params.n_v - 1 - vi;
                    const double val = eng.overlapping_piece(i, xi, R, s, sign, v_idx, n);
                    if (val < thr) continue;
                    const Rational v = eng.vanishing_point(xi, square_scale_step(gp, R), v_idx);
                    const bool better = !best.found || (sign < 0 ? v < best.v : v > best.v);
                    if (better) {
                        best.found = true;
                        best.xi = xi;
                        best.top = R;
                        best.value = val;
                        best.v_idx = v_idx;
                        best.v = v;
                    }
                    break;
                }
            }
        }
        return best;
    };

    // ---- third-index stripping ----
    auto scan_third = [&]() -> BadTree {
        BadTree best;
        const double thr2 = params.lambda * params.lambda;
        auto tops = eng.candidate_tops(remaining);
        std::sort(tops.begin(), tops.end(), top_before);
        std::set<int> scaleset;
        for (const auto& R : tops) scaleset.insert(square_scale_step(gp, R));
        std::vector<int> scales(scaleset.begin(), scaleset.end());
        auto xis = eng.xi_lattice(remaining, scales);
        for (const auto& R : tops) {
            const double area = to_double(R.area());
            for (const auto& xi : xis) {
                auto members = maximal_tree_tiles(ts, gp, remaining, xi, R);
                if (members.empty()) continue;
                double sum = 0;
                for (int t : members) sum += eng.tile_weight(3, t, -1);
                if (sum / area >= thr2) {
                    if (!best.found || xi < best.xi) {
                        best.found = true;
                        best.xi = xi;
                        best.top = R;
                        best.value = std::sqrt(sum / area);
                    }
                    break;
                }
            }
        }
        return best;
    };

    auto record_bad = [&](const BadTree& bad, int pass, int n, int s) {
        auto members = maximal_tree_tiles(ts, gp, remaining, bad.xi, bad.top);
        Tree t;
        t.tiles = members;
        t.xi = bad.xi;
        t.top = bad.top;
        t.kind = classify_tree(ts, gp, members, bad.xi);
        res.bad_trees.push_back(t);
        res.bad_pass.push_back(pass);
        res.bad_n.push_back(n);
        res.bad_s.push_back(s);
    };

    if (i == 3) {
        while (true) {
            auto bad = scan_third();
            if (!bad.found) break;
            record_bad(bad, 4, 0, 0);
            eliminate(bad.xi, bad.top, 4, 0, 0, bad.value);
        }
    } else {
        for (int pass = 0; pass < 2; ++pass) {
            for (int n = 0; n <= params.n_max; ++n) {
                bool any = false;
                while (true) {
                    auto bad = scan_lacunary(n, pass == 0);
                    if (!bad.found) break;
                    any = true;
                    record_bad(bad, pass, n, 0);
                    eliminate(bad.xi, bad.top, pass, n, 0, bad.value);
                }
                if (!any && res.first_empty_n < 0 && n > 0) res.first_empty_n = n;
            }
        }
        for (int s = 0; s <= params.s_max; ++s) {
            for (int sign : {-1, +1}) {
                for (int n = 0; n <= params.n_max; ++n) {
                    while (true) {
                        auto bad = scan_overlapping(n, s, sign);
                        if (!bad.found) break;
                        record_bad(bad, sign < 0 ? 2 : 3, n, s);
                        eliminate(bad.xi, bad.top, sign < 0 ? 2 : 3, n, s, bad.value);
                    }
                }
            }
        }
    }

    res.remainder = std::move(remaining);
    for (auto& [k, b] : buckets) res.buckets.push_back(b);
    return res;
}

LevelDecomposition select_all_levels(SizeEngine& eng, const std::vector<int>& pool, int i,
                                     double epsilon, const SelectionParams& base) {
    LevelDecomposition out;
    std::vector<int> current = pool;
    double E = lp_norm(eng.field(i), 2.0);
    E = E * E;
    if (E <= 0) {
        out.residual = current;
        return out;
    }
    auto level_lambda = [&](int m) {
        const double ex = i == 3 ? 0.5 : 1.0 / (2.0 + epsilon);
        return std::pow(E * std::ldexp(1.0, m), ex);
    };
    double smax = eng.max_size(current, i).value;
    if (smax <= 0) {
        out.residual = current;
        return out;
    }
    int m0 = 0;
    while (level_lambda(m0) < smax) ++m0;
    for (int m = m0; m > m0 - 120 && !current.empty(); --m) {
        SelectionParams p = base;
        p.lambda = level_lambda(m);
        p.epsilon = epsilon;
        LevelForest lvl;
        lvl.m = m;
        lvl.lambda = p.lambda;
        lvl.sel = greedy_select(eng, current, i, p);
        current = lvl.sel.remainder;
        const bool empty_level = lvl.sel.selected.empty();
        out.levels.push_back(std::move(lvl));
        if (current.empty()) break;
        if (empty_level && eng.max_size(current, i).value == 0) break;
    }
    out.residual = current;
    return out;
}

// --- counting statistics -------------------------------------------------------

CountingStats counting_stats(const std::vector<Tree>& trees, double torus) {
    (void)torus;
    CountingStats st;
    if (trees.empty()) return st;
    std::vector<Rational> xs, ys;
    for (const auto& t : trees) {
        st.l1 += t.top.area();
        xs.push_back(t.top.x.lo());
        xs.push_back(t.top.x.hi());
        ys.push_back(t.top.y.lo());
        ys.push_back(t.top.y.hi());
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    // difference array over the compressed grid
    const std::size_t W = xs.size(), H = ys.size();
    std::vector<int> diff(W * H, 0);
    auto xid = [&](const Rational& v) {
        return std::size_t(std::lower_bound(xs.begin(), xs.end(), v) - xs.begin());
    };
    auto yid = [&](const Rational& v) {
        return std::size_t(std::lower_bound(ys.begin(), ys.end(), v) - ys.begin());
    };
    for (const auto& t : trees) {
        auto x0 = xid(t.top.x.lo()), x1 = xid(t.top.x.hi());
        auto y0 = yid(t.top.y.lo()), y1 = yid(t.top.y.hi());
        for (auto yy = y0; yy < y1; ++yy) {
            diff[yy * W + x0] += 1;
            if (x1 < W) diff[yy * W + x1] -= 1;
        }
    }
    for (std::size_t yy = 0; yy + 1 < H; ++yy) {
        int run = 0;
        for (std::size_t xx = 0; xx + 1 < W; ++xx) {
            run += diff[yy * W + xx];
            st.linf = std::max(st.linf, run);
        }
    }
    // BMO over dyadic squares: candidates are the dyadic ancestors of the tops
    std::map<std::string, Rational> sums;
    std::map<std::string, Rational> areas;
    int finest = 0;
    for (const auto& t : trees) finest = std::max(finest, -t.top.x.scale_exp);
    for (const auto& t : trees) {
        for (int e = -t.top.x.scale_exp; e >= 0; --e) {
            // ancestor of the top's lower-left corner at scale 2^{-e}
            DyadicInterval ax = standard_interval_containing(-e, t.top.x.lo());
            DyadicInterval ay = standard_interval_containing(-e, t.top.y.lo());
            RationalRect cand{ax.interval(), ay.interval()};
            if (!cand.contains(rect_of(t.top))) continue;
            std::string key = to_string(ax.lo()) + "," + to_string(ay.lo()) + "," +
                              std::to_string(e);
            areas[key] = cand.area();
            sums[key] += t.top.area();
        }
    }
    for (const auto& [key, sum] : sums)
        st.bmo = std::max(st.bmo, to_double(sum / areas[key]));
    return st;
}

// --- expanded counting split ----------------------------------------------------

namespace {

struct Compressed {
    std::vector<double> xs, ys;
    std::vector<double> count;
    std::size_t W = 0, H = 0;
};

/// torus box [c - h, c + h] split into up to 2 intervals inside [0, L)
std::vector<std::pair<double, double>> torus_segments(double c, double h, double L) {
    if (2 * h >= L) return {{0.0, L}};
    double lo = c - h, hi = c + h;
    lo = lo - std::floor(lo / L) * L;
    hi = hi - std::floor(hi / L) * L;
    if (lo <= hi) return {{lo, hi}};
    return {{0.0, hi}, {lo, L}};
}

} // namespace

ExpandedSplit split_expanded(const std::vector<DyadicSquare>& squares, int n, double torus) {
    ExpandedSplit out;
    if (squares.empty()) return out;

    // base counting function maximum
    auto linf_of = [&](const std::vector<int>& idx, double factor) {
        std::vector<double> xs{0.0, torus}, ys{0.0, torus};
        std::vector<std::vector<std::pair<double, double>>> segx(idx.size()), segy(idx.size());
        for (std::size_t k = 0; k < idx.size(); ++k) {
            const auto& R = squares[idx[k]];
            const double s = to_double(R.side());
            segx[k] = torus_segments(to_double(R.x.center()), factor * s / 2, torus);
            segy[k] = torus_segments(to_double(R.y.center()), factor * s / 2, torus);
            for (auto& seg : segx[k]) {
                xs.push_back(seg.first);
                xs.push_back(seg.second);
            }
            for (auto& seg : segy[k]) {
                ys.push_back(seg.first);
                ys.push_back(seg.second);
            }
        }
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        std::sort(ys.begin(), ys.end());
        ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
        std::vector<int> grid((xs.size()) * (ys.size()), 0);
        for (std::size_t k = 0; k < idx.size(); ++k)
            for (auto& sx : segx[k])
                for (auto& sy : segy[k]) {
                    auto x0 = std::lower_bound(xs.begin(), xs.end(), sx.first) - xs.begin();
                    auto x1 = std::lower_bound(xs.begin(), xs.end(), sx.second) - xs.begin();
                    auto y0 = std::lower_bound(ys.begin(), ys.end(), sy.first) - ys.begin();
                    auto y1 = std::lower_bound(ys.begin(), ys.end(), sy.second) - ys.begin();
                    for (auto yy = y0; yy < y1; ++yy)
                        for (auto xx = x0; xx < x1; ++xx) grid[yy * xs.size() + xx] += 1;
                }
        int m = 0;
        for (int v : grid) m = std::max(m, v);
        return m;
    };

    std::vector<int> all(squares.size());
    for (std::size_t k = 0; k < all.size(); ++k) all[k] = int(k);
    const int M = linf_of(all, 1.0);
    const double base = std::ldexp(1.0, 4 * n) * double(M) * M * M;

    Rational total_area{0};
    for (const auto& R : squares) total_area += R.area();

    const double factor = std::ldexp(1.0, n);
    std::vector<int> order = all;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (squares[a].side() != squares[b].side()) return squares[a].side() > squares[b].side();
        if (squares[a].x.lo() != squares[b].x.lo()) return squares[a].x.lo() < squares[b].x.lo();
        return squares[a].y.lo() < squares[b].y.lo();
    });

    for (int doubling = 0;; ++doubling) {
        const double K = base * std::ldexp(1.0, doubling);
        std::vector<int> sharp, flat;
        // incremental greedy with a dense grid refreshed per attempt
        std::vector<double> xs{0.0, torus}, ys{0.0, torus};
        for (const auto& R : squares) {
            const double s = to_double(R.side());
            for (auto& seg : torus_segments(to_double(R.x.center()), factor * s / 2, torus)) {
                xs.push_back(seg.first);
                xs.push_back(seg.second);
            }
            for (auto& seg : torus_segments(to_double(R.y.center()), factor * s / 2, torus)) {
                ys.push_back(seg.first);
                ys.push_back(seg.second);
            }
        }
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        std::sort(ys.begin(), ys.end());
        ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
        std::vector<int> grid(xs.size() * ys.size(), 0);
        auto cells_of = [&](int k) {
            std::vector<std::pair<std::size_t, std::size_t>> cells;
            const auto& R = squares[k];
            const double s = to_double(R.side());
            for (auto& sx : torus_segments(to_double(R.x.center()), factor * s / 2, torus))
                for (auto& sy : torus_segments(to_double(R.y.center()), factor * s / 2, torus)) {
                    auto x0 = std::lower_bound(xs.begin(), xs.end(), sx.first) - xs.begin();
                    auto x1 = std::lower_bound(xs.begin(), xs.end(), sx.second) - xs.begin();
                    auto y0 = std::lower_bound(ys.begin(), ys.end(), sy.first) - ys.begin();
                    auto y1 = std::lower_bound(ys.begin(), ys.end(), sy.second) - ys.begin();
                    for (auto yy = y0; yy < y1; ++yy)
                        for (auto xx = x0; xx < x1; ++xx) cells.emplace_back(xx, yy);
                }
            return cells;
        };
        double max_seen = 0;
        for (int k : order) {
            auto cells = cells_of(k);
            int peak = 0;
            for (auto& [xx, yy] : cells) peak = std::max(peak, grid[yy * xs.size() + xx]);
            if (peak + 1 <= K) {
                sharp.push_back(k);
                for (auto& [xx, yy] : cells) {
                    int& c = grid[yy * xs.size() + xx];
                    c += 1;
                    max_seen = std::max(max_seen, double(c));
                }
            } else {
                flat.push_back(k);
            }
        }
        Rational flat_area{0};
        for (int k : flat) flat_area += squares[k].area();
        if (2 * flat_area <= total_area) {
            out.sharp = std::move(sharp);
            out.flat = std::move(flat);
            out.threshold = K;
            out.achieved_inf = max_seen;
            out.doublings = doubling;
            return out;
        }
    }
}

// --- 1D forests -----------------------------------------------------------------

OrthReport almost_orthogonality_report(const std::vector<Tile1D>& tiles,
                                       const std::vector<Tree1D>& forest, const Field1D& f,
                                       const GridParams& p,
                                       std::optional<DyadicInterval> I0) {
    // forest validity: lacunary trees, containments, pairwise strong disjointness
    for (const auto& t : forest) {
        if (t.tiles.empty()) throw precondition_error("1d forest: empty tree");
        for (int k : t.tiles) {
            const auto& tile = tiles[k];
            if (!t.I_top.interval().contains(tile.I.interval()))
                throw precondition_error("1d forest: tile escapes its top interval");
            if (dilate(tile.omega, Rational(2)).contains(t.xi))
                throw precondition_error("1d forest: tree is not lacunary");
            const int jI = -tile.I.scale_exp / p.J;
            if (!dilate(tile.omega, (p.enlarge_lo + p.enlarge_hi) / 2)
                     .contains(top_window(p, t.xi, jI)))
                throw precondition_error("1d forest: top window escapes the tile companion");
        }
    }
    for (std::size_t a = 0; a < forest.size(); ++a)
        for (std::size_t b = a + 1; b < forest.size(); ++b) {
            for (int ka : forest[a].tiles)
                for (int kb : forest[b].tiles) {
                    if (ka == kb) throw precondition_error("1d forest: trees share a tile");
                    auto oa = tiles[ka].omega.interval();
                    auto ob = tiles[kb].omega.interval();
                    if (ob.contains(oa) && !(oa == ob)) {
                        if (forest[a].I_top.interval().intersects(tiles[kb].I.interval()))
                            throw precondition_error("1d forest: strong disjointness fails");
                    }
                    if (oa.contains(ob) && !(oa == ob)) {
                        if (forest[b].I_top.interval().intersects(tiles[ka].I.interval()))
                            throw precondition_error("1d forest: strong disjointness fails");
                    }
                }
        }

    OrthReport rep;
    const int N = f.N();
    // counting function of the tops
    std::vector<double> cnt(N, 0.0);
    for (const auto& t : forest) {
        const double lo = to_double(t.I_top.lo()), hi = to_double(t.I_top.hi());
        for (int k = 0; k < N; ++k) {
            const double x = f.x(k);
            if (x >= lo && x < hi) cnt[k] += 1;
        }
    }
    for (double c : cnt) rep.n_inf = std::max(rep.n_inf, c);

    double lhs = 0;
    for (const auto& t : forest) {
        for (int k : t.tiles) {
            const auto& tile = tiles[k];
            if (I0 && !I0->interval().contains(tile.I.interval())) continue;
            double best = 0;
            for (int e = 0; e < 4; ++e) {
                auto m = dict_multiplier(f.n, f.L, tile.omega.interval(), e);
                Field1D g = apply_multiplier(f, m);
                auto w = powered(chi_tilde_interval(f.n, f.L, tile.I.interval()), 10);
                double acc = 0;
                for (int q = 0; q < N; ++q) acc += std::norm(g.v[q]) * w[q] * w[q];
                best = std::max(best, acc * f.dx());
            }
            lhs += best;
        }
    }
    rep.lhs = lhs;
    double denom;
    if (I0) {
        auto w = powered(chi_tilde_interval(f.n, f.L, I0->interval()), 2);
        double acc = 0;
        for (int q = 0; q < N; ++q) acc += std::norm(f.v[q]) * w[q] * w[q];
        denom = acc * f.dx();
    } else {
        const double l2 = lp_norm(f, 2.0);
        denom = l2 * l2;
    }
    const double lg = std::log(2.0 + rep.n_inf);
    rep.ratio = denom > 0 ? lhs / (lg * lg * denom) : 0.0;
    return rep;
}

// --- structural checkers -----------------------------------------------------------

NestednessReport tree_nestedness(const TileSet& ts, const GridParams& p, const Tree& t) {
    NestednessReport rep;
    rep.top_side = t.top.side();
    // group tile squares by scale
    std::map<int, std::vector<const DyadicSquare*>> by_scale;
    for (int k : t.tiles) by_scale[square_scale_step(p, ts.tiles[k].square)].push_back(&ts.tiles[k].square);

    std::vector<int> scales;
    for (auto& [j, v] : by_scale) scales.push_back(j);

    // E_{j'} subset of E_j for j < j': every finer square sits inside a member square of E_j
    for (std::size_t a = 0; a < scales.size(); ++a) {
        for (std::size_t b = a + 1; b < scales.size(); ++b) {
            const int j = scales[a], jp = scales[b];
            for (const auto* fine : by_scale[jp]) {
                bool covered = false;
                for (const auto* coarse : by_scale[j])
                    if (rect_of(*coarse).contains(rect_of(*fine))) {
                        covered = true;
                        break;
                    }
                if (!covered) rep.nested = false;
            }
        }
    }

    // fiberwise boundary sums at x midpoints of the tile columns
    std::set<Rational> xcuts;
    for (int k : t.tiles) {
        xcuts.insert(ts.tiles[k].square.x.lo());
        xcuts.insert(ts.tiles[k].square.x.hi());
    }
    std::vector<Rational> cuts(xcuts.begin(), xcuts.end());
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const Rational x = (cuts[c] + cuts[c + 1]) / 2;
        Rational sum{0};
        for (auto& [j, v] : by_scale) {
            // maximal runs of y-intervals among squares containing x
            std::vector<std::pair<Rational, Rational>> ys;
            for (const auto* sq : v)
                if (sq->x.interval().contains(x)) ys.emplace_back(sq->y.lo(), sq->y.hi());
            if (ys.empty()) continue;
            std::sort(ys.begin(), ys.end());
            int runs = 0;
            Rational end = ys[0].first - 1;
            for (auto& [lo, hi] : ys) {
                if (lo > end) {
                    ++runs;
                    end = hi;
                } else {
                    end = std::max(end, hi);
                }
            }
            sum += Rational(2 * runs) * pow2(-p.J * j);
        }
        rep.boundary_sum_max = std::max(rep.boundary_sum_max, sum);
    }
    return rep;
}

std::vector<std::vector<int>> split_reliable(const TileSet& ts, const std::vector<int>& tiles,
                                             int n) {
    (void)n;
    std::map<std::string, std::vector<int>> groups;
    for (int k : tiles) {
        const auto& t = ts.tiles[k];
        std::string key = to_string(t.square.x.lo()) + "|" +
                          std::to_string(t.square.x.scale_exp) + "|" + std::to_string(t.cube);
        groups[key].push_back(k);
    }
    std::size_t parts = 0;
    for (auto& [k, v] : groups) parts = std::max(parts, v.size());
    std::vector<std::vector<int>> out(parts);
    for (auto& [k, v] : groups) {
        std::sort(v.begin(), v.end(), [&](int a, int b) {
            return ts.tiles[a].square.y.lo() < ts.tiles[b].square.y.lo();
        });
        for (std::size_t m = 0; m < v.size(); ++m) out[m].push_back(v[m]);
    }
    return out;
}

} // namespace bht
