#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bht/rational.hpp"

namespace bht {

/// Global discretization parameters shared by the tile machinery.
struct GridParams {
    int J = 1;                ///< sparsification exponent; scales come in powers of 2^J
    Rational C0 = 8192;       ///< frequency-offset constant for the third cube component
    int N_order = 2;          ///< derivative order used by multiplier adaptation checks
    /// Enlargement window for the companion intervals omega_bar:
    /// enlarge_lo * omega <= omega_bar <= enlarge_hi * omega.
    Rational enlarge_lo = 3000;
    Rational enlarge_hi = 4000;

    void validate() const;
};

/// An interval 2^i (l + L/M, l + L/M + 1) of a (possibly shifted) dyadic grid.
/// M == 1, L == 0 denotes the standard grid with no scale congruence.
struct DyadicInterval {
    int scale_exp = 0;   ///< i
    BigInt index{0};     ///< l
    int shift_num = 0;   ///< L
    int shift_den = 1;   ///< M (odd >= 3 for shifted grids, 1 for the standard grid)
    std::string grid_id = "std";

    Rational lo() const;
    Rational hi() const;
    Rational center() const { return (lo() + hi()) / 2; }
    Rational length() const { return pow2(scale_exp); }
    RationalInterval interval() const { return RationalInterval(lo(), hi()); }

    bool operator==(const DyadicInterval& o) const {
        return scale_exp == o.scale_exp && index == o.index &&
               shift_num == o.shift_num && shift_den == o.shift_den;
    }
};

/// Interval of the shifted grid G_{M,j,L}; enforces the grid's congruence i = j (mod M-1).
DyadicInterval grid_interval(int M, int j, int L, int i, const BigInt& l);

/// Interval [2^i l, 2^i (l+1)] of the standard dyadic grid.
DyadicInterval standard_interval(int i, const BigInt& l);

/// The standard-grid interval at scale 2^i containing x (x taken in [2^i l, 2^i(l+1))).
DyadicInterval standard_interval_containing(int i, const Rational& x);

RationalInterval dilate(const DyadicInterval& I, const Rational& factor);

/// true iff a == b or dist(a, b) >= 2^J |a|.  Requires |a| == |b|.
bool separation_ok(const DyadicInterval& a, const DyadicInterval& b, int J);

struct DyadicSquare {
    DyadicInterval x;
    DyadicInterval y;

    DyadicSquare() = default;
    DyadicSquare(DyadicInterval xi, DyadicInterval yi);

    Rational side() const { return x.length(); }
    Rational area() const { return side() * side(); }
    bool contains(const DyadicSquare& o) const {
        return x.interval().contains(o.x.interval()) && y.interval().contains(o.y.interval());
    }
    bool operator==(const DyadicSquare& o) const { return x == o.x && y == o.y; }
};

/// Axis-aligned rational rectangle, the result of dilating squares etc.
struct RationalRect {
    RationalInterval x;
    RationalInterval y;
    Rational area() const { return x.length() * y.length(); }
    bool contains(const RationalRect& o) const { return x.contains(o.x) && y.contains(o.y); }
    bool contains_point(const Rational& px, const Rational& py) const {
        return x.contains(px) && y.contains(py);
    }
    bool intersects(const RationalRect& o) const { return x.intersects(o.x) && y.intersects(o.y); }
};

inline RationalRect rect_of(const DyadicSquare& R) { return {R.x.interval(), R.y.interval()}; }
inline RationalRect dilate(const RationalRect& R, const Rational& f) {
    return {dilate(R.x, f), dilate(R.y, f)};
}
inline RationalRect dilate(const DyadicSquare& R, const Rational& f) { return dilate(rect_of(R), f); }

/// All standard-grid dyadic squares of sidelength 2^i inside `region`.
std::vector<DyadicSquare> squares_in_rect(int i, const RationalRect& region);

} // namespace bht
