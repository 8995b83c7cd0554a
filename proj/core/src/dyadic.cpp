#include "bht/dyadic.hpp"

#include <sstream>

namespace bht {

std::string to_string(const Rational& r) {
    std::ostringstream os;
    os << numerator(r);
    if (denominator(r) != 1) os << "/" << denominator(r);
    return os.str();
}

Rational rational_from_string(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(BigInt(s));
        BigInt num(s.substr(0, slash));
        BigInt den(s.substr(slash + 1));
        if (den == 0) throw parameter_error("rational_from_string: zero denominator");
        return Rational(num, den);
    } catch (const std::exception&) {
        throw parameter_error("rational_from_string: cannot parse '" + s + "'");
    }
}

void GridParams::validate() const {
    if (J < 1) throw parameter_error("GridParams: J must be >= 1");
    if (C0 < 100) throw parameter_error("GridParams: C0 must be >= 100");
    if (N_order < 1) throw parameter_error("GridParams: N_order must be >= 1");
    if (enlarge_lo < 3 || enlarge_hi <= enlarge_lo)
        throw parameter_error("GridParams: need 3 <= enlarge_lo < enlarge_hi");
}

Rational DyadicInterval::lo() const {
    // 2^i (l + L/M) = 2^i (l M + L) / M
    Rational base(index * shift_den + shift_num, shift_den);
    return base * pow2(scale_exp);
}

Rational DyadicInterval::hi() const {
    Rational base(index * shift_den + shift_num + shift_den, shift_den);
    return base * pow2(scale_exp);
}

DyadicInterval grid_interval(int M, int j, int L, int i, const BigInt& l) {
    if (M < 3 || M % 2 == 0) throw parameter_error("grid_interval: M must be odd and >= 3");
    if (j < 0 || j > M - 2) throw parameter_error("grid_interval: need 0 <= j <= M-2");
    if (L < 0 || L > M - 1) throw parameter_error("grid_interval: need 0 <= L <= M-1");
    int r = ((i - j) % (M - 1) + (M - 1)) % (M - 1);
    if (r != 0) throw parameter_error("grid_interval: scale congruence i = j (mod M-1) violated");
    DyadicInterval out;
    out.scale_exp = i;
    out.index = l;
    out.shift_num = L;
    out.shift_den = M;
    out.grid_id = "G_" + std::to_string(M) + "_" + std::to_string(j) + "_" + std::to_string(L);
    return out;
}

DyadicInterval standard_interval(int i, const BigInt& l) {
    DyadicInterval out;
    out.scale_exp = i;
    out.index = l;
    out.shift_num = 0;
    out.shift_den = 1;
    out.grid_id = "std";
    return out;
}

DyadicInterval standard_interval_containing(int i, const Rational& x) {
    return standard_interval(i, rational_floor(x / pow2(i)));
}

RationalInterval dilate(const DyadicInterval& I, const Rational& factor) {
    return dilate(I.interval(), factor);
}

bool separation_ok(const DyadicInterval& a, const DyadicInterval& b, int J) {
    if (a.length() != b.length()) throw parameter_error("separation_ok: intervals of unequal length");
    if (a == b) return true;
    return dist(a.interval(), b.interval()) >= pow2(J) * a.length();
}

DyadicSquare::DyadicSquare(DyadicInterval xi, DyadicInterval yi) : x(std::move(xi)), y(std::move(yi)) {
    if (x.length() != y.length()) throw parameter_error("DyadicSquare: sides of unequal length");
}

std::vector<DyadicSquare> squares_in_rect(int i, const RationalRect& region) {
    std::vector<DyadicSquare> out;
    Rational s = pow2(i);
    BigInt x0 = rational_floor(region.x.lo / s);
    BigInt y0 = rational_floor(region.y.lo / s);
    if (Rational(x0) * s < region.x.lo) ++x0;
    if (Rational(y0) * s < region.y.lo) ++y0;
    for (BigInt lx = x0; Rational(lx + 1) * s <= region.x.hi; ++lx)
        for (BigInt ly = y0; Rational(ly + 1) * s <= region.y.hi; ++ly)
            out.emplace_back(standard_interval(i, lx), standard_interval(i, ly));
    return out;
}

} // namespace bht
