#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>

#include "bht/errors.hpp"

namespace bht {

using BigInt   = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// 2^k as an exact rational, k of either sign.
inline Rational pow2(int k) {
    BigInt two = 2;
    if (k >= 0) return Rational(boost::multiprecision::pow(two, unsigned(k)));
    return Rational(1, boost::multiprecision::pow(two, unsigned(-k)));
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline BigInt floor_div(const BigInt& a, const BigInt& b) {
    BigInt q = a / b, r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

inline BigInt rational_floor(const Rational& r) {
    return floor_div(numerator(r), denominator(r));
}

/// "num/den" (or just "num" when den == 1); exact round-trip format.
std::string to_string(const Rational& r);
Rational rational_from_string(const std::string& s);

/// Closed interval [lo, hi] with exact rational endpoints.
struct RationalInterval {
    Rational lo{0};
    Rational hi{0};

    RationalInterval() = default;
    RationalInterval(Rational l, Rational h) : lo(std::move(l)), hi(std::move(h)) {
        if (lo > hi) throw parameter_error("RationalInterval: lo > hi");
    }

    Rational length() const { return hi - lo; }
    Rational center() const { return (lo + hi) / 2; }

    bool contains(const Rational& x) const { return lo <= x && x <= hi; }
    bool contains(const RationalInterval& o) const { return lo <= o.lo && o.hi <= hi; }
    bool intersects(const RationalInterval& o) const { return !(hi < o.lo || o.hi < lo); }

    bool operator==(const RationalInterval& o) const { return lo == o.lo && hi == o.hi; }
};

/// Distance between two intervals on the line (0 if they intersect).
inline Rational dist(const RationalInterval& a, const RationalInterval& b) {
    if (a.intersects(b)) return Rational(0);
    return a.hi < b.lo ? b.lo - a.hi : a.lo - b.hi;
}

/// Same center, length scaled by `factor` (> 0).
inline RationalInterval dilate(const RationalInterval& I, const Rational& factor) {
    if (factor <= 0) throw parameter_error("dilate: factor must be positive");
    Rational c = I.center(), h = I.length() * factor / 2;
    return RationalInterval(c - h, c + h);
}

inline RationalInterval translate(const RationalInterval& I, const Rational& t) {
    return RationalInterval(I.lo + t, I.hi + t);
}

/// {-x : x in I}.
inline RationalInterval negate(const RationalInterval& I) {
    return RationalInterval(-I.hi, -I.lo);
}

/// Torus distance of two points, period L > 0; result in [0, L/2].
inline Rational torus_dist(const Rational& a, const Rational& b, const Rational& L) {
    Rational d = a - b;
    if (d < 0) d = -d;
    d -= L * rational_floor(d / L);
    if (2 * d > L) d = L - d;
    return d;
}

} // namespace bht
