#pragma once

#include <cstdint>
#include <numeric>

#include "hrtc/errors.hpp"

namespace hrtc {

// Exact rational with positive denominator. Comparisons cross-multiply in
// 128-bit so they never round; doubles are only a view.
struct Rat {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Rat of(std::int64_t n, std::int64_t d) {
        if (d == 0) throw usage_error("Rat: zero denominator");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        return Rat{n, d};
    }

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend bool operator==(const Rat& a, const Rat& b) {
        return static_cast<__int128>(a.num) * b.den == static_cast<__int128>(b.num) * a.den;
    }
    friend bool operator<(const Rat& a, const Rat& b) {
        return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
    }
    friend bool operator<=(const Rat& a, const Rat& b) { return !(b < a); }
    friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
    friend bool operator>=(const Rat& a, const Rat& b) { return !(a < b); }
};

inline Rat rat_min(const Rat& a, const Rat& b) { return b < a ? b : a; }
inline Rat rat_max(const Rat& a, const Rat& b) { return a < b ? b : a; }

// floor/ceil of n/d for d > 0, exact for any 128-bit numerator.
inline std::int64_t floor_div_i128(__int128 n, __int128 d) {
    __int128 q = n / d;
    if ((n % d != 0) && ((n < 0) != (d < 0))) --q;
    return static_cast<std::int64_t>(q);
}

inline std::int64_t ceil_div_i128(__int128 n, __int128 d) {
    __int128 q = n / d;
    if ((n % d != 0) && ((n < 0) == (d < 0))) ++q;
    return static_cast<std::int64_t>(q);
}

// floor(m * r) and ceil(m * r) without overflow for |m * r.num| < 2^127.
inline std::int64_t floor_scaled(std::int64_t m, const Rat& r) {
    return floor_div_i128(static_cast<__int128>(m) * r.num, r.den);
}

inline std::int64_t ceil_scaled(std::int64_t m, const Rat& r) {
    return ceil_div_i128(static_cast<__int128>(m) * r.num, r.den);
}

}  // namespace hrtc
