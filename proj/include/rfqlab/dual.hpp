#pragma once

// Fixed-width forward-mode dual numbers. The likelihood code evaluates each
// record's term on Dual<N> where N is the number of "core" scalars the term
// depends on (location shifts, scales, p_quote, ...); the chain rule to the
// full coefficient vector is a rank-1 expansion done by the caller. Special
// functions (exp, log, pow, erfc, incomplete gamma) are templated on the
// scalar type so the same code path produces values and derivatives.

#include <array>
#include <cmath>
#include <cstddef>

namespace rfq {

template <std::size_t N>
struct Dual {
    double v = 0.0;
    std::array<double, N> d{}; // value-initialized to zeros

    Dual() = default;
    Dual(double value) : v(value) {} // NOLINT: implicit from constants is the point

    static Dual seed(double value, std::size_t slot) {
        Dual x(value);
        x.d[slot] = 1.0;
        return x;
    }

    Dual& operator+=(const Dual& o) {
        v += o.v;
        for (std::size_t i = 0; i < N; ++i) d[i] += o.d[i];
        return *this;
    }
    Dual& operator-=(const Dual& o) {
        v -= o.v;
        for (std::size_t i = 0; i < N; ++i) d[i] -= o.d[i];
        return *this;
    }
    Dual& operator*=(const Dual& o) {
        for (std::size_t i = 0; i < N; ++i) d[i] = d[i] * o.v + v * o.d[i];
        v *= o.v;
        return *this;
    }
    Dual& operator/=(const Dual& o) {
        const double inv = 1.0 / o.v;
        for (std::size_t i = 0; i < N; ++i) d[i] = (d[i] - v * inv * o.d[i]) * inv;
        v *= inv;
        return *this;
    }
};

template <std::size_t N> Dual<N> operator+(Dual<N> a, const Dual<N>& b) { return a += b; }
template <std::size_t N> Dual<N> operator-(Dual<N> a, const Dual<N>& b) { return a -= b; }
template <std::size_t N> Dual<N> operator*(Dual<N> a, const Dual<N>& b) { return a *= b; }
template <std::size_t N> Dual<N> operator/(Dual<N> a, const Dual<N>& b) { return a /= b; }
template <std::size_t N> Dual<N> operator-(const Dual<N>& a) {
    Dual<N> r;
    r.v = -a.v;
    for (std::size_t i = 0; i < N; ++i) r.d[i] = -a.d[i];
    return r;
}
template <std::size_t N> Dual<N> operator+(const Dual<N>& a) { return a; }

template <std::size_t N> bool operator<(const Dual<N>& a, const Dual<N>& b) { return a.v < b.v; }
template <std::size_t N> bool operator>(const Dual<N>& a, const Dual<N>& b) { return a.v > b.v; }
template <std::size_t N> bool operator<=(const Dual<N>& a, const Dual<N>& b) { return a.v <= b.v; }
template <std::size_t N> bool operator>=(const Dual<N>& a, const Dual<N>& b) { return a.v >= b.v; }

template <std::size_t N>
Dual<N> chain(double fv, double dfv, const Dual<N>& x) {
    Dual<N> r;
    r.v = fv;
    for (std::size_t i = 0; i < N; ++i) r.d[i] = dfv * x.d[i];
    return r;
}

template <std::size_t N> Dual<N> exp(const Dual<N>& x) {
    const double e = std::exp(x.v);
    return chain(e, e, x);
}
template <std::size_t N> Dual<N> log(const Dual<N>& x) {
    return chain(std::log(x.v), 1.0 / x.v, x);
}
template <std::size_t N> Dual<N> sqrt(const Dual<N>& x) {
    const double s = std::sqrt(x.v);
    return chain(s, 0.5 / s, x);
}
template <std::size_t N> Dual<N> fabs(const Dual<N>& x) {
    return chain(std::fabs(x.v), x.v >= 0.0 ? 1.0 : -1.0, x);
}
template <std::size_t N> Dual<N> abs(const Dual<N>& x) { return fabs(x); }

// x^y with x > 0 (both sides may carry derivatives).
template <std::size_t N> Dual<N> pow(const Dual<N>& x, const Dual<N>& y) {
    Dual<N> r;
    r.v = std::pow(x.v, y.v);
    const double lx = std::log(x.v);
    for (std::size_t i = 0; i < N; ++i)
        r.d[i] = r.v * (y.d[i] * lx + y.v * x.d[i] / x.v);
    return r;
}
template <std::size_t N> Dual<N> pow(const Dual<N>& x, double y) {
    const double p = std::pow(x.v, y);
    return chain(p, y * p / x.v, x);
}

// Integer power that stays valid at x = 0 (used for survival^n).
template <std::size_t N> Dual<N> powi(Dual<N> x, int n) {
    Dual<N> r(1.0);
    while (n > 0) {
        if (n & 1) r *= x;
        x *= x;
        n >>= 1;
    }
    return r;
}
inline double powi(double x, int n) {
    double r = 1.0;
    while (n > 0) {
        if (n & 1) r *= x;
        x *= x;
        n >>= 1;
    }
    return r;
}

// Plain-double shims so templated numeric code compiles for both scalar types.
inline double value_of(double x) { return x; }
template <std::size_t N> double value_of(const Dual<N>& x) { return x.v; }

} // namespace rfq
