#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "refdet/errors.hpp"
#include "refdet/polynomial.hpp"
#include "refdet/rational.hpp"

namespace refdet {

// Largest square divisor: m = square^2 * squarefree. Trial division; inputs stay desk-scale.
inline std::pair<Integer, Integer> extract_square(Integer m) {
    Integer root(1), rest(1);
    for (Integer p(2); p * p <= m; ++p) {
        if (m % p != 0) continue;
        int mult = 0;
        while (m % p == 0) {
            m /= p;
            ++mult;
        }
        for (int i = 0; i < mult / 2; ++i) root *= p;
        if (mult % 2) rest *= p;
    }
    rest *= m;
    return {root, rest};
}

// Canonical value coefficient * sqrt(radicand), radicand a positive squarefree integer.
// radicand == 1 iff the value lies in the coefficient ring; zero is (0, 1).
template <class R>
struct Radical {
    R coefficient{};
    Integer radicand{1};

    Radical() = default;
    Radical(R coef, Integer rad) : coefficient(std::move(coef)), radicand(std::move(rad)) {
        if (refdet::is_zero(coefficient)) radicand = 1;
    }

    bool is_zero() const { return refdet::is_zero(coefficient); }

    friend bool operator==(const Radical& a, const Radical& b) {
        return a.coefficient == b.coefficient && a.radicand == b.radicand;
    }

    std::string render() const {
        std::string c = refdet::render(coefficient);
        if (radicand == 1) return c;
        if (c.find_first_of("+- ") != std::string::npos && c[0] != '-') c = "(" + c + ")";
        else if (c.find_first_of("+ ") != std::string::npos || c.find(" - ") != std::string::npos)
            c = "(" + c + ")";
        return c + "*sqrt(" + radicand.str() + ")";
    }
};

// c * sqrt(d_raw) -> canonical radical; rational radicands fold into the coefficient.
inline Radical<Rational> radical_normalize(const Rational& c, const Rational& d_raw) {
    if (d_raw < 0) throw NegativeRadicandError("negative radicand: " + render(d_raw));
    if (refdet::is_zero(c) || refdet::is_zero(d_raw)) return Radical<Rational>(Rational(0), 1);
    // sqrt(p/q) = sqrt(p*q)/q
    Integer p = numerator(d_raw), q = denominator(d_raw);
    auto [root, rest] = extract_square(p * q);
    return Radical<Rational>(c * Rational(root, q), rest);
}

template <class R>
Radical<R> radical_multiply(const Radical<R>& a, const Radical<R>& b) {
    R coef = a.coefficient * b.coefficient;
    if (refdet::is_zero(coef)) return Radical<R>(R(0), 1);
    // Squarefree radicands: d1*d2 = g^2 * (d1/g)(d2/g) with g = gcd, coprime cofactors.
    Integer g = gcd(a.radicand, b.radicand);
    Integer rest = (a.radicand / g) * (b.radicand / g);
    return Radical<R>(ring_scale(coef, Rational(g)), rest);
}

template <class R>
Radical<R> radical_add(const Radical<R>& a, const Radical<R>& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.radicand != b.radicand)
        throw MixedRadicandError("cannot add sqrt(" + a.radicand.str() + ") to sqrt(" +
                                 b.radicand.str() + ")");
    return Radical<R>(a.coefficient + b.coefficient, a.radicand);
}

template <class R>
Radical<R> radical_scale(const Radical<R>& a, const Rational& c) {
    return Radical<R>(ring_scale(a.coefficient, c), a.radicand);
}

// Exact square of a radical, landing back in the coefficient ring.
template <class R>
R radical_square(const Radical<R>& a) {
    return ring_scale(a.coefficient * a.coefficient, Rational(a.radicand));
}

inline double to_double(const Radical<Rational>& a) {
    return to_double(a.coefficient) * std::sqrt(a.radicand.convert_to<double>());
}

}  // namespace refdet
