#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "refdet/errors.hpp"

namespace refdet {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline bool is_zero(const Rational& r) { return r.is_zero(); }

inline int sign_of(const Rational& r) { return r.sign(); }

inline Rational rational_abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

// 2^e for possibly negative e.
inline Rational pow2(long e) {
    Integer p = Integer(1) << static_cast<unsigned>(e < 0 ? -e : e);
    return e < 0 ? Rational(1, p) : Rational(p);
}

inline std::string render(const Rational& r) {
    Integer num = numerator(r), den = denominator(r);
    std::string s = num.str();
    if (den != 1) s += "/" + den.str();
    return s;
}

// Parses "p" or "p/q" with optional leading '-'.
inline Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(Integer(s));
        Integer num(s.substr(0, slash));
        Integer den(s.substr(slash + 1));
        if (den == 0) throw FileFormatError("zero denominator in rational: " + s);
        return Rational(num, den);
    } catch (const std::runtime_error&) {
        throw FileFormatError("cannot parse rational: " + s);
    }
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace refdet
