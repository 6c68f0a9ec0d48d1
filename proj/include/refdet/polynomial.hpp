#pragma once

#include <compare>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "refdet/errors.hpp"
#include "refdet/rational.hpp"

namespace refdet {

// A named indeterminate such as w[1,2,1]: a family tag plus a multi-index.
struct VarKey {
    std::string family;
    std::vector<int> indices;

    auto operator<=>(const VarKey&) const = default;

    std::string render() const {
        std::string s = family + "[";
        for (size_t i = 0; i < indices.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(indices[i]);
        }
        return s + "]";
    }
};

// Sorted (variable, exponent) pairs with positive exponents; empty = constant monomial.
using Monomial = std::vector<std::pair<VarKey, int>>;

inline std::string render_monomial(const Monomial& m) {
    std::string s;
    for (size_t i = 0; i < m.size(); ++i) {
        if (i) s += "*";
        s += m[i].first.render();
        if (m[i].second != 1) s += "^" + std::to_string(m[i].second);
    }
    return s;
}

// Sparse multivariate polynomial over Rational with deterministic term order.
class Polynomial {
  public:
    Polynomial() = default;
    Polynomial(int v) { *this = Polynomial(Rational(v)); }
    Polynomial(const Rational& c) {
        if (!refdet::is_zero(c)) terms_[Monomial{}] = c;
    }

    static Polynomial variable(std::string family, std::vector<int> indices) {
        Polynomial p;
        Monomial m{{VarKey{std::move(family), std::move(indices)}, 1}};
        p.terms_[std::move(m)] = Rational(1);
        return p;
    }

    const std::map<Monomial, Rational>& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }

    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
    }

    Rational constant_value() const {
        if (terms_.empty()) return Rational(0);
        if (!is_constant()) throw std::logic_error("polynomial is not constant");
        return terms_.begin()->second;
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

    Polynomial& operator+=(const Polynomial& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    Polynomial operator-() const {
        Polynomial r;
        for (const auto& [m, c] : terms_) r.terms_[m] = -c;
        return r;
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        Polynomial r;
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) r.add_term(merge(ma, mb), ca * cb);
        return r;
    }
    Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

    Polynomial& operator*=(const Rational& c) {
        if (refdet::is_zero(c)) {
            terms_.clear();
            return *this;
        }
        for (auto& [m, coeff] : terms_) coeff *= c;
        return *this;
    }
    friend Polynomial operator*(Polynomial a, const Rational& c) { return a *= c; }
    friend Polynomial operator*(const Rational& c, Polynomial a) { return a *= c; }

    // Total substitution; every variable that occurs must be assigned.
    Rational substitute(const std::map<VarKey, Rational>& assignment) const {
        Rational total(0);
        for (const auto& [m, c] : terms_) {
            Rational v = c;
            for (const auto& [var, exp] : m) {
                auto it = assignment.find(var);
                if (it == assignment.end())
                    throw std::invalid_argument("unassigned variable " + var.render());
                for (int e = 0; e < exp; ++e) v *= it->second;
            }
            total += v;
        }
        return total;
    }

    std::string render() const {
        if (terms_.empty()) return "0";
        std::string s;
        bool first = true;
        for (const auto& [m, c] : terms_) {
            Rational a = c;
            if (first) {
                if (a < 0) {
                    s += "-";
                    a = -a;
                }
            } else {
                s += a < 0 ? " - " : " + ";
                if (a < 0) a = -a;
            }
            if (m.empty()) {
                s += refdet::render(a);
            } else {
                if (a != 1) s += refdet::render(a) + "*";
                s += render_monomial(m);
            }
            first = false;
        }
        return s;
    }

  private:
    static Monomial merge(const Monomial& a, const Monomial& b) {
        Monomial r;
        size_t i = 0, j = 0;
        while (i < a.size() && j < b.size()) {
            if (a[i].first < b[j].first)
                r.push_back(a[i++]);
            else if (b[j].first < a[i].first)
                r.push_back(b[j++]);
            else {
                r.emplace_back(a[i].first, a[i].second + b[j].second);
                ++i, ++j;
            }
        }
        for (; i < a.size(); ++i) r.push_back(a[i]);
        for (; j < b.size(); ++j) r.push_back(b[j]);
        return r;
    }

    void add_term(const Monomial& m, const Rational& c) {
        if (refdet::is_zero(c)) return;
        auto [it, inserted] = terms_.emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (refdet::is_zero(it->second)) terms_.erase(it);
        }
    }

    std::map<Monomial, Rational> terms_;
};

inline bool is_zero(const Polynomial& p) { return p.is_zero(); }
inline std::string render(const Polynomial& p) { return p.render(); }

inline Polynomial poly_product(const Polynomial& a, const Polynomial& b) { return a * b; }

// --- uniform ring access used by the templated layers ---

template <class R>
inline R ring_from_rational(const Rational& c) {
    return R(c);
}

template <class R>
inline R ring_scale(const R& v, const Rational& c) {
    return v * c;
}

template <>
inline Rational ring_scale<Rational>(const Rational& v, const Rational& c) {
    return Rational(v * c);
}

// True and c filled when p == c * q for a single rational constant c (q != 0).
inline bool constant_ratio(const Polynomial& p, const Polynomial& q, Rational& c) {
    if (q.is_zero()) return false;
    if (p.is_zero()) {
        c = Rational(0);
        return true;
    }
    const auto& lead_q = *q.terms().begin();
    auto it = p.terms().find(lead_q.first);
    if (it == p.terms().end()) return false;
    c = it->second / lead_q.second;
    return p == q * c;
}

inline bool constant_ratio(const Rational& p, const Rational& q, Rational& c) {
    if (refdet::is_zero(q)) return false;
    c = p / q;
    return true;
}

}  // namespace refdet
