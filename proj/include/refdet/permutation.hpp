#pragma once

#include <map>
#include <numeric>
#include <vector>

#include "refdet/errors.hpp"
#include "refdet/rational.hpp"

namespace refdet {

// Permutation of {0..k-1} stored as images: img[i] is where i maps to.
struct Permutation {
    std::vector<int> img;

    explicit Permutation(int k = 0) : img(k) { std::iota(img.begin(), img.end(), 0); }
    explicit Permutation(std::vector<int> images) : img(std::move(images)) {}

    int size() const { return static_cast<int>(img.size()); }
    int operator()(int i) const { return img[i]; }

    auto operator<=>(const Permutation&) const = default;

    // (a * b)(i) = a(b(i)): apply b first.
    friend Permutation operator*(const Permutation& a, const Permutation& b) {
        Permutation r(a.size());
        for (int i = 0; i < a.size(); ++i) r.img[i] = a.img[b.img[i]];
        return r;
    }

    Permutation inverse() const {
        Permutation r(size());
        for (int i = 0; i < size(); ++i) r.img[img[i]] = i;
        return r;
    }

    int parity_sign() const {
        // Sign from cycle structure.
        std::vector<bool> seen(img.size(), false);
        int transpositions = 0;
        for (size_t i = 0; i < img.size(); ++i) {
            if (seen[i]) continue;
            int len = 0;
            for (size_t j = i; !seen[j]; j = img[j]) {
                seen[j] = true;
                ++len;
            }
            transpositions += len - 1;
        }
        return transpositions % 2 ? -1 : 1;
    }
};

// The cycle (1 2 ... ell) in 1-based terms: 1->2->...->ell->1, fixing i > ell.
inline Permutation tau_cycle(int k, int ell) {
    Permutation t(k);
    for (int i = 0; i < ell - 1; ++i) t.img[i] = i + 1;
    t.img[ell - 1] = 0;
    return t;
}

// Element of the group algebra of S_k; zero coefficients never stored.
struct GroupAlgebraElement {
    int k = 0;
    std::map<Permutation, Rational> coefficients;

    void add(const Permutation& p, const Rational& c) {
        if (refdet::is_zero(c)) return;
        auto [it, inserted] = coefficients.emplace(p, c);
        if (!inserted) {
            it->second += c;
            if (refdet::is_zero(it->second)) coefficients.erase(it);
        }
    }

    friend GroupAlgebraElement operator*(const GroupAlgebraElement& a,
                                         const GroupAlgebraElement& b) {
        GroupAlgebraElement r;
        r.k = a.k;
        for (const auto& [pa, ca] : a.coefficients)
            for (const auto& [pb, cb] : b.coefficients) r.add(pa * pb, ca * cb);
        return r;
    }
};

// x_k = -2^k (tau_k - 1)(tau_{k-1} - 1) ... (tau_2 - 1), expanded in the group
// algebra of S_k. Exactly 2^(k-1) terms, all coefficients +-2^k.
inline GroupAlgebraElement x_coefficients(int k) {
    if (k < 2) throw ArityMismatchError("x_k requires k >= 2");
    GroupAlgebraElement acc;
    acc.k = k;
    acc.add(Permutation(k), Rational(1));
    for (int ell = k; ell >= 2; --ell) {
        GroupAlgebraElement factor;
        factor.k = k;
        factor.add(tau_cycle(k, ell), Rational(1));
        factor.add(Permutation(k), Rational(-1));
        acc = acc * factor;
    }
    GroupAlgebraElement result;
    result.k = k;
    Rational scale = -pow2(k);
    for (const auto& [p, c] : acc.coefficients) result.add(p, c * scale);
    return result;
}

}  // namespace refdet
