#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "refdet/errors.hpp"
#include "refdet/polynomial.hpp"
#include "refdet/rational.hpp"

namespace refdet {

// Multi-index (i_1..i_k) with 1-based system indices.
using MultiIndex = std::vector<int>;

inline void for_each_multi_index(int arity, int count, const std::function<void(const MultiIndex&)>& f) {
    MultiIndex j(arity, 1);
    while (true) {
        f(j);
        int pos = arity - 1;
        while (pos >= 0 && j[pos] == count) {
            j[pos] = 1;
            --pos;
        }
        if (pos < 0) return;
        ++j[pos];
    }
}

// Total map from arity-k multi-indices over 1..N to ring elements.
template <class R>
struct WeightAssignment {
    int arity = 0;
    int count = 0;  // N
    std::map<MultiIndex, R> entries;

    const R& get(const MultiIndex& j) const {
        if (static_cast<int>(j.size()) != arity)
            throw ArityMismatchError("multi-index arity mismatch");
        auto it = entries.find(j);
        if (it == entries.end()) throw IndexError("multi-index out of range");
        return it->second;
    }
};

// Fresh indeterminate family[i_1,...,i_k] per multi-index.
inline WeightAssignment<Polynomial> symbolic_weights(const std::string& family, int arity, int count) {
    WeightAssignment<Polynomial> w{arity, count, {}};
    for_each_multi_index(arity, count, [&](const MultiIndex& j) {
        w.entries[j] = Polynomial::variable(family, j);
    });
    return w;
}

template <class R>
WeightAssignment<R> unit_weights(int arity, int count) {
    WeightAssignment<R> w{arity, count, {}};
    for_each_multi_index(arity, count, [&](const MultiIndex& j) { w.entries[j] = R(1); });
    return w;
}

// Implementation-defined std distributions would break byte-identical reports;
// draw via explicit modular reduction instead.
struct DeterministicRng {
    std::mt19937_64 gen;
    explicit DeterministicRng(std::uint64_t seed) : gen(seed) {}

    std::uint64_t next(std::uint64_t bound) { return gen() % bound; }  // [0, bound)

    // Nonzero rational with |numerator| <= bound, 1 <= denominator <= bound.
    Rational rational(std::uint64_t bound) {
        long num = static_cast<long>(next(2 * bound + 1)) - static_cast<long>(bound);
        long den = static_cast<long>(next(bound)) + 1;
        if (num == 0) num = 1;
        return Rational(num, den);
    }
};

inline WeightAssignment<Rational> random_rational_weights(int arity, int count, std::uint64_t seed,
                                                          std::uint64_t bound) {
    WeightAssignment<Rational> w{arity, count, {}};
    DeterministicRng rng(seed);
    for_each_multi_index(arity, count, [&](const MultiIndex& j) { w.entries[j] = rng.rational(bound); });
    return w;
}

// Random rational substitution for every variable of a polynomial family,
// used to re-verify symbolic identities at rational points.
inline std::map<VarKey, Rational> random_substitution(const Polynomial& p, std::uint64_t seed,
                                                      std::uint64_t bound = 7) {
    std::map<VarKey, Rational> sub;
    for (const auto& [m, c] : p.terms())
        for (const auto& [var, exp] : m) sub.emplace(var, Rational(0));
    DeterministicRng rng(seed);
    for (auto& [var, val] : sub) val = rng.rational(bound);
    return sub;
}

}  // namespace refdet
