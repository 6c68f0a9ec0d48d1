#pragma once

#include <vector>

#include "refdet/linalg.hpp"
#include "refdet/matrix.hpp"
#include "refdet/permutation.hpp"
#include "refdet/weights.hpp"

namespace refdet {

// s(v) = v - 2 (e,v) e / (e,e): normalization-free, so raw vectors give the
// same reflection as their unit rescalings.
inline Matrix<Rational> reflection_matrix(const VectorQ& e) {
    if (vector_is_zero(e)) throw ZeroVectorError("reflection about zero vector");
    const int d = static_cast<int>(e.size());
    Rational nn = inner(e, e);
    Matrix<Rational> s = Matrix<Rational>::identity(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) s.at(i, j) -= Rational(2) * e[i] * e[j] / nn;
    return s;
}

// Q(v) = (v,e_1)(e_1,e_2)...(e_{k-1},e_k) e_k for unit vectors; computed on raw
// vectors and divided by (e_i,e_i) once per tuple slot, since every slot's
// vector occurs exactly twice in the raw expression.
inline Matrix<Rational> q_operator(const std::vector<VectorQ>& tuple) {
    if (tuple.empty()) throw DimensionMismatchError("q_operator needs a nonempty tuple");
    const int d = static_cast<int>(tuple.front().size());
    for (const auto& v : tuple)
        if (static_cast<int>(v.size()) != d)
            throw DimensionMismatchError("q_operator over mixed dimensions");
    Rational chain(1);
    for (size_t s = 0; s + 1 < tuple.size(); ++s) chain *= inner(tuple[s], tuple[s + 1]);
    Rational denom(1);
    for (const auto& v : tuple) denom *= inner(v, v);
    const VectorQ& first = tuple.front();
    const VectorQ& last = tuple.back();
    Matrix<Rational> q(d, d);
    if (refdet::is_zero(chain)) return q;
    Rational factor = chain / denom;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) q.at(i, j) = factor * last[i] * first[j];
    return q;
}

// u_{j_1..j_k} = sum_sigma a_k(sigma) w_{j_sigma(1),...,j_sigma(k)}; u_i = w_i
// for k = 1. Validated against the nested-commutator route, which pins the
// composition and action conventions observably.
template <class R>
R u_from_w(const WeightAssignment<R>& w, const MultiIndex& j, const GroupAlgebraElement& xk) {
    if (static_cast<int>(j.size()) != w.arity) throw ArityMismatchError("u_from_w arity mismatch");
    if (w.arity == 1) return w.get(j);
    R total(0);
    MultiIndex permuted(j.size());
    for (const auto& [sigma, a] : xk.coefficients) {
        for (size_t t = 0; t < j.size(); ++t) permuted[t] = j[sigma(static_cast<int>(t))];
        total += ring_scale(w.get(permuted), a);
    }
    return total;
}

template <class R>
R u_from_w(const WeightAssignment<R>& w, const MultiIndex& j) {
    if (w.arity == 1) return w.get(j);
    return u_from_w(w, j, x_coefficients(w.arity));
}

// Precomputed table of u over all multi-indices.
template <class R>
WeightAssignment<R> u_table(const WeightAssignment<R>& w) {
    WeightAssignment<R> u{w.arity, w.count, {}};
    if (w.arity == 1) {
        u.entries = w.entries;
        return u;
    }
    GroupAlgebraElement xk = x_coefficients(w.arity);
    for_each_multi_index(w.arity, w.count, [&](const MultiIndex& j) {
        u.entries[j] = u_from_w(w, j, xk);
    });
    return u;
}

// P_w^(k) = sum over multi-indices of w_{i_1..i_k} [s_{i_k},[...,[s_{i_2},s_{i_1}]...];
// for k = 1 it is sum w_i (I - s_i).
template <class R>
Matrix<R> build_p_nested(const VectorSystem& system, const WeightAssignment<R>& w, int k) {
    const int d = system.ambient_dim;
    const int N = system.count();
    std::vector<Matrix<Rational>> s;
    s.reserve(N);
    for (int i = 0; i < N; ++i) s.push_back(reflection_matrix(system.vectors[i]));

    Matrix<R> p(d, d);
    if (k == 1) {
        Matrix<Rational> ident = Matrix<Rational>::identity(d);
        for (int i = 1; i <= N; ++i) accumulate_scaled(p, ident - s[i - 1], w.get({i}));
        return p;
    }
    // DFS over multi-indices sharing nested-commutator prefixes:
    // comm(i_1..i_t) = [s_{i_t}, comm(i_1..i_{t-1})].
    MultiIndex j(k);
    auto recurse = [&](auto&& self, int depth, const Matrix<Rational>& comm) -> void {
        if (depth == k) {
            accumulate_scaled(p, comm, w.get(j));
            return;
        }
        for (int i = 1; i <= N; ++i) {
            j[depth] = i;
            self(self, depth + 1, s[i - 1] * comm - comm * s[i - 1]);
        }
    };
    for (int i = 1; i <= N; ++i) {
        j[0] = i;
        recurse(recurse, 1, s[i - 1]);
    }
    return p;
}

// Same operator assembled as sum_j u_j Q(e_{j_1},...,e_{j_k}); the equality
// with build_p_nested is asserted in tests, never assumed.
template <class R>
Matrix<R> build_p_via_q(const VectorSystem& system, const WeightAssignment<R>& w, int k) {
    const int d = system.ambient_dim;
    const int N = system.count();
    Matrix<R> p(d, d);
    if (k == 1) {
        for (int i = 1; i <= N; ++i) {
            Matrix<Rational> q = q_operator({system.vec(i), system.vec(i)});
            accumulate_scaled(p, q, ring_scale(w.get({i}), Rational(2)));
        }
        return p;
    }
    WeightAssignment<R> u = u_table(w);
    for_each_multi_index(k, N, [&](const MultiIndex& j) {
        const R& uj = u.get(j);
        if (refdet::is_zero(uj)) return;
        std::vector<VectorQ> tuple;
        tuple.reserve(k);
        for (int idx : j) tuple.push_back(system.vec(idx));
        accumulate_scaled(p, q_operator(tuple), uj);
    });
    return p;
}

}  // namespace refdet
