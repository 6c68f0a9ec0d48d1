#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "refdet/enumerate.hpp"
#include "refdet/linalg.hpp"
#include "refdet/matrix.hpp"

namespace refdet {

enum class Family { A, B, D };

inline std::string family_name(Family f) {
    switch (f) {
        case Family::A: return "an";
        case Family::B: return "bn";
        default: return "dn";
    }
}

// Root labels: A_n roots are pairs 0 <= i < j <= n; B_n/D_n roots are signed
// pairs 1 <= i < j <= n plus (for B_n) the coordinate vectors.
struct RootLabel {
    enum Kind { AEdge, Plus, Minus, Loop } kind;
    int i, j;
};

struct RootFamily {
    Family family;
    int rank = 0;
    VectorSystem system;
    std::vector<RootLabel> labels;             // per system position
    std::map<std::pair<int, int>, int> a_index;      // A_n: (i<j) -> 1-based position
    std::map<std::pair<int, int>, int> plus_index;   // B/D: (i<j) -> position
    std::map<std::pair<int, int>, int> minus_index;  // B/D: (i<j) -> position
    std::map<int, int> loop_index;                   // B: i -> position
};

// A_n: raw vectors f_i - f_j in R^(n+1); B_n: f_i +- f_j and f_i in R^n; D_n
// drops the loops. Reference bases are the simple-root chains.
inline RootFamily build_family(Family family, int n) {
    if (n < 1) throw DimensionMismatchError("family rank must be >= 1");
    RootFamily rf;
    rf.family = family;
    rf.rank = n;
    std::vector<VectorQ> vectors;
    std::vector<int> reference;

    if (family == Family::A) {
        const int dim = n + 1;
        for (int i = 0; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j) {
                VectorQ v(dim, Rational(0));
                v[i] = Rational(1);
                v[j] = Rational(-1);
                rf.a_index[{i, j}] = static_cast<int>(vectors.size()) + 1;
                rf.labels.push_back({RootLabel::AEdge, i, j});
                vectors.push_back(std::move(v));
            }
        for (int i = 0; i < n; ++i) reference.push_back(rf.a_index[{i, i + 1}] - 1);
        rf.system = make_system(dim, std::move(vectors), reference);
        return rf;
    }

    const int dim = n;
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) {
            VectorQ plus(dim, Rational(0)), minus(dim, Rational(0));
            plus[i - 1] = Rational(1);
            plus[j - 1] = Rational(1);
            minus[i - 1] = Rational(1);
            minus[j - 1] = Rational(-1);
            rf.plus_index[{i, j}] = static_cast<int>(vectors.size()) + 1;
            rf.labels.push_back({RootLabel::Plus, i, j});
            vectors.push_back(std::move(plus));
            rf.minus_index[{i, j}] = static_cast<int>(vectors.size()) + 1;
            rf.labels.push_back({RootLabel::Minus, i, j});
            vectors.push_back(std::move(minus));
        }
    if (family == Family::B) {
        for (int i = 1; i <= n; ++i) {
            VectorQ loop(dim, Rational(0));
            loop[i - 1] = Rational(1);
            rf.loop_index[i] = static_cast<int>(vectors.size()) + 1;
            rf.labels.push_back({RootLabel::Loop, i, i});
            vectors.push_back(std::move(loop));
        }
    }
    if (n == 1) {
        if (family == Family::D)
            throw DimensionMismatchError("D_1 has no roots");
        reference.push_back(rf.loop_index[1] - 1);
    } else {
        for (int i = 1; i < n; ++i) reference.push_back(rf.minus_index[{i, i + 1}] - 1);
        if (family == Family::B)
            reference.push_back(rf.loop_index[n] - 1);
        else
            reference.push_back(rf.plus_index[{n - 1, n}] - 1);
    }
    rf.system = make_system(dim, std::move(vectors), reference);
    return rf;
}

// Kirchhoff (Laplacian) matrix on vertices 0..n: off-diagonal -w_ij, diagonal
// row sums; equals minus the standard-basis matrix of the arity-1 operator
// with symmetric pair weights.
template <class R>
Matrix<R> kirchhoff_matrix(int n, const std::function<R(int, int)>& pair_weight) {
    Matrix<R> L(n + 1, n + 1);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
            if (i == j) continue;
            R w = pair_weight(std::min(i, j), std::max(i, j));
            L.at(i, j) -= w;
            L.at(i, i) += w;
        }
    return L;
}

// lambda_ijk: full alternation of the adjacent-pair weights over the triple.
template <class R>
R mv_lambda(const std::function<R(int, int, int)>& w, int i, int j, int k) {
    return w(i, j, k) - w(i, k, j) - w(j, i, k) - w(k, j, i) + w(j, k, i) + w(k, i, j);
}

// Skew matrix T on vertices 0..n with t_pq = sum over r of lambda_pqr.
template <class R>
Matrix<R> mv_matrix(int n, const std::function<R(int, int, int)>& w) {
    Matrix<R> T(n + 1, n + 1);
    for (int p = 0; p <= n; ++p)
        for (int q = 0; q <= n; ++q) {
            if (p == q) continue;
            R sum(0);
            for (int r = 0; r <= n; ++r) {
                if (r == p || r == q) continue;
                sum += mv_lambda(w, p, q, r);
            }
            T.at(p, q) = sum;
        }
    return T;
}

// Symmetric B_n matrix: off-diagonal w+_ij - w-_ij, diagonal
// sum_{j != i} (w+_ij + w-_ij) + 2 w_i.
template <class R>
Matrix<R> bn_matrix(int n, const std::function<R(int, int)>& w_plus,
                    const std::function<R(int, int)>& w_minus,
                    const std::function<R(int)>& w_loop) {
    Matrix<R> T(n, n);
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
            if (i == j) continue;
            R wp = w_plus(std::min(i, j), std::max(i, j));
            R wm = w_minus(std::min(i, j), std::max(i, j));
            T.at(i - 1, j - 1) = wp - wm;
            T.at(i - 1, i - 1) += wp + wm;
        }
        T.at(i - 1, i - 1) += ring_scale(w_loop(i), Rational(2));
    }
    return T;
}

}  // namespace refdet
