#pragma once

#include <optional>
#include <vector>

#include "refdet/errors.hpp"
#include "refdet/matrix.hpp"
#include "refdet/radical.hpp"
#include "refdet/rational.hpp"

namespace refdet {

using VectorQ = std::vector<Rational>;

inline Rational inner(const VectorQ& a, const VectorQ& b) {
    if (a.size() != b.size()) throw DimensionMismatchError("inner product dimension mismatch");
    Rational s(0);
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline bool vector_is_zero(const VectorQ& v) {
    for (const auto& x : v)
        if (!refdet::is_zero(x)) return false;
    return true;
}

inline Matrix<Rational> gram_matrix(const std::vector<VectorQ>& v) {
    const int n = static_cast<int>(v.size());
    for (const auto& x : v)
        if (x.size() != v.front().size())
            throw DimensionMismatchError("gram matrix over mixed dimensions");
    Matrix<Rational> g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            g.at(i, j) = inner(v[i], v[j]);
            g.at(j, i) = g.at(i, j);
        }
    return g;
}

inline int rank_of(std::vector<VectorQ> rows) {
    if (rows.empty()) return 0;
    const size_t dim = rows.front().size();
    int rank = 0;
    size_t col = 0;
    for (; col < dim && rank < static_cast<int>(rows.size()); ++col) {
        int pivot = -1;
        for (size_t i = rank; i < rows.size(); ++i)
            if (!refdet::is_zero(rows[i][col])) {
                pivot = static_cast<int>(i);
                break;
            }
        if (pivot < 0) continue;
        std::swap(rows[rank], rows[pivot]);
        for (size_t i = rank + 1; i < rows.size(); ++i) {
            if (refdet::is_zero(rows[i][col])) continue;
            Rational f = rows[i][col] / rows[rank][col];
            for (size_t j = col; j < dim; ++j) rows[i][j] -= f * rows[rank][j];
        }
        ++rank;
    }
    return rank;
}

// det[(b_i, c_j)] = vol(b) * vol(c), basis-free, exact. Returns 0 when either
// list is linearly dependent; throws when both are full-rank but span
// different subspaces (the product of volumes is undefined there).
inline Rational paired_volume(const std::vector<VectorQ>& b, const std::vector<VectorQ>& c) {
    if (b.size() != c.size()) throw DimensionMismatchError("paired volume needs equal list sizes");
    if (b.empty()) return Rational(1);
    const size_t dim = b.front().size();
    for (const auto& v : b)
        if (v.size() != dim) throw DimensionMismatchError("paired volume over mixed dimensions");
    for (const auto& v : c)
        if (v.size() != dim) throw DimensionMismatchError("paired volume over mixed dimensions");
    const int n = static_cast<int>(b.size());
    if (rank_of(b) < n || rank_of(c) < n) return Rational(0);
    std::vector<VectorQ> both = b;
    both.insert(both.end(), c.begin(), c.end());
    if (rank_of(both) != n) throw SpanMismatchError("vector lists span different subspaces");
    Matrix<Rational> cross(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) cross.at(i, j) = inner(b[i], c[j]);
    return determinant(cross);
}

// Vectors stored raw (unnormalized); unit-length bookkeeping happens at the
// term-assembly layer, which divides by (e,e) once per paired occurrence.
struct VectorSystem {
    int ambient_dim = 0;
    std::vector<VectorQ> vectors;
    std::vector<Rational> norms_sq;
    std::vector<int> reference_basis;  // positions into vectors, orientation anchor

    int count() const { return static_cast<int>(vectors.size()); }
    int span_dim() const { return static_cast<int>(reference_basis.size()); }

    // 1-based access matching the external numbering e_1..e_N.
    const VectorQ& vec(int index1) const { return vectors[index1 - 1]; }
    const Rational& norm_sq(int index1) const { return norms_sq[index1 - 1]; }

    std::vector<VectorQ> reference_vectors() const {
        std::vector<VectorQ> r;
        r.reserve(reference_basis.size());
        for (int i : reference_basis) r.push_back(vectors[i]);
        return r;
    }
};

inline VectorSystem make_system(int ambient_dim, std::vector<VectorQ> vectors,
                                std::optional<std::vector<int>> reference = std::nullopt) {
    VectorSystem s;
    s.ambient_dim = ambient_dim;
    s.vectors = std::move(vectors);
    for (const auto& v : s.vectors) {
        if (static_cast<int>(v.size()) != ambient_dim)
            throw DimensionMismatchError("system vector of wrong dimension");
        if (vector_is_zero(v)) throw ZeroVectorError("system contains a zero vector");
        s.norms_sq.push_back(inner(v, v));
    }
    if (reference) {
        s.reference_basis = *reference;
        std::vector<VectorQ> ref;
        for (int i : s.reference_basis) {
            if (i < 0 || i >= s.count()) throw IndexError("reference basis index out of range");
            ref.push_back(s.vectors[i]);
        }
        if (rank_of(ref) != static_cast<int>(ref.size()))
            throw DependentBasisError("reference basis is linearly dependent");
    } else {
        // First maximal linearly independent subset in index order.
        std::vector<VectorQ> kept;
        for (int i = 0; i < s.count(); ++i) {
            kept.push_back(s.vectors[i]);
            if (rank_of(kept) == static_cast<int>(kept.size()))
                s.reference_basis.push_back(i);
            else
                kept.pop_back();
        }
    }
    return s;
}

// Signed volume of b relative to the orientation fixed by the system's
// reference basis: sign(vol(b) * vol(ref)) * sqrt(det Gram(b)).
inline Radical<Rational> oriented_volume(const std::vector<VectorQ>& b, const VectorSystem& system) {
    if (static_cast<int>(b.size()) != system.span_dim())
        throw DimensionMismatchError("volume needs span-dimension many vectors");
    if (rank_of(b) < static_cast<int>(b.size())) return Radical<Rational>(Rational(0), 1);
    Rational paired = paired_volume(b, system.reference_vectors());
    Rational gram = determinant(gram_matrix(b));
    Radical<Rational> mag = radical_normalize(Rational(1), gram);
    return sign_of(paired) < 0 ? Radical<Rational>(Rational(-mag.coefficient), mag.radicand) : mag;
}

// Matrix M of p restricted to span(basis): p * B = B * M, solved exactly.
template <class R>
Matrix<R> operator_on_subspace(const Matrix<R>& p, const std::vector<VectorQ>& basis) {
    if (!p.square()) throw NonSquareError("operator matrix must be square");
    const int d = p.rows();
    const int m = static_cast<int>(basis.size());
    for (const auto& v : basis)
        if (static_cast<int>(v.size()) != d)
            throw DimensionMismatchError("basis vector of wrong dimension");
    if (rank_of(basis) != m) throw DependentBasisError("basis is linearly dependent");

    // B: d x m rational; Y = p * B over R. Row-reduce [B | Y].
    std::vector<std::vector<Rational>> B(d, std::vector<Rational>(m, Rational(0)));
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < d; ++i) B[i][j] = basis[j][i];
    std::vector<std::vector<R>> Y(d, std::vector<R>(m, R(0)));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < m; ++j) {
            R acc(0);
            for (int k = 0; k < d; ++k) {
                if (refdet::is_zero(B[k][j]) || refdet::is_zero(p.at(i, k))) continue;
                acc += ring_scale(p.at(i, k), B[k][j]);
            }
            Y[i][j] = acc;
        }

    std::vector<int> pivot_row;
    int r = 0;
    for (int col = 0; col < m; ++col) {
        int piv = -1;
        for (int i = r; i < d; ++i)
            if (!refdet::is_zero(B[i][col])) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        std::swap(B[r], B[piv]);
        std::swap(Y[r], Y[piv]);
        Rational inv = Rational(1) / B[r][col];
        for (int j = 0; j < m; ++j) B[r][j] *= inv;
        for (int j = 0; j < m; ++j) Y[r][j] = ring_scale(Y[r][j], inv);
        for (int i = 0; i < d; ++i) {
            if (i == r || refdet::is_zero(B[i][col])) continue;
            Rational f = B[i][col];
            for (int j = 0; j < m; ++j) B[i][j] -= f * B[r][j];
            for (int j = 0; j < m; ++j) Y[i][j] -= ring_scale(Y[r][j], f);
        }
        pivot_row.push_back(r);
        ++r;
    }
    // Rows beyond the pivots carry no basis component; a nonzero image there
    // means p does not map span(basis) into itself.
    for (int i = r; i < d; ++i)
        for (int j = 0; j < m; ++j)
            if (!refdet::is_zero(Y[i][j]))
                throw NotInvariantError("operator does not preserve the subspace");
    Matrix<R> result(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) result.at(i, j) = Y[pivot_row[i]][j];
    return result;
}

}  // namespace refdet
