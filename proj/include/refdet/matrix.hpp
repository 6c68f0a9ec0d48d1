#pragma once

#include <type_traits>
#include <vector>

#include "refdet/errors.hpp"
#include "refdet/polynomial.hpp"
#include "refdet/rational.hpp"

namespace refdet {

// Dense row-major matrix over an exact commutative ring.
template <class R>
class Matrix {
  public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(rows * cols, R(0)) {}

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = R(1);
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    R& at(int i, int j) { return data_[i * cols_ + j]; }
    const R& at(int i, int j) const { return data_[i * cols_ + j]; }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    Matrix& operator+=(const Matrix& o) {
        for (size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        for (size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        Matrix r(a.rows_, b.cols_);
        for (int i = 0; i < a.rows_; ++i)
            for (int k = 0; k < a.cols_; ++k) {
                if (refdet::is_zero(a.at(i, k))) continue;
                for (int j = 0; j < b.cols_; ++j) r.at(i, j) += a.at(i, k) * b.at(k, j);
            }
        return r;
    }

    Matrix transpose() const {
        Matrix r(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
        return r;
    }

    bool is_zero() const {
        for (const auto& v : data_)
            if (!refdet::is_zero(v)) return false;
        return true;
    }

  private:
    int rows_, cols_;
    std::vector<R> data_;
};

template <class R>
Matrix<R> scale(const Matrix<R>& m, const Rational& c) {
    Matrix<R> r(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r.at(i, j) = ring_scale(m.at(i, j), c);
    return r;
}

// acc += c * m, lifting a rational matrix into the accumulator ring.
template <class R>
void accumulate_scaled(Matrix<R>& acc, const Matrix<Rational>& m, const R& c) {
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) {
            if (refdet::is_zero(m.at(i, j))) continue;
            acc.at(i, j) += c * ring_from_rational<R>(m.at(i, j));
        }
}

namespace detail {

template <class R>
R det_cofactor(const Matrix<R>& m, std::vector<int>& cols, int row) {
    const int n = static_cast<int>(cols.size());
    if (n == 0) return R(1);
    if (n == 1) return m.at(row, cols[0]);
    R total(0);
    for (int t = 0; t < n; ++t) {
        int c = cols[t];
        if (refdet::is_zero(m.at(row, c))) continue;
        cols.erase(cols.begin() + t);
        R sub = det_cofactor(m, cols, row + 1);
        cols.insert(cols.begin() + t, c);
        R term = m.at(row, c) * sub;
        if (t % 2)
            total -= term;
        else
            total += term;
    }
    return total;
}

// Fraction-free (Bareiss) elimination with row pivoting; exact over the rationals.
inline Rational det_bareiss(Matrix<Rational> m) {
    const int n = m.rows();
    Rational prev(1);
    int sign = 1;
    for (int k = 0; k + 1 < n; ++k) {
        if (refdet::is_zero(m.at(k, k))) {
            int p = -1;
            for (int i = k + 1; i < n; ++i)
                if (!refdet::is_zero(m.at(i, k))) {
                    p = i;
                    break;
                }
            if (p < 0) return Rational(0);
            for (int j = 0; j < n; ++j) std::swap(m.at(k, j), m.at(p, j));
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j)
                m.at(i, j) = (m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j)) / prev;
        prev = m.at(k, k);
    }
    Rational d = m.at(n - 1, n - 1);
    return sign < 0 ? Rational(-d) : d;
}

}  // namespace detail

// Cofactor expansion up to 4x4; fraction-free elimination for larger rational
// matrices; expansion for larger matrices over other rings.
template <class R>
R determinant(const Matrix<R>& m) {
    if (!m.square()) throw NonSquareError("determinant of non-square matrix");
    const int n = m.rows();
    if (n == 0) return R(1);
    if constexpr (std::is_same_v<R, Rational>) {
        if (n > 4) return detail::det_bareiss(m);
    }
    std::vector<int> cols(n);
    for (int i = 0; i < n; ++i) cols[i] = i;
    return detail::det_cofactor(m, cols, 0);
}

namespace detail {

template <class R>
R pf_expand(const Matrix<R>& m, std::vector<int>& idx) {
    const int n = static_cast<int>(idx.size());
    if (n == 0) return R(1);
    R total(0);
    const int first = idx[0];
    for (int t = 1; t < n; ++t) {
        const R& a = m.at(first, idx[t]);
        if (refdet::is_zero(a)) continue;
        std::vector<int> rest;
        rest.reserve(n - 2);
        for (int s = 1; s < n; ++s)
            if (s != t) rest.push_back(idx[s]);
        R term = a * pf_expand(m, rest);
        if (t % 2)
            total += term;
        else
            total -= term;
    }
    return total;
}

}  // namespace detail

// Pf with the convention Pf([[0,a],[-a,0]]) = a; requires exact skew-symmetry.
template <class R>
R pfaffian(const Matrix<R>& m) {
    if (!m.square()) throw NonSquareError("pfaffian of non-square matrix");
    const int n = m.rows();
    if (n % 2) throw OddSizeError("pfaffian of odd-size matrix");
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            if (!refdet::is_zero(m.at(i, j) + m.at(j, i)))
                throw NotSkewSymmetricError("matrix is not skew-symmetric");
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    return detail::pf_expand(m, idx);
}

template <class R>
Matrix<R> principal_submatrix(const Matrix<R>& m, int remove_index) {
    if (!m.square()) throw NonSquareError("principal submatrix of non-square matrix");
    if (remove_index < 0 || remove_index >= m.rows())
        throw IndexError("principal submatrix index out of range");
    Matrix<R> r(m.rows() - 1, m.cols() - 1);
    for (int i = 0, ri = 0; i < m.rows(); ++i) {
        if (i == remove_index) continue;
        for (int j = 0, rj = 0; j < m.cols(); ++j) {
            if (j == remove_index) continue;
            r.at(ri, rj) = m.at(i, j);
            ++rj;
        }
        ++ri;
    }
    return r;
}

}  // namespace refdet
