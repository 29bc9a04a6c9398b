#pragma once

// Dense matrices over any exact field type: concrete field elements or
// rational functions. Everything here is division-exact; there is no
// numerical pivoting, only zero tests. Rank factorization and the kernel
// projection take an explicit pivot selection certified by the caller
// (for symbolic matrices the rank is certified by evaluating at a point,
// never by symbolic elimination).

#include <algorithm>
#include <concepts>
#include <utility>
#include <vector>

#include "prd/errors.hpp"

namespace prd {

template <class K>
concept FieldLike = requires(const K& a, const K& b) {
    { a + b } -> std::convertible_to<K>;
    { a - b } -> std::convertible_to<K>;
    { a* b } -> std::convertible_to<K>;
    { a / b } -> std::convertible_to<K>;
    { -a } -> std::convertible_to<K>;
    { a.is_zero() } -> std::convertible_to<bool>;
    { a.zero_like() } -> std::convertible_to<K>;
    { a.one_like() } -> std::convertible_to<K>;
};

template <FieldLike K>
class Mat {
  public:
    Mat() : rows_(0), cols_(0) {}
    Mat(int rows, int cols, const K& exemplar)
        : rows_(rows), cols_(cols), a_((size_t)rows * cols, exemplar.zero_like()) {}

    static Mat identity(int n, const K& exemplar) {
        Mat m(n, n, exemplar);
        for (int i = 0; i < n; ++i) m.at(i, i) = exemplar.one_like();
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    K& at(int i, int j) { return a_[(size_t)i * cols_ + j]; }
    const K& at(int i, int j) const { return a_[(size_t)i * cols_ + j]; }

    Mat operator*(const Mat& b) const {
        if (cols_ != b.rows_) throw ShapeMismatch("matrix product shape mismatch");
        K z = exemplar();
        Mat out(rows_, b.cols_, z);
        for (int i = 0; i < rows_; ++i)
            for (int k = 0; k < cols_; ++k) {
                const K& aik = at(i, k);
                if (aik.is_zero()) continue;
                for (int j = 0; j < b.cols_; ++j) out.at(i, j) = out.at(i, j) + aik * b.at(k, j);
            }
        return out;
    }

    Mat operator+(const Mat& b) const {
        if (rows_ != b.rows_ || cols_ != b.cols_) throw ShapeMismatch("matrix sum shape mismatch");
        Mat out = *this;
        for (size_t i = 0; i < a_.size(); ++i) out.a_[i] = out.a_[i] + b.a_[i];
        return out;
    }

    Mat operator-(const Mat& b) const {
        if (rows_ != b.rows_ || cols_ != b.cols_) throw ShapeMismatch("matrix diff shape mismatch");
        Mat out = *this;
        for (size_t i = 0; i < a_.size(); ++i) out.a_[i] = out.a_[i] - b.a_[i];
        return out;
    }

    Mat transpose() const {
        Mat out(cols_, rows_, exemplar());
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) out.at(j, i) = at(i, j);
        return out;
    }

    bool is_zero() const {
        for (auto& v : a_)
            if (!v.is_zero()) return false;
        return true;
    }

    Mat submatrix(const std::vector<int>& rows, const std::vector<int>& cols) const {
        Mat out((int)rows.size(), (int)cols.size(), exemplar());
        for (size_t i = 0; i < rows.size(); ++i)
            for (size_t j = 0; j < cols.size(); ++j) out.at((int)i, (int)j) = at(rows[i], cols[j]);
        return out;
    }

    std::vector<K> row(int i) const {
        std::vector<K> out;
        out.reserve(cols_);
        for (int j = 0; j < cols_; ++j) out.push_back(at(i, j));
        return out;
    }

    std::vector<K> col(int j) const {
        std::vector<K> out;
        out.reserve(rows_);
        for (int i = 0; i < rows_; ++i) out.push_back(at(i, j));
        return out;
    }

    // Some valid element to derive zero/one from; matrices of size 0 cannot
    // provide one, callers must pass exemplars explicitly there.
    K exemplar() const {
        if (a_.empty()) throw ShapeMismatch("empty matrix has no exemplar");
        return a_[0].zero_like();
    }

  private:
    int rows_, cols_;
    std::vector<K> a_;
};

struct PivotSelection {
    std::vector<int> rows; // sorted ascending, 0-based
    std::vector<int> cols;
};

// Laplace expansion along the first row. Exact over any field type; intended
// for the small orders that occur here.
template <FieldLike K>
K det(const Mat<K>& m) {
    if (m.rows() != m.cols()) throw ShapeMismatch("determinant of non-square matrix");
    int n = m.rows();
    if (n == 0) throw ShapeMismatch("0x0 determinant needs an exemplar; use det_or_one");
    if (n == 1) return m.at(0, 0);
    K acc = m.exemplar();
    std::vector<int> all_rows, cols;
    for (int i = 1; i < n; ++i) all_rows.push_back(i);
    for (int j = 0; j < n; ++j) {
        if (m.at(0, j).is_zero()) continue;
        cols.clear();
        for (int c = 0; c < n; ++c)
            if (c != j) cols.push_back(c);
        K term = m.at(0, j) * det(m.submatrix(all_rows, cols));
        acc = (j % 2 == 0) ? acc + term : acc - term;
    }
    return acc;
}

// Determinant with the empty-matrix convention det([]) = 1.
template <FieldLike K>
K det_or_one(const Mat<K>& m, const K& exemplar) {
    if (m.rows() == 0) return exemplar.one_like();
    return det(m);
}

// adj(M)[i][j] = (-1)^(i+j) det(M with row j, column i removed), so that
// M * adj(M) = det(M) * I.
template <FieldLike K>
Mat<K> adjugate(const Mat<K>& m) {
    if (m.rows() != m.cols()) throw ShapeMismatch("adjugate of non-square matrix");
    int n = m.rows();
    if (n == 0) return m;
    Mat<K> out(n, n, m.exemplar());
    if (n == 1) {
        out.at(0, 0) = m.exemplar().one_like();
        return out;
    }
    std::vector<int> rows, cols;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            rows.clear();
            cols.clear();
            for (int r = 0; r < n; ++r)
                if (r != j) rows.push_back(r);
            for (int c = 0; c < n; ++c)
                if (c != i) cols.push_back(c);
            K d = det(m.submatrix(rows, cols));
            out.at(i, j) = ((i + j) % 2 == 0) ? d : -d;
        }
    return out;
}

// Greedy pivot search: repeatedly takes the first nonzero entry in row-major
// order of the partially eliminated matrix. Returns sorted row/column sets.
// Throws RankDeficient if fewer than r pivots exist.
template <FieldLike K>
PivotSelection find_pivot(Mat<K> m, int r) {
    PivotSelection piv;
    std::vector<bool> used_row(m.rows(), false), used_col(m.cols(), false);
    for (int step = 0; step < r; ++step) {
        int pi = -1, pj = -1;
        for (int i = 0; i < m.rows() && pi < 0; ++i) {
            if (used_row[i]) continue;
            for (int j = 0; j < m.cols(); ++j) {
                if (used_col[j]) continue;
                if (!m.at(i, j).is_zero()) {
                    pi = i;
                    pj = j;
                    break;
                }
            }
        }
        if (pi < 0) throw RankDeficient("matrix rank below requested " + std::to_string(r));
        used_row[pi] = true;
        used_col[pj] = true;
        piv.rows.push_back(pi);
        piv.cols.push_back(pj);
        for (int i = 0; i < m.rows(); ++i) {
            if (used_row[i] || m.at(i, pj).is_zero()) continue;
            K factor = m.at(i, pj) / m.at(pi, pj);
            for (int j = 0; j < m.cols(); ++j) m.at(i, j) = m.at(i, j) - factor * m.at(pi, j);
        }
    }
    std::sort(piv.rows.begin(), piv.rows.end());
    std::sort(piv.cols.begin(), piv.cols.end());
    return piv;
}

template <FieldLike K>
int rank_of(const Mat<K>& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    int bound = std::min(m.rows(), m.cols());
    // One elimination pass, counting pivots.
    Mat<K> w = m;
    std::vector<bool> used_row(m.rows(), false), used_col(m.cols(), false);
    int rank = 0;
    for (int step = 0; step < bound; ++step) {
        int pi = -1, pj = -1;
        for (int i = 0; i < w.rows() && pi < 0; ++i) {
            if (used_row[i]) continue;
            for (int j = 0; j < w.cols(); ++j) {
                if (used_col[j]) continue;
                if (!w.at(i, j).is_zero()) {
                    pi = i;
                    pj = j;
                    break;
                }
            }
        }
        if (pi < 0) break;
        used_row[pi] = true;
        used_col[pj] = true;
        ++rank;
        for (int i = 0; i < w.rows(); ++i) {
            if (used_row[i] || w.at(i, pj).is_zero()) continue;
            K factor = w.at(i, pj) / w.at(pi, pj);
            for (int j = 0; j < w.cols(); ++j) w.at(i, j) = w.at(i, j) - factor * w.at(pi, j);
        }
    }
    return rank;
}

// A = A1 * A2 for rank(A) = r with invertible pivot block. A1 = columns J of
// A; A2 = det(A_IJ)^-1 adj(A_IJ) A_I. Restricted to columns J, A2 is the
// r x r identity. Throws SingularPivot if det(A_IJ) = 0.
template <FieldLike K>
std::pair<Mat<K>, Mat<K>> rank_factorize(const Mat<K>& a, int r, const PivotSelection& piv) {
    if ((int)piv.rows.size() != r || (int)piv.cols.size() != r)
        throw ShapeMismatch("pivot selection size != r");
    K z = a.rows() > 0 && a.cols() > 0 ? a.exemplar() : throw ShapeMismatch("empty matrix");
    Mat<K> a1(a.rows(), r, z), a2(r, a.cols(), z);
    if (r == 0) return {a1, a2};
    Mat<K> block = a.submatrix(piv.rows, piv.cols);
    K d = det(block);
    if (d.is_zero()) throw SingularPivot("pivot block is singular");
    Mat<K> adj = adjugate(block);
    for (int i = 0; i < a.rows(); ++i)
        for (int t = 0; t < r; ++t) a1.at(i, t) = a.at(i, piv.cols[t]);
    // A2 = adj * A_rows(I) / det
    for (int s = 0; s < r; ++s)
        for (int j = 0; j < a.cols(); ++j) {
            K acc = z.zero_like();
            for (int t = 0; t < r; ++t) acc = acc + adj.at(s, t) * a.at(piv.rows[t], j);
            a2.at(s, j) = acc / d;
        }
    return {a1, a2};
}

// Projection onto ker A: P^2 = P, AP = 0, rank P = n - r, and every row of
// I - P outside the pivot column set is zero.
template <FieldLike K>
Mat<K> kernel_projection(const Mat<K>& a, int r, const PivotSelection& piv) {
    K z = a.rows() > 0 && a.cols() > 0 ? a.exemplar() : throw ShapeMismatch("empty matrix");
    int n = a.cols();
    if (r == 0) return Mat<K>::identity(n, z);
    auto [a1, a2] = rank_factorize(a, r, piv);
    std::vector<bool> in_j(n, false);
    for (int j : piv.cols) in_j[j] = true;
    Mat<K> p(n, n, z);
    for (int c = 0; c < n; ++c) {
        if (in_j[c]) continue; // pivot columns of P stay zero
        p.at(c, c) = z.one_like();
        for (int s = 0; s < r; ++s) p.at(piv.cols[s], c) = -a2.at(s, c);
    }
    return p;
}

// Basis of the right kernel {x : Ax = 0}, deterministic: free columns in
// increasing order, each basis vector has 1 at its free column.
template <FieldLike K>
std::vector<std::vector<K>> kernel_basis(const Mat<K>& a, const K& exemplar) {
    int m = a.rows(), n = a.cols();
    Mat<K> w = a;
    std::vector<int> pivot_row_of_col(n, -1);
    int rank = 0;
    for (int j = 0; j < n && rank < m; ++j) {
        int pi = -1;
        for (int i = rank; i < m; ++i)
            if (!w.at(i, j).is_zero()) {
                pi = i;
                break;
            }
        if (pi < 0) continue;
        // swap rows pi and rank
        if (pi != rank)
            for (int c = 0; c < n; ++c) std::swap(w.at(pi, c), w.at(rank, c));
        K inv = exemplar.one_like() / w.at(rank, j);
        for (int c = 0; c < n; ++c) w.at(rank, c) = w.at(rank, c) * inv;
        for (int i = 0; i < m; ++i) {
            if (i == rank || w.at(i, j).is_zero()) continue;
            K f = w.at(i, j);
            for (int c = 0; c < n; ++c) w.at(i, c) = w.at(i, c) - f * w.at(rank, c);
        }
        pivot_row_of_col[j] = rank;
        ++rank;
    }
    std::vector<std::vector<K>> basis;
    for (int j = 0; j < n; ++j) {
        if (pivot_row_of_col[j] >= 0) continue;
        std::vector<K> v(n, exemplar.zero_like());
        v[j] = exemplar.one_like();
        for (int c = 0; c < n; ++c) {
            int pr = pivot_row_of_col[c];
            if (pr >= 0) v[c] = -w.at(pr, j);
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

} // namespace prd
