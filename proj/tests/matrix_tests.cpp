#include <doctest.h>

#include <random>

#include "prd/matrix.hpp"
#include "prd/multipoly.hpp"

using namespace prd;

namespace {

// Random m x n matrix of a prescribed rank: product of random m x r and
// r x n full-rank-ish factors, retried until the rank is exact.
Mat<Fe> random_rank_matrix(const FieldCtx* f, int m, int n, int r, std::mt19937_64& rng) {
    for (;;) {
        Mat<Fe> a(m, r > 0 ? r : 1, f->zero()), b(r > 0 ? r : 1, n, f->zero());
        if (r == 0) return Mat<Fe>(m, n, f->zero());
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < r; ++j) a.at(i, j) = f->element(rng() % f->q());
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < n; ++j) b.at(i, j) = f->element(rng() % f->q());
        Mat<Fe> prod = a * b;
        if (rank_of(prod) == r) return prod;
    }
}

} // namespace

TEST_CASE("determinant and adjugate identity") {
    const FieldCtx* F7 = FieldCtx::make(7, 1);
    std::mt19937_64 rng(3);
    for (int n = 1; n <= 4; ++n) {
        for (int trial = 0; trial < 10; ++trial) {
            Mat<Fe> m(n, n, F7->zero());
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) m.at(i, j) = F7->element(rng() % 7);
            Fe d = det(m);
            Mat<Fe> prod = m * adjugate(m);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) CHECK(prod.at(i, j) == (i == j ? d : F7->zero()));
        }
    }
    Mat<Fe> empty;
    CHECK(det_or_one(empty, F7->zero()).is_one());
}

TEST_CASE("greedy pivot takes the first nonzero in row-major order") {
    const FieldCtx* F5 = FieldCtx::make(5, 1);
    Mat<Fe> m(2, 2, F5->zero());
    m.at(0, 1) = F5->one();
    m.at(1, 0) = F5->one();
    PivotSelection piv = find_pivot(m, 1);
    CHECK(piv.rows == std::vector<int>{0});
    CHECK(piv.cols == std::vector<int>{1});
    piv = find_pivot(m, 2);
    CHECK(piv.rows == std::vector<int>{0, 1});
    CHECK(piv.cols == std::vector<int>{0, 1});
    CHECK_THROWS_AS(find_pivot(m, 3), RankDeficient);
}

TEST_CASE("rank factorization properties over concrete fields") {
    std::mt19937_64 rng(5);
    for (uint64_t p : {2ull, 5ull}) {
        const FieldCtx* f = FieldCtx::make(p, 1);
        for (int trial = 0; trial < 40; ++trial) {
            int m = 1 + (int)(rng() % 5), n = 1 + (int)(rng() % 5);
            int r = (int)(rng() % (std::min(m, n) + 1));
            Mat<Fe> a = random_rank_matrix(f, m, n, r, rng);
            REQUIRE(rank_of(a) == r);
            if (r == 0) continue;
            PivotSelection piv = find_pivot(a, r);
            auto [a1, a2] = rank_factorize(a, r, piv);
            // A = A1 A2 with inner dimension r.
            Mat<Fe> back = a1 * a2;
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < n; ++j) CHECK(back.at(i, j) == a.at(i, j));
            // A2 restricted to the pivot columns is the identity.
            Mat<Fe> id = a2.submatrix([&] {
                std::vector<int> all;
                for (int i = 0; i < r; ++i) all.push_back(i);
                return all;
            }(), piv.cols);
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < r; ++j)
                    CHECK(id.at(i, j) == (i == j ? f->one() : f->zero()));
        }
    }
}

TEST_CASE("kernel projection properties over concrete fields") {
    std::mt19937_64 rng(9);
    const FieldCtx* f = FieldCtx::make(3, 1);
    for (int trial = 0; trial < 40; ++trial) {
        int m = 1 + (int)(rng() % 4), n = 1 + (int)(rng() % 5);
        int r = (int)(rng() % (std::min(m, n) + 1));
        Mat<Fe> a = random_rank_matrix(f, m, n, r, rng);
        REQUIRE(rank_of(a) == r);
        PivotSelection piv = r > 0 ? find_pivot(a, r) : PivotSelection{};
        Mat<Fe> p = kernel_projection(a, r, piv);
        Mat<Fe> p2 = p * p;
        Mat<Fe> ap = a * p;
        CHECK(ap.is_zero());
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) CHECK(p2.at(i, j) == p.at(i, j));
        CHECK(rank_of(p) == n - r);
        // I - P has nonzero rows only at pivot columns.
        Mat<Fe> q = Mat<Fe>::identity(n, f->zero()) - p;
        std::vector<bool> is_piv(n, false);
        for (int c : piv.cols) is_piv[c] = true;
        for (int i = 0; i < n; ++i) {
            if (is_piv[i]) continue;
            for (int j = 0; j < n; ++j) CHECK(q.at(i, j).is_zero());
        }
    }
}

TEST_CASE("kernel basis spans the kernel") {
    const FieldCtx* f = FieldCtx::make(5, 1);
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        int m = 1 + (int)(rng() % 3), n = 1 + (int)(rng() % 4);
        Mat<Fe> a(m, n, f->zero());
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) a.at(i, j) = f->element(rng() % 5);
        auto basis = kernel_basis(a, f->zero());
        CHECK((int)basis.size() == n - rank_of(a));
        for (const auto& v : basis)
            for (int i = 0; i < m; ++i) {
                Fe acc = f->zero();
                for (int j = 0; j < n; ++j) acc += a.at(i, j) * v[j];
                CHECK(acc.is_zero());
            }
    }
}

TEST_CASE("symbolic rank factorization and projection") {
    // Entries are polynomials; identities must hold as rational functions.
    const FieldCtx* F5 = FieldCtx::make(5, 1);
    auto X = [&](unsigned j) { return RatFunc::variable(F5, 2, j); };
    RatFunc one = RatFunc::one(F5, 2), zero = RatFunc::zero(F5, 2);

    Mat<RatFunc> a(2, 3, zero);
    a.at(0, 0) = X(0);
    a.at(0, 1) = X(1);
    a.at(0, 2) = one;
    a.at(1, 0) = X(0) * X(1);
    a.at(1, 1) = X(1) * X(1);
    a.at(1, 2) = X(1); // row 1 = x1 * row 0, so generic rank 1
    int r = 1;
    PivotSelection piv{{0}, {0}};
    auto [a1, a2] = rank_factorize(a, r, piv);
    Mat<RatFunc> back = a1 * a2;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j) CHECK(back.at(i, j) == a.at(i, j));
    Mat<RatFunc> p = kernel_projection(a, r, piv);
    CHECK((a * p).is_zero());
    Mat<RatFunc> p2 = p * p;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(p2.at(i, j) == p.at(i, j));
}
