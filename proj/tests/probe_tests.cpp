#include <doctest.h>

#include <random>

#include "prd/probe.hpp"

using namespace prd;

namespace {

Tensor wtensor(const FieldCtx* f) {
    Tensor t(f, {2, 2, 2});
    t.set({0, 0, 1}, f->one());
    t.set({0, 1, 0}, f->one());
    t.set({1, 0, 0}, f->one());
    return t;
}

Tensor random_tensor_local(const FieldCtx* f, const std::vector<int>& dims,
                           std::mt19937_64& rng) {
    Tensor t(f, dims);
    for (size_t i = 0; i < t.size(); ++i) t.flat(i) = f->element(rng() % f->q());
    return t;
}

Tensor identity_matrix(const FieldCtx* f, int n) {
    Tensor t(f, {n, n});
    for (int i = 0; i < n; ++i) t.set({i, i}, f->one());
    return t;
}

// Block-diagonal direct sum: dims add axis-wise, entries land in the two
// diagonal blocks.
Tensor direct_sum(const Tensor& a, const Tensor& b) {
    int k = a.order();
    std::vector<int> dims(k);
    for (int i = 0; i < k; ++i) dims[i] = a.dims()[i] + b.dims()[i];
    Tensor out(a.field(), dims);
    std::vector<int> idx(k);
    for (size_t f = 0; f < a.size(); ++f) {
        a.unflatten(f, idx);
        out.set(idx, a.flat(f));
    }
    for (size_t f = 0; f < b.size(); ++f) {
        b.unflatten(f, idx);
        std::vector<int> shifted(k);
        for (int i = 0; i < k; ++i) shifted[i] = idx[i] + a.dims()[i];
        out.set(shifted, b.flat(f));
    }
    return out;
}

uint64_t budget = 1ull << 24;

} // namespace

TEST_CASE("W kernel counts are 3q^2 - 2q") {
    for (uint64_t p : {2ull, 3ull, 5ull}) {
        Tensor w = wtensor(FieldCtx::make(p, 1));
        u128 want = 3 * p * p - 2 * p;
        CHECK(count_kernel(w, 2, 1, budget) == want);
        CHECK(count_kernel_serial(w, 2, 1, budget) == want);
    }
    // Extensions of F2: same formula in q_e = 2^e.
    Tensor w2 = wtensor(FieldCtx::make(2, 1));
    for (unsigned e : {2u, 3u, 4u}) {
        uint64_t qe = 1ull << e;
        CHECK(count_kernel(w2, 2, e, budget) == (u128)(3 * qe * qe - 2 * qe));
    }
}

TEST_CASE("linearized and serial counters agree on random tensors") {
    std::mt19937_64 rng(71);
    for (uint64_t p : {2ull, 3ull}) {
        const FieldCtx* f = FieldCtx::make(p, 1);
        for (const auto& dims :
             {std::vector<int>{2, 2, 2}, {2, 3, 2}, {3, 3, 3}, {2, 2, 2, 2}}) {
            Tensor t = random_tensor_local(f, dims, rng);
            for (int axis = 0; axis < (int)dims.size(); ++axis) {
                CHECK(count_kernel(t, axis, 1, budget) ==
                      count_kernel_serial(t, axis, 1, budget));
            }
            CHECK(count_kernel(t, 0, 2, budget) == count_kernel_serial(t, 0, 2, budget));
        }
    }
}

TEST_CASE("kernel enumeration is lexicographic and matches the serial walk") {
    std::mt19937_64 rng(73);
    const FieldCtx* f = FieldCtx::make(3, 1);
    Tensor t = random_tensor_local(f, {2, 3, 2}, rng);
    for (int axis = 0; axis < 3; ++axis) {
        auto fast = enumerate_kernel(t, axis, 1, budget);
        auto serial = enumerate_kernel_serial(t, axis, 1, budget);
        CHECK(fast == serial);
        CHECK((u128)fast.size() == count_kernel(t, axis, 1, budget));
        for (size_t i = 1; i < fast.size(); ++i) CHECK(fast[i - 1] < fast[i]);
        // Every emitted point is in the kernel of every slice form.
        Slicing s = slice(t, axis);
        for (const auto& pt : fast) {
            std::vector<Fe> x;
            for (uint32_t c : pt) x.push_back(f->element(c));
            for (const MultiPoly& form : s.forms) CHECK(form.eval(x).is_zero());
        }
    }
}

TEST_CASE("analytic rank: exact values and axis independence") {
    const FieldCtx* F2 = FieldCtx::make(2, 1);
    Tensor w = wtensor(F2);
    ARValue ar = analytic_rank(w, 2, budget, true); // cross-checks all axes
    CHECK(ar.N == 4);
    CHECK(ar.count == 8);
    CHECK(ar.eq_int(1)); // 8 = 2^(4-1), so AR(W) = 1 exactly over F2
    CHECK(ar.leq(1));
    CHECK(ar.leq(2));
    CHECK(!ar.leq(0));
    CHECK(ar.value() == doctest::Approx(1.0));

    Tensor id3 = identity_matrix(FieldCtx::make(5, 1), 3);
    ARValue m = analytic_rank(id3, 1, budget, true);
    CHECK(m.eq_int(3));
    CHECK(m.count == 1);

    Tensor zero(F2, {2, 2, 2});
    ARValue z = analytic_rank(zero, 0, budget);
    CHECK(z.eq_int(0));
    CHECK(z.count == 16); // q^N, everything is in the kernel

    std::mt19937_64 rng(79);
    for (int trial = 0; trial < 5; ++trial) {
        Tensor t = random_tensor_local(FieldCtx::make(3, 1), {2, 3, 2}, rng);
        analytic_rank(t, 0, budget, true); // throws if any axis disagrees
    }
}

TEST_CASE("kernel counts multiply under direct sum") {
    std::mt19937_64 rng(83);
    const FieldCtx* f = FieldCtx::make(2, 1);
    Tensor a = random_tensor_local(f, {2, 2, 2}, rng);
    Tensor b = random_tensor_local(f, {2, 2, 2}, rng);
    Tensor ab = direct_sum(a, b);
    for (int axis = 0; axis < 3; ++axis)
        CHECK(count_kernel(ab, axis, 1, budget) ==
              count_kernel(a, axis, 1, budget) * count_kernel(b, axis, 1, budget));
}

TEST_CASE("regular point search ranks candidates") {
    const FieldCtx* F5 = FieldCtx::make(5, 1);
    Tensor w = wtensor(F5);
    RegularPointScan scan = find_regular_point(w, 2, budget);
    CHECK(scan.kernel_count == 65);
    CHECK(scan.max_rank == 2);
    REQUIRE(!scan.candidates.empty());
    CHECK(scan.candidates[0].jac_rank == 2);
    for (size_t i = 1; i < scan.candidates.size(); ++i)
        CHECK(scan.candidates[i - 1].jac_rank >= scan.candidates[i].jac_rank);

    // k = 2: the Jacobian is constant, every kernel point has full rank.
    std::mt19937_64 rng(89);
    Tensor m = random_tensor_local(FieldCtx::make(3, 1), {3, 3}, rng);
    Mat<Fe> mat = flatten(m, Partition::from_mask(2, 0b01));
    int r = rank_of(mat);
    if (r > 0) {
        RegularPointScan ms = find_regular_point(m, 1, budget);
        CHECK(ms.max_rank == r);
        for (const auto& c : ms.candidates) CHECK(c.jac_rank == r);
    }

    Tensor zero(F5, {2, 2});
    RegularPointScan zs = find_regular_point(zero, 0, budget);
    CHECK(zs.max_rank == 0);
}

TEST_CASE("dimension estimate: W variety has dim 2, gr 2") {
    for (uint64_t p : {2ull, 3ull, 5ull}) {
        Tensor w = wtensor(FieldCtx::make(p, 1));
        KernelReport rep = estimate_dim(w, 2, 3, budget);
        CHECK(!rep.unstable);
        CHECK(rep.dim_est == 2);
        CHECK(rep.gr_est == 2);
        CHECK(rep.counts.size() == 3);
        // No enumerated point's Jacobian rank may exceed gr_est.
        for (const auto& c : rep.candidates) CHECK(c.jac_rank <= rep.gr_est);
    }
}

TEST_CASE("for matrices AR = GR = rank") {
    std::mt19937_64 rng(97);
    const FieldCtx* f = FieldCtx::make(3, 1);
    for (int trial = 0; trial < 10; ++trial) {
        Tensor m = random_tensor_local(f, {3, 3}, rng);
        int r = rank_of(flatten(m, Partition::from_mask(2, 0b01)));
        ARValue ar = analytic_rank(m, 1, budget);
        CHECK(ar.eq_int(r));
        KernelReport rep = estimate_dim(m, 1, 3, budget);
        CHECK(!rep.unstable);
        CHECK(rep.gr_est == r);
    }
}

TEST_CASE("symbolic Jacobian of the W slices") {
    const FieldCtx* F5 = FieldCtx::make(5, 1);
    Slicing s = slice(wtensor(F5), 2);
    Mat<RatFunc> j = jacobian_map(s);
    REQUIRE(j.rows() == 2);
    REQUIRE(j.cols() == 4);
    auto X = [&](unsigned v) { return RatFunc::variable(F5, 4, v); };
    // f1 = v0 v3 + v1 v2, f2 = v0 v2.
    CHECK(j.at(0, 0) == X(3));
    CHECK(j.at(0, 1) == X(2));
    CHECK(j.at(0, 2) == X(1));
    CHECK(j.at(0, 3) == X(0));
    CHECK(j.at(1, 0) == X(2));
    CHECK(j.at(1, 1).is_zero());
    CHECK(j.at(1, 2) == X(0));
    CHECK(j.at(1, 3).is_zero());
}

TEST_CASE("tangent projection algebra at a regular W point") {
    const FieldCtx* F5 = FieldCtx::make(5, 1);
    Tensor w = wtensor(F5);
    Slicing s = slice(w, 2);
    RegularPointScan scan = find_regular_point(w, 2, budget);
    REQUIRE(scan.candidates[0].jac_rank == 2);
    std::vector<Fe> x0;
    for (uint32_t c : scan.candidates[0].x) x0.push_back(F5->element(c));

    TangentProjection tp = tangent_projection(s, x0);
    CHECK(tp.codim == 2);
    CHECK(!tp.pivot_det.eval(x0).is_zero());

    Mat<RatFunc> j = jacobian_map(s);
    CHECK((j * tp.P).is_zero());
    Mat<RatFunc> p2 = tp.P * tp.P;
    for (int i = 0; i < 4; ++i)
        for (int jj = 0; jj < 4; ++jj) CHECK(p2.at(i, jj) == tp.P.at(i, jj));

    // Evaluate at x0: P is idempotent there and I - P has rank codim with
    // nonzero rows only at pivot columns.
    Mat<Fe> pe(4, 4, F5->zero());
    for (int i = 0; i < 4; ++i)
        for (int jj = 0; jj < 4; ++jj) pe.at(i, jj) = tp.P.at(i, jj).eval(x0);
    Mat<Fe> q = Mat<Fe>::identity(4, F5->zero()) - pe;
    CHECK(rank_of(q) == 2);
    std::vector<bool> is_piv(4, false);
    for (int c : tp.piv.cols) is_piv[c] = true;
    for (int i = 0; i < 4; ++i) {
        if (is_piv[i]) continue;
        for (int jj = 0; jj < 4; ++jj) CHECK(q.at(i, jj).is_zero());
    }
}

TEST_CASE("budget exhaustion reports instead of running forever") {
    const FieldCtx* F5 = FieldCtx::make(5, 1);
    std::mt19937_64 rng(101);
    Tensor t = random_tensor_local(F5, {3, 3, 3}, rng);
    CHECK_THROWS_AS(count_kernel_serial(t, 0, 1, 10), BudgetExceeded);
    CHECK_THROWS_AS(enumerate_kernel(t, 0, 1, 10), BudgetExceeded);
    CHECK_THROWS_AS(estimate_dim(t, 0, 3, 10), BudgetExceeded);
}
