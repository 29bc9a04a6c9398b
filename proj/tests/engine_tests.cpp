#include <doctest.h>

#include <random>

#include "prd/engine.hpp"
#include "prd/oracles.hpp"

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

// The entrywise decomposition of a tensor: one rank-one term per nonzero
// entry, all on the {axis 0} partition.
PRDecomposition entrywise(const Tensor& t) {
    PRDecomposition dec;
    dec.dims = t.dims();
    int k = t.order();
    Partition s = Partition::from_mask(k, 0b1);
    std::vector<int> udims = dims_subset(t.dims(), s.axes_in());
    std::vector<int> vdims = dims_subset(t.dims(), s.axes_out());
    std::vector<int> idx(k);
    for (size_t f = 0; f < t.size(); ++f) {
        if (t.flat(f).is_zero()) continue;
        t.unflatten(f, idx);
        PRTerm term;
        term.S = s;
        term.u = Tensor(t.field(), udims);
        term.u.set({idx[0]}, t.flat(f));
        term.v = Tensor(t.field(), vdims);
        term.v.set(std::vector<int>(idx.begin() + 1, idx.end()), t.field()->one());
        dec.terms.push_back(std::move(term));
    }
    return dec;
}

// Jacobian of the slice forms as a localized map with trivial denominator.
LocalizedMap jacobian_localized(const Slicing& s) {
    LocalizedMap d;
    d.arity = (unsigned)s.nvars;
    d.shape = {s.m, s.nvars};
    d.pow = 0;
    for (int l = 0; l < s.m; ++l)
        for (int v = 0; v < s.nvars; ++v) d.comp.push_back(s.forms[l].partial((unsigned)v));
    return d;
}

std::vector<Fe> candidate_point(const FieldCtx* f, const PointCandidate& c) {
    std::vector<Fe> x;
    for (uint32_t code : c.x) x.push_back(f->element(code));
    return x;
}

uint64_t budget = 1ull << 24;

} // namespace

TEST_CASE("derivative tensor of a matrix is the matrix") {
    const FieldCtx* F5 = FieldCtx::make(5, 1);
    std::mt19937_64 rng(7);
    Tensor t = random_tensor_local(F5, {3, 4}, rng);
    Tensor d = derivative_tensor(t, 1, 1);
    REQUIRE(d.dims() == std::vector<int>{4, 3});
    for (int l = 0; l < 4; ++l)
        for (int i = 0; i < 3; ++i) CHECK(d.at({l, i}) == t.at({i, l}));
}

TEST_CASE("derivative tensor matches symbolic differentiation of the forms") {
    std::mt19937_64 rng(11);
    for (uint64_t p : {2ull, 7ull}) {
        const FieldCtx* f = FieldCtx::make(p, 1);
        Tensor t = random_tensor_local(f, {2, 2, 2}, rng);
        int axis = 2;
        Slicing s = slice(t, axis);

        RationalMap forms = RationalMap::zeros(f, (unsigned)s.nvars, {s.m});
        for (int l = 0; l < s.m; ++l) forms.comp[l] = RatFunc::from_poly(s.forms[l]);

        // Order 2 is the top derivative for k = 3: constant entries.
        RationalMap d2 = forms.higher_derivative(2);
        Tensor want = derivative_tensor(t, axis, 2);
        std::vector<Fe> anywhere(s.nvars, f->zero());
        std::vector<int> idx(3);
        for (size_t fl = 0; fl < want.size(); ++fl) {
            want.unflatten(fl, idx);
            CHECK(want.flat(fl) == d2.at(idx).eval(anywhere));
        }

        // Order 1 at sample points.
        RationalMap d1 = forms.total_derivative();
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<Fe> x;
            for (int v = 0; v < s.nvars; ++v) x.push_back(f->element(rng() % p));
            Tensor w1 = derivative_tensor(t, axis, 1, x);
            std::vector<int> ij(2);
            for (size_t fl = 0; fl < w1.size(); ++fl) {
                w1.unflatten(fl, ij);
                CHECK(w1.flat(fl) == d1.at(ij).eval(x));
            }
        }
    }
}

TEST_CASE("block restriction undoes the top derivative") {
    std::mt19937_64 rng(13);
    for (uint64_t p : {2ull, 3ull, 5ull}) {
        const FieldCtx* f = FieldCtx::make(p, 1);
        for (const auto& dims : {std::vector<int>{3, 2}, {2, 2, 2}, {2, 3, 2}, {2, 2, 2, 2}}) {
            Tensor t = random_tensor_local(f, dims, rng);
            if (t.is_zero()) continue;
            int k = (int)dims.size();
            for (int axis = 0; axis < k; ++axis) {
                Slicing s = slice(t, axis);
                Tensor big = derivative_tensor(t, axis, (unsigned)(k - 1));
                PRDecomposition dec = restrict_to_blocks(entrywise(big), s);
                VerifyResult vr = verify_decomposition(t, dec);
                CHECK(vr.ok);
            }
        }
    }
}

TEST_CASE("tangent frame matches the rational projection") {
    const FieldCtx* F5 = FieldCtx::make(5, 1);
    Tensor w = wtensor(F5);
    Slicing s = slice(w, 2);
    RegularPointScan scan = find_regular_point(w, 2, budget);
    std::vector<Fe> x0 = candidate_point(F5, scan.candidates[0]);

    TangentFrame fr = tangent_frame(s, x0);
    TangentProjection tp = tangent_projection(s, x0);
    CHECK(fr.codim == tp.codim);
    CHECK(fr.piv.rows == tp.piv.rows);
    CHECK(fr.piv.cols == tp.piv.cols);
    CHECK(!fr.det.eval(x0).is_zero());

    // p_num = det * P and q_num = det * (I - P), entrywise as fractions.
    int n = fr.n;
    RatFunc det = RatFunc::from_poly(fr.det);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            RatFunc pij = tp.P.at(i, j);
            CHECK(RatFunc::from_poly(fr.p_num[(size_t)i * n + j]) == pij * det);
            RatFunc qij = (i == j ? RatFunc::one(F5, (unsigned)n) : RatFunc::zero(F5, (unsigned)n)) - pij;
            CHECK(RatFunc::from_poly(fr.q_num[(size_t)i * n + j]) == qij * det);
        }
}

TEST_CASE("base case factors the Jacobian at the base point") {
    const FieldCtx* F5 = FieldCtx::make(5, 1);
    Tensor w = wtensor(F5);
    Slicing s = slice(w, 2);
    RegularPointScan scan = find_regular_point(w, 2, budget);
    std::vector<Fe> x0 = candidate_point(F5, scan.candidates[0]);
    TangentFrame fr = tangent_frame(s, x0);

    SymbolicPairs h2 = base_case(s, fr);
    CHECK(h2.order == 2);
    REQUIRE(h2.pairs.size() == 1);
    CHECK(h2.pairs[0].size() == (size_t)fr.codim);

    ConstructingElement ce = evaluate_pairs(h2, fr, x0);
    Tensor want = derivative_tensor(w, 2, 1, x0);
    CHECK(ip_apply(F5, ce) == want);

    // The same identity holds at other kernel points where the pivot
    // determinant does not vanish.
    int checked = 0;
    for (const auto& cand : scan.candidates) {
        std::vector<Fe> x = candidate_point(F5, cand);
        if (fr.det.eval(x).is_zero()) continue;
        ConstructingElement cx = evaluate_pairs(h2, fr, x);
        CHECK(ip_apply(F5, cx) == derivative_tensor(w, 2, 1, x));
        ++checked;
    }
    CHECK(checked > 0);
}

TEST_CASE("one induction step reproduces the second derivative") {
    const FieldCtx* F5 = FieldCtx::make(5, 1);
    Tensor w = wtensor(F5);
    Slicing s = slice(w, 2);
    RegularPointScan scan = find_regular_point(w, 2, budget);
    std::vector<Fe> x0 = candidate_point(F5, scan.candidates[0]);
    TangentFrame fr = tangent_frame(s, x0);

    SymbolicPairs h3 = induction_step(base_case(s, fr), fr, jacobian_localized(s));
    CHECK(h3.order == 3);
    REQUIRE(h3.pairs.size() == 3);
    for (const auto& plist : h3.pairs) CHECK(plist.size() == (size_t)fr.codim);

    ConstructingElement ce = evaluate_pairs(h3, fr, x0);
    CHECK(ip_apply(F5, ce) == derivative_tensor(w, 2, 2));
}

TEST_CASE("induction step on random small tensors") {
    const FieldCtx* F7 = FieldCtx::make(7, 1);
    std::mt19937_64 rng(17);
    int done = 0;
    for (int trial = 0; done < 5 && trial < 20; ++trial) {
        Tensor t = random_tensor_local(F7, {2, 2, 2}, rng);
        if (t.is_zero()) continue;
        RegularPointScan scan;
        try {
            scan = find_regular_point(t, 2, budget);
        } catch (const NoPoint&) {
            continue;
        }
        if (scan.max_rank == 0) continue;
        Slicing s = slice(t, 2);
        std::vector<Fe> x0 = candidate_point(F7, scan.candidates[0]);
        TangentFrame fr = tangent_frame(s, x0);
        ConstructingElement ce =
            evaluate_pairs(induction_step(base_case(s, fr), fr, jacobian_localized(s)), fr, x0);
        CHECK(ip_apply(F7, ce) == derivative_tensor(t, 2, 2));
        ++done;
    }
    CHECK(done == 5);
}

TEST_CASE("decompose certifies the W tensor in every small field") {
    for (uint64_t p : {2ull, 3ull, 5ull}) {
        const FieldCtx* f = FieldCtx::make(p, 1);
        Tensor w = wtensor(f);
        Certificate cert = decompose(w);
        CHECK(cert.verified);
        CHECK(cert.r_used == 2);
        CHECK(cert.bound == 6);
        CHECK((int)cert.dec.terms.size() <= 6);
        CHECK(cert.dec.terms.size() >= 2); // PR(W) = 2
        CHECK(verify_decomposition(w, cert.dec).ok);
        CHECK(cert.tensor_hash == tensor_hash(w));
        CHECK(cert.diag.kept_rank == 2);
    }
}

TEST_CASE("decompose: zero tensor and rank-one tensor") {
    const FieldCtx* F3 = FieldCtx::make(3, 1);
    Tensor zero(F3, {2, 2, 2});
    Certificate cz = decompose(zero);
    CHECK(cz.verified);
    CHECK(cz.dec.terms.empty());
    CHECK(cz.bound == 0);

    Tensor ones(F3, {2, 2, 2});
    for (size_t i = 0; i < ones.size(); ++i) ones.flat(i) = F3->one();
    Certificate c1 = decompose(ones);
    CHECK(c1.verified);
    CHECK(c1.r_used == 1);
    CHECK(c1.dec.terms.size() == 1);
}

TEST_CASE("decompose matches matrix rank for k = 2") {
    std::mt19937_64 rng(19);
    for (uint64_t p : {2ull, 3ull, 5ull}) {
        const FieldCtx* f = FieldCtx::make(p, 1);
        for (int trial = 0; trial < 5; ++trial) {
            Tensor m = random_tensor_local(f, {3, 3}, rng);
            int r = rank_of(flatten(m, Partition::from_mask(2, 0b01)));
            Certificate cert = decompose(m);
            CHECK(cert.verified);
            CHECK((int)cert.dec.terms.size() == r);
            CHECK(cert.r_used == r);
        }
    }
}

TEST_CASE("decompose handles degenerate slices and higher order") {
    const FieldCtx* F3 = FieldCtx::make(3, 1);
    std::mt19937_64 rng(23);
    // A tensor with one zero slice along axis 0.
    Tensor t = random_tensor_local(F3, {2, 2, 2}, rng);
    for (int j = 0; j < 2; ++j)
        for (int l = 0; l < 2; ++l) t.set({1, j, l}, F3->zero());
    if (!t.is_zero()) {
        Certificate cert = decompose(t);
        CHECK(cert.verified);
        CHECK(verify_decomposition(t, cert.dec).ok);
    }

    // k = 4 over F2 and F3.
    for (uint64_t p : {2ull, 3ull}) {
        const FieldCtx* f = FieldCtx::make(p, 1);
        Tensor t4 = random_tensor_local(f, {2, 2, 2, 2}, rng);
        if (t4.is_zero()) continue;
        Certificate cert = decompose(t4);
        CHECK(cert.verified);
        CHECK((int)cert.dec.terms.size() <= cert.bound);
        CHECK(verify_decomposition(t4, cert.dec).ok);
    }

    // k = 5 over F2.
    const FieldCtx* F2 = FieldCtx::make(2, 1);
    Tensor t5 = random_tensor_local(F2, {2, 2, 2, 2, 2}, rng);
    if (!t5.is_zero()) {
        Certificate cert = decompose(t5);
        CHECK(cert.verified);
        CHECK((int)cert.dec.terms.size() <= cert.bound);
        CHECK(verify_decomposition(t5, cert.dec).ok);
    }
}

TEST_CASE("decompose failure modes are typed") {
    const FieldCtx* F5 = FieldCtx::make(5, 1);
    std::mt19937_64 rng(29);
    Tensor t = random_tensor_local(F5, {3, 3, 3}, rng);
    EngineConfig tiny;
    tiny.budget = 10;
    CHECK_THROWS_AS(decompose(t, tiny), BudgetExceeded);

    EngineConfig none;
    none.max_candidates = 0;
    CHECK_THROWS_AS(decompose(t, none), AllCandidatesFailed);
}

TEST_CASE("explicit axis choice is honored") {
    const FieldCtx* F5 = FieldCtx::make(5, 1);
    std::mt19937_64 rng(31);
    Tensor t = random_tensor_local(F5, {2, 3, 2}, rng);
    for (int axis = 0; axis < 3; ++axis) {
        EngineConfig cfg;
        cfg.axis = axis;
        Certificate cert = decompose(t, cfg);
        CHECK(cert.axis == axis);
        CHECK(cert.verified);
    }
}
