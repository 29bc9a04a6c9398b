#include "prd/probe.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "prd/errors.hpp"

namespace prd {

namespace {

// Largest exponent d with q^d <= limit (q >= 2).
unsigned log_floor(uint64_t q, u128 limit) {
    unsigned d = 0;
    u128 v = 1;
    while (v <= limit / q) {
        v *= q;
        ++d;
    }
    return d;
}

// Whether q^n <= limit without overflowing.
bool pow_fits(uint64_t q, unsigned n, u128 limit) { return n <= log_floor(q, limit); }

u128 pow_u128(uint64_t q, unsigned n) {
    u128 v = 1;
    while (n-- > 0) v *= q;
    return v;
}

// Codes of an assignment to the given variables, advanced like an odometer
// with the last variable fastest; matches lexicographic point order.
bool advance(std::vector<uint32_t>& digits, uint32_t q) {
    for (size_t i = digits.size(); i-- > 0;) {
        if (++digits[i] < q) return true;
        digits[i] = 0;
    }
    return false;
}

// Digits of idx in base q, most significant first.
void decode_index(u128 idx, uint32_t q, std::vector<uint32_t>& digits) {
    for (size_t i = digits.size(); i-- > 0;) {
        digits[i] = (uint32_t)(idx % q);
        idx /= q;
    }
}

// Forward elimination rank of an m x n code matrix (destroys a).
int packed_rank(std::vector<uint32_t>& a, int m, int n, const PackedField* pf) {
    int rank = 0;
    for (int col = 0; col < n && rank < m; ++col) {
        int sel = -1;
        for (int i = rank; i < m; ++i)
            if (a[(size_t)i * n + col] != 0) {
                sel = i;
                break;
            }
        if (sel < 0) continue;
        if (sel != rank)
            for (int j = col; j < n; ++j)
                std::swap(a[(size_t)sel * n + j], a[(size_t)rank * n + j]);
        uint32_t pinv = pf->inv(a[(size_t)rank * n + col]);
        for (int i = rank + 1; i < m; ++i) {
            uint32_t f = a[(size_t)i * n + col];
            if (f == 0) continue;
            uint32_t scale = pf->mul(f, pinv);
            for (int j = col; j < n; ++j)
                a[(size_t)i * n + j] =
                    pf->sub(a[(size_t)i * n + j], pf->mul(scale, a[(size_t)rank * n + j]));
        }
        ++rank;
    }
    return rank;
}

// Reduced row echelon form; returns pivot columns in order.
std::vector<int> packed_rref(std::vector<uint32_t>& a, int m, int n, const PackedField* pf) {
    std::vector<int> pivots;
    int rank = 0;
    for (int col = 0; col < n && rank < m; ++col) {
        int sel = -1;
        for (int i = rank; i < m; ++i)
            if (a[(size_t)i * n + col] != 0) {
                sel = i;
                break;
            }
        if (sel < 0) continue;
        if (sel != rank)
            for (int j = 0; j < n; ++j)
                std::swap(a[(size_t)sel * n + j], a[(size_t)rank * n + j]);
        uint32_t pinv = pf->inv(a[(size_t)rank * n + col]);
        for (int j = 0; j < n; ++j)
            a[(size_t)rank * n + j] = pf->mul(a[(size_t)rank * n + j], pinv);
        for (int i = 0; i < m; ++i) {
            if (i == rank) continue;
            uint32_t f = a[(size_t)i * n + col];
            if (f == 0) continue;
            for (int j = 0; j < n; ++j)
                a[(size_t)i * n + j] =
                    pf->sub(a[(size_t)i * n + j], pf->mul(f, a[(size_t)rank * n + j]));
        }
        pivots.push_back(col);
        ++rank;
    }
    return pivots;
}

// Coefficient matrix of the system restricted to block b at a fixed
// assignment x of the other blocks: M[l][c] collects every term whose block-b
// variable is offset_b + c, weighted by the product over the other blocks.
void build_block_matrix(const PackedSystem& sys, const std::vector<uint32_t>& x, int b,
                        std::vector<uint32_t>& mat) {
    const PackedField* pf = sys.pf;
    int n = sys.block_dims[b];
    int off = sys.block_offsets[b];
    std::fill(mat.begin(), mat.end(), 0u);
    for (const auto& term : sys.terms) {
        uint32_t prod = term.coeff;
        for (int bb = 0; bb < sys.blocks() && prod != 0; ++bb) {
            if (bb == b) continue;
            prod = pf->mul(prod, x[term.var[bb]]);
        }
        if (prod == 0) continue;
        size_t slot = (size_t)term.form * n + (term.var[b] - off);
        mat[slot] = pf->add(mat[slot], prod);
    }
}

// All solutions of the RREF system as block-b code vectors, sorted
// lexicographically. a is the RREF of the m x n coefficient matrix.
void kernel_solutions(const std::vector<uint32_t>& a, int m, int n,
                      const std::vector<int>& pivots, const PackedField* pf,
                      std::vector<std::vector<uint32_t>>& out) {
    (void)m;
    std::vector<char> is_pivot(n, 0);
    for (int c : pivots) is_pivot[c] = 1;
    std::vector<int> free_cols;
    for (int c = 0; c < n; ++c)
        if (!is_pivot[c]) free_cols.push_back(c);

    out.clear();
    std::vector<uint32_t> assign(free_cols.size(), 0);
    std::vector<uint32_t> y(n, 0);
    uint32_t q = pf->q();
    do {
        std::fill(y.begin(), y.end(), 0u);
        for (size_t f = 0; f < free_cols.size(); ++f) y[free_cols[f]] = assign[f];
        for (size_t i = 0; i < pivots.size(); ++i) {
            uint32_t acc = 0;
            for (size_t f = 0; f < free_cols.size(); ++f) {
                if (assign[f] == 0) continue;
                acc = pf->add(acc, pf->mul(a[i * n + free_cols[f]], assign[f]));
            }
            y[pivots[i]] = pf->neg(acc);
        }
        out.push_back(y);
    } while (!assign.empty() && advance(assign, q));
    if (assign.empty() && out.empty()) out.push_back(y);
    std::sort(out.begin(), out.end());
}

int widest_block(const PackedSystem& sys) {
    int b = 0;
    for (int i = 1; i < sys.blocks(); ++i)
        if (sys.block_dims[i] > sys.block_dims[b]) b = i;
    return b;
}

std::vector<int> rest_vars(const PackedSystem& sys, int b) {
    std::vector<int> vars;
    for (int v = 0; v < sys.nvars; ++v)
        if (v < sys.block_offsets[b] || v >= sys.block_offsets[b] + sys.block_dims[b])
            vars.push_back(v);
    return vars;
}

int chunk_count(u128 total) {
    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    u128 want = (u128)threads * 4;
    if (want > total) want = total;
    if (want < 1) want = 1;
    return (int)want;
}

// Linearized count over block b: sum q^(n_b - rank) across the rest space.
u128 count_linearized(const PackedSystem& sys, int b) {
    const PackedField* pf = sys.pf;
    uint32_t q = pf->q();
    int nb = sys.block_dims[b];
    std::vector<int> rest = rest_vars(sys, b);
    u128 total_rest = pow_u128(q, (unsigned)rest.size());

    int nchunks = chunk_count(total_rest);
    std::vector<u128> partial(nchunks, 0);
    u128 per = total_rest / nchunks;
    u128 extra = total_rest % nchunks;

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int c = 0; c < nchunks; ++c) {
        u128 begin = per * c + std::min<u128>(c, extra);
        u128 end = begin + per + (c < (int)extra ? 1 : 0);
        std::vector<uint32_t> digits(rest.size(), 0);
        std::vector<uint32_t> x(sys.nvars, 0);
        std::vector<uint32_t> mat((size_t)sys.m * nb);
        decode_index(begin, q, digits);
        u128 acc = 0;
        for (u128 idx = begin; idx < end; ++idx) {
            for (size_t i = 0; i < rest.size(); ++i) x[rest[i]] = digits[i];
            build_block_matrix(sys, x, b, mat);
            int rank = packed_rank(mat, sys.m, nb, pf);
            acc += pow_u128(q, (unsigned)(nb - rank));
            advance(digits, q);
        }
        partial[c] = acc;
    }

    u128 total = 0;
    for (u128 v : partial) total += v;
    return total;
}

// Jacobian of the packed system at x, as codes: J[l][var] picks up, from each
// term through that variable, the product over the term's other blocks.
void packed_jacobian(const PackedSystem& sys, const std::vector<uint32_t>& x,
                     std::vector<uint32_t>& jac) {
    const PackedField* pf = sys.pf;
    int nb = sys.blocks();
    std::fill(jac.begin(), jac.end(), 0u);
    std::vector<uint32_t> prefix(nb + 1), suffix(nb + 1);
    for (const auto& term : sys.terms) {
        prefix[0] = term.coeff;
        for (int b = 0; b < nb; ++b) prefix[b + 1] = pf->mul(prefix[b], x[term.var[b]]);
        suffix[nb] = 1;
        for (int b = nb; b-- > 0;) suffix[b] = pf->mul(suffix[b + 1], x[term.var[b]]);
        for (int b = 0; b < nb; ++b) {
            uint32_t others = pf->mul(prefix[b], suffix[b + 1]);
            if (others == 0) continue;
            size_t slot = (size_t)term.form * sys.nvars + term.var[b];
            jac[slot] = pf->add(jac[slot], others);
        }
    }
}

} // namespace

PackedSystem PackedSystem::build(const Tensor& t, int axis, unsigned ext, uint64_t budget) {
    if (ext < 1) throw Error("extension degree must be positive");
    const FieldCtx* base = t.field();
    const FieldCtx* big = FieldCtx::make(base->p(), base->e() * ext);

    PackedSystem sys;
    sys.ext_field = big;
    sys.pf = PackedField::get(big, budget);

    int k = t.order();
    if (axis < 0 || axis >= k) throw ShapeMismatch("slice axis out of range");
    sys.m = t.dims()[axis];
    for (int a = 0; a < k; ++a) {
        if (a == axis) continue;
        sys.block_offsets.push_back(sys.nvars);
        sys.block_dims.push_back(t.dims()[a]);
        sys.nvars += t.dims()[a];
    }

    std::vector<int> idx(k);
    for (size_t f = 0; f < t.size(); ++f) {
        const Fe& v = t.flat(f);
        if (v.is_zero()) continue;
        t.unflatten(f, idx);
        Term term;
        term.coeff = sys.pf->embed(v);
        int b = 0;
        for (int a = 0; a < k; ++a) {
            if (a == axis) {
                term.form = idx[a];
                continue;
            }
            term.var.push_back(sys.block_offsets[b] + idx[a]);
            ++b;
        }
        sys.terms.push_back(std::move(term));
    }
    return sys;
}

u128 count_kernel(const Tensor& t, int axis, unsigned ext, uint64_t budget) {
    PackedSystem sys = PackedSystem::build(t, axis, ext, budget);
    uint64_t q = sys.q();
    if (!pow_fits(q, (unsigned)sys.nvars, ~(u128)0 >> 4))
        throw BudgetExceeded("kernel count would overflow");
    int b = widest_block(sys);
    unsigned rest = (unsigned)(sys.nvars - sys.block_dims[b]);
    if (!pow_fits(q, rest, budget))
        throw BudgetExceeded("linearized kernel count exceeds budget");
    return count_linearized(sys, b);
}

u128 count_kernel_serial(const Tensor& t, int axis, unsigned ext, uint64_t budget) {
    PackedSystem sys = PackedSystem::build(t, axis, ext, budget);
    uint64_t q = sys.q();
    if (!pow_fits(q, (unsigned)sys.nvars, budget))
        throw BudgetExceeded("full kernel scan exceeds budget");

    const PackedField* pf = sys.pf;
    std::vector<uint32_t> x(sys.nvars, 0);
    std::vector<uint32_t> acc(sys.m);
    u128 count = 0;
    do {
        std::fill(acc.begin(), acc.end(), 0u);
        for (const auto& term : sys.terms) {
            uint32_t prod = term.coeff;
            for (int b = 0; b < sys.blocks() && prod != 0; ++b) prod = pf->mul(prod, x[term.var[b]]);
            acc[term.form] = pf->add(acc[term.form], prod);
        }
        bool zero = true;
        for (uint32_t a : acc)
            if (a != 0) {
                zero = false;
                break;
            }
        if (zero) ++count;
    } while (sys.nvars > 0 && advance(x, (uint32_t)q));
    return count;
}

std::vector<std::vector<uint32_t>> enumerate_kernel(const Tensor& t, int axis, unsigned ext,
                                                    uint64_t budget) {
    PackedSystem sys = PackedSystem::build(t, axis, ext, budget);
    const PackedField* pf = sys.pf;
    uint32_t q = pf->q();
    if (!pow_fits(q, (unsigned)sys.nvars, budget))
        throw BudgetExceeded("kernel enumeration exceeds budget");

    // Linearize over the last block: its variables are the least significant,
    // so emitting each fixed rest's solutions in sorted order keeps the whole
    // stream lexicographic.
    int b = sys.blocks() - 1;
    int nb = sys.block_dims[b];
    int off = sys.block_offsets[b];
    std::vector<int> rest = rest_vars(sys, b);
    u128 total_rest = pow_u128(q, (unsigned)rest.size());

    int nchunks = chunk_count(total_rest);
    std::vector<std::vector<std::vector<uint32_t>>> chunk_out(nchunks);
    u128 per = total_rest / nchunks;
    u128 extra = total_rest % nchunks;

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int c = 0; c < nchunks; ++c) {
        u128 begin = per * c + std::min<u128>(c, extra);
        u128 end = begin + per + (c < (int)extra ? 1 : 0);
        std::vector<uint32_t> digits(rest.size(), 0);
        std::vector<uint32_t> x(sys.nvars, 0);
        std::vector<uint32_t> mat((size_t)sys.m * nb);
        std::vector<std::vector<uint32_t>> sols;
        decode_index(begin, q, digits);
        auto& out = chunk_out[c];
        for (u128 idx = begin; idx < end; ++idx) {
            for (size_t i = 0; i < rest.size(); ++i) x[rest[i]] = digits[i];
            build_block_matrix(sys, x, b, mat);
            std::vector<int> pivots = packed_rref(mat, sys.m, nb, pf);
            kernel_solutions(mat, sys.m, nb, pivots, pf, sols);
            for (const auto& y : sols) {
                std::vector<uint32_t> point = x;
                for (int j = 0; j < nb; ++j) point[off + j] = y[j];
                out.push_back(std::move(point));
            }
            advance(digits, q);
        }
    }

    std::vector<std::vector<uint32_t>> points;
    for (auto& chunk : chunk_out)
        for (auto& pt : chunk) points.push_back(std::move(pt));
    return points;
}

std::vector<std::vector<uint32_t>> enumerate_kernel_serial(const Tensor& t, int axis,
                                                           unsigned ext, uint64_t budget) {
    PackedSystem sys = PackedSystem::build(t, axis, ext, budget);
    const PackedField* pf = sys.pf;
    uint32_t q = pf->q();
    if (!pow_fits(q, (unsigned)sys.nvars, budget))
        throw BudgetExceeded("kernel enumeration exceeds budget");

    std::vector<std::vector<uint32_t>> points;
    std::vector<uint32_t> x(sys.nvars, 0);
    std::vector<uint32_t> acc(sys.m);
    do {
        std::fill(acc.begin(), acc.end(), 0u);
        for (const auto& term : sys.terms) {
            uint32_t prod = term.coeff;
            for (int b = 0; b < sys.blocks() && prod != 0; ++b) prod = pf->mul(prod, x[term.var[b]]);
            acc[term.form] = pf->add(acc[term.form], prod);
        }
        bool zero = true;
        for (uint32_t a : acc)
            if (a != 0) {
                zero = false;
                break;
            }
        if (zero) points.push_back(x);
    } while (sys.nvars > 0 && advance(x, q));
    return points;
}

double ARValue::value() const {
    long double c = (long double)count;
    return (double)((long double)N - std::log(c) / std::log((long double)q));
}

bool ARValue::leq(int c) const {
    if (c >= N) return true;
    if (c < 0) return false;
    return BigUint(count) >= BigUint::power(q, (unsigned)(N - c));
}

bool ARValue::eq_int(int r) const {
    if (r < 0 || r > N) return false;
    return BigUint(count) == BigUint::power(q, (unsigned)(N - r));
}

ARValue analytic_rank(const Tensor& t, int axis, uint64_t budget, bool check_axes) {
    int k = t.order();
    if (axis < 0 || axis >= k) throw ShapeMismatch("slice axis out of range");
    ARValue ar;
    ar.q = t.field()->q();
    for (int a = 0; a < k; ++a)
        if (a != axis) ar.N += t.dims()[a];
    ar.count = count_kernel(t, axis, 1, budget);

    if (check_axes) {
        BigUint ref = BigUint(ar.count) * BigUint::power(ar.q, (unsigned)t.dims()[axis]);
        for (int a = 0; a < k; ++a) {
            if (a == axis) continue;
            u128 ca = count_kernel(t, a, 1, budget);
            BigUint other = BigUint(ca) * BigUint::power(ar.q, (unsigned)t.dims()[a]);
            if (!(other == ref))
                throw Error("analytic rank differs across slice axes; counting is broken");
        }
    }
    return ar;
}

RegularPointScan find_regular_point(const Tensor& t, int axis, uint64_t budget, int max_keep) {
    PackedSystem sys = PackedSystem::build(t, axis, 1, budget);
    std::vector<std::vector<uint32_t>> points = enumerate_kernel(t, axis, 1, budget);

    const PackedField* pf = sys.pf;
    int maxr = std::min(sys.m, sys.nvars);
    size_t npts = points.size();

    int nchunks = chunk_count((u128)npts);
    size_t per = npts / nchunks, extra = npts % nchunks;
    std::vector<std::vector<std::vector<PointCandidate>>> chunk_buckets(
        nchunks, std::vector<std::vector<PointCandidate>>(maxr + 1));
    std::vector<int> chunk_max(nchunks, 0);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int c = 0; c < nchunks; ++c) {
        size_t begin = per * c + std::min<size_t>(c, extra);
        size_t end = begin + per + ((size_t)c < extra ? 1 : 0);
        std::vector<uint32_t> jac((size_t)sys.m * sys.nvars);
        std::vector<uint32_t> work;
        for (size_t i = begin; i < end; ++i) {
            packed_jacobian(sys, points[i], jac);
            work = jac;
            int rank = packed_rank(work, sys.m, sys.nvars, pf);
            chunk_max[c] = std::max(chunk_max[c], rank);
            auto& bucket = chunk_buckets[c][rank];
            if ((int)bucket.size() < max_keep) bucket.push_back({points[i], rank});
        }
    }

    RegularPointScan scan;
    scan.kernel_count = (u128)npts;
    std::vector<std::vector<PointCandidate>> buckets(maxr + 1);
    for (int c = 0; c < nchunks; ++c) {
        scan.max_rank = std::max(scan.max_rank, chunk_max[c]);
        for (int r = 0; r <= maxr; ++r)
            for (auto& cand : chunk_buckets[c][r])
                if ((int)buckets[r].size() < max_keep) buckets[r].push_back(std::move(cand));
    }
    for (int r = maxr; r >= 0; --r)
        for (auto& cand : buckets[r]) scan.candidates.push_back(std::move(cand));

    if (scan.max_rank == 0 && !t.is_zero())
        throw NoPoint("no kernel point with a nonsingular derivative");
    return scan;
}

namespace {

// round(log_q(c2 / c1)) with exact integer arithmetic; 0 when c2 < c1.
int round_log_ratio(const BigUint& c2, const BigUint& c1, uint64_t q) {
    if (c2 < c1) return 0;
    int d = 0;
    while (c1 * BigUint::power(q, (unsigned)(d + 1)) <= c2) ++d;
    // Round half toward the larger exponent: up when ratio^2 >= q^(2d+1).
    if (c2 * c2 >= c1 * c1 * BigUint::power(q, (unsigned)(2 * d + 1))) ++d;
    return d;
}

} // namespace

KernelReport estimate_dim(const Tensor& t, int axis, unsigned max_ext, uint64_t budget) {
    int k = t.order();
    if (axis < 0 || axis >= k) throw ShapeMismatch("slice axis out of range");
    if (max_ext < 1) throw Error("max_ext must be positive");

    KernelReport rep;
    rep.axis = axis;
    rep.q = t.field()->q();
    int nb_max = 0;
    for (int a = 0; a < k; ++a) {
        if (a == axis) continue;
        rep.N += t.dims()[a];
        nb_max = std::max(nb_max, t.dims()[a]);
    }

    uint64_t table_budget = std::min<uint64_t>(budget, 1ull << 22);
    for (unsigned e = 1; e <= max_ext; ++e) {
        if (!pow_fits(rep.q, e * t.field()->e(), table_budget)) break;
        if (!pow_fits(rep.q, e * (unsigned)(rep.N - nb_max), budget)) break;
        if (!pow_fits(rep.q, e * (unsigned)rep.N, ~(u128)0 >> 4)) break;
        rep.counts.emplace_back(e, count_kernel(t, axis, e, budget));
    }
    if (rep.counts.empty()) throw BudgetExceeded("no extension degree fits the budget");

    std::vector<int> ratios;
    for (size_t i = 0; i + 1 < rep.counts.size(); ++i)
        ratios.push_back(
            round_log_ratio(BigUint(rep.counts[i + 1].second), BigUint(rep.counts[i].second), rep.q));

    if (!ratios.empty()) {
        rep.dim_est = ratios.back();
        for (int r : ratios)
            if (r != rep.dim_est) rep.unstable = true;
    } else {
        rep.dim_est = round_log_ratio(BigUint(rep.counts[0].second), BigUint((u128)1), rep.q);
        rep.unstable = true;
    }
    rep.gr_est = rep.N - rep.dim_est;

    if (pow_fits(rep.q, (unsigned)rep.N, budget)) {
        try {
            rep.candidates = find_regular_point(t, axis, budget, 8).candidates;
        } catch (const NoPoint&) {
            // Report stands on the counts alone.
        }
    }
    return rep;
}

Mat<RatFunc> jacobian_map(const Slicing& s) {
    RatFunc z = RatFunc::zero(s.field, (unsigned)s.nvars);
    Mat<RatFunc> jac(s.m, s.nvars, z);
    for (int l = 0; l < s.m; ++l)
        for (int v = 0; v < s.nvars; ++v)
            jac.at(l, v) = RatFunc::from_poly(s.forms[l].partial((unsigned)v));
    return jac;
}

TangentProjection tangent_projection(const Slicing& s, const std::vector<Fe>& x0) {
    if ((int)x0.size() != s.nvars) throw ShapeMismatch("point length differs from variable count");

    Mat<RatFunc> jac = jacobian_map(s);
    Mat<Fe> jac0(s.m, s.nvars, s.field->zero());
    for (int l = 0; l < s.m; ++l)
        for (int v = 0; v < s.nvars; ++v) jac0.at(l, v) = jac.at(l, v).eval(x0);

    TangentProjection tp;
    tp.codim = rank_of(jac0);
    if (tp.codim > 0) tp.piv = find_pivot(jac0, tp.codim);
    tp.P = kernel_projection(jac, tp.codim, tp.piv);
    if (tp.codim > 0) {
        RatFunc d = det(jac.submatrix(tp.piv.rows, tp.piv.cols));
        tp.pivot_det = d.num();
    } else {
        tp.pivot_det = MultiPoly::constant(s.field, (unsigned)s.nvars, s.field->one());
    }
    return tp;
}

} // namespace prd
