#include "prd/engine.hpp"

#include <algorithm>

#include "prd/errors.hpp"

namespace prd {

namespace {

// Row-major polynomial matrix, sized for the small pivot blocks used here.
struct PolyMat {
    int rows = 0, cols = 0;
    std::vector<MultiPoly> a;

    PolyMat() = default;
    PolyMat(int r, int c, const MultiPoly& zero) : rows(r), cols(c), a((size_t)r * c, zero) {}
    MultiPoly& at(int i, int j) { return a[(size_t)i * cols + j]; }
    const MultiPoly& at(int i, int j) const { return a[(size_t)i * cols + j]; }
};

MultiPoly poly_det(const PolyMat& m) {
    if (m.rows != m.cols) throw ShapeMismatch("determinant of a nonsquare matrix");
    int n = m.rows;
    if (n == 1) return m.at(0, 0);
    MultiPoly out = MultiPoly::zero(m.a[0].field(), m.a[0].nvars());
    PolyMat minor(n - 1, n - 1, out);
    for (int j = 0; j < n; ++j) {
        if (m.at(0, j).is_zero()) continue;
        for (int i = 1; i < n; ++i)
            for (int c = 0, cc = 0; c < n; ++c)
                if (c != j) minor.at(i - 1, cc++) = m.at(i, c);
        MultiPoly term = m.at(0, j) * poly_det(minor);
        out = (j % 2 == 0) ? out + term : out - term;
    }
    return out;
}

// adj(m) * m = det(m) * I.
PolyMat poly_adjugate(const PolyMat& m) {
    int n = m.rows;
    MultiPoly zero = MultiPoly::zero(m.a[0].field(), m.a[0].nvars());
    PolyMat adj(n, n, zero);
    if (n == 1) {
        adj.at(0, 0) = MultiPoly::constant(m.a[0].field(), m.a[0].nvars(), m.a[0].field()->one());
        return adj;
    }
    PolyMat minor(n - 1, n - 1, zero);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            for (int r = 0, rr = 0; r < n; ++r) {
                if (r == j) continue;
                for (int c = 0, cc = 0; c < n; ++c)
                    if (c != i) minor.at(rr, cc++) = m.at(r, c);
                ++rr;
            }
            MultiPoly cof = poly_det(minor);
            adj.at(i, j) = ((i + j) % 2 == 0) ? cof : -cof;
        }
    return adj;
}

// Slice-form Jacobian as polynomials: entry (l, v) = d forms[l] / d x_v.
PolyMat poly_jacobian(const Slicing& s) {
    MultiPoly zero = MultiPoly::zero(s.field, (unsigned)s.nvars);
    PolyMat jac(s.m, s.nvars, zero);
    for (int l = 0; l < s.m; ++l)
        for (int v = 0; v < s.nvars; ++v) jac.at(l, v) = s.forms[l].partial((unsigned)v);
    return jac;
}

LocalizedMap lm_zeros(const FieldCtx* field, unsigned arity, std::vector<int> shape, int pow) {
    LocalizedMap m;
    m.arity = arity;
    m.shape = std::move(shape);
    size_t total = 1;
    for (int d : m.shape) total *= (size_t)d;
    m.comp.assign(total, MultiPoly::zero(field, arity));
    m.pow = pow;
    return m;
}

// d/dx_j (n / det^s) = (det * dn/dx_j - s * n * d det/dx_j) / det^(s+1);
// composing the derivative axis with P = p_num / det adds one more power.
// For each output column b this is
//   (sum_j dn/dx_j p_num[j][b]) * det - s * n * (sum_j d det/dx_j p_num[j][b])
// over det^(s+2). dp_num[b] caches the inner det sums.
LocalizedMap d_tangent(const LocalizedMap& f, const TangentFrame& fr,
                       const std::vector<MultiPoly>& dp_num, int trunc) {
    int n = fr.n;
    const FieldCtx* field = fr.det.field();
    Fe s_scalar = field->from_int(f.pow);

    LocalizedMap out;
    out.arity = f.arity;
    out.shape = f.shape;
    out.shape.push_back(n);
    out.pow = f.pow + 2;
    out.comp.reserve(f.comp.size() * n);

    MultiPoly det_t = fr.det.truncated(trunc);
    for (const MultiPoly& comp : f.comp) {
        std::vector<MultiPoly> partials(n, MultiPoly::zero(field, f.arity));
        for (int j = 0; j < n; ++j) partials[j] = comp.partial((unsigned)j);
        MultiPoly scomp = comp.scaled(s_scalar);
        for (int b = 0; b < n; ++b) {
            MultiPoly acc = MultiPoly::zero(field, f.arity);
            for (int j = 0; j < n; ++j) {
                if (partials[j].is_zero()) continue;
                const MultiPoly& p = fr.p_num[(size_t)j * n + b];
                if (p.is_zero()) continue;
                acc = acc + (partials[j] * p.truncated(trunc)).truncated(trunc);
            }
            MultiPoly num = (acc * det_t).truncated(trunc);
            if (!scomp.is_zero() && !dp_num[b].is_zero())
                num = num - (scomp * dp_num[b]).truncated(trunc);
            out.comp.push_back(std::move(num));
        }
    }
    return out;
}

std::vector<MultiPoly> det_projection_cache(const TangentFrame& fr, int trunc) {
    int n = fr.n;
    const FieldCtx* field = fr.det.field();
    std::vector<MultiPoly> ddet(n, MultiPoly::zero(field, (unsigned)n));
    for (int j = 0; j < n; ++j) ddet[j] = fr.det.partial((unsigned)j);
    std::vector<MultiPoly> dp(n, MultiPoly::zero(field, (unsigned)n));
    for (int b = 0; b < n; ++b) {
        MultiPoly acc = MultiPoly::zero(field, (unsigned)n);
        for (int j = 0; j < n; ++j) {
            if (ddet[j].is_zero()) continue;
            const MultiPoly& p = fr.p_num[(size_t)j * n + b];
            if (p.is_zero()) continue;
            acc = acc + (ddet[j] * p.truncated(trunc)).truncated(trunc);
        }
        dp[b] = std::move(acc);
    }
    return dp;
}

} // namespace

TangentFrame tangent_frame(const Slicing& s, const std::vector<Fe>& x0) {
    if ((int)x0.size() != s.nvars) throw ShapeMismatch("point length differs from variable count");
    PolyMat jac = poly_jacobian(s);

    Mat<Fe> jac0(s.m, s.nvars, s.field->zero());
    for (int l = 0; l < s.m; ++l)
        for (int v = 0; v < s.nvars; ++v) jac0.at(l, v) = jac.at(l, v).eval(x0);

    TangentFrame fr;
    fr.n = s.nvars;
    fr.codim = rank_of(jac0);
    MultiPoly zero = MultiPoly::zero(s.field, (unsigned)s.nvars);
    MultiPoly one = MultiPoly::constant(s.field, (unsigned)s.nvars, s.field->one());

    if (fr.codim == 0) {
        // Zero Jacobian: P = I exactly.
        fr.det = one;
        fr.p_num.assign((size_t)fr.n * fr.n, zero);
        fr.q_num.assign((size_t)fr.n * fr.n, zero);
        for (int i = 0; i < fr.n; ++i) fr.p_num[(size_t)i * fr.n + i] = one;
        return fr;
    }
    fr.piv = find_pivot(jac0, fr.codim);

    int r = fr.codim;
    PolyMat block(r, r, zero);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) block.at(i, j) = jac.at(fr.piv.rows[i], fr.piv.cols[j]);
    fr.det = poly_det(block);
    if (fr.det.eval(x0).is_zero()) throw SingularPivot("pivot minor vanishes at the base point");
    PolyMat adj = poly_adjugate(block);

    // a2_num = adj(block) * J_rows(I) = det * (row-reduced Jacobian).
    PolyMat a2(r, s.nvars, zero);
    for (int i = 0; i < r; ++i)
        for (int v = 0; v < s.nvars; ++v) {
            MultiPoly acc = zero;
            for (int l = 0; l < r; ++l) acc = acc + adj.at(i, l) * jac.at(fr.piv.rows[l], v);
            a2.at(i, v) = std::move(acc);
        }

    // det * P: pivot columns are zero; non-pivot column c carries det on the
    // diagonal and -a2_num[s][c] at pivot row piv.cols[s].
    fr.p_num.assign((size_t)fr.n * fr.n, zero);
    std::vector<char> is_piv(fr.n, 0);
    for (int c : fr.piv.cols) is_piv[c] = 1;
    for (int c = 0; c < fr.n; ++c) {
        if (is_piv[c]) continue;
        fr.p_num[(size_t)c * fr.n + c] = fr.det;
        for (int sidx = 0; sidx < r; ++sidx)
            fr.p_num[(size_t)fr.piv.cols[sidx] * fr.n + c] = -a2.at(sidx, c);
    }
    // det * (I - P): det on pivot diagonals, +a2_num off the pivot columns.
    fr.q_num.assign((size_t)fr.n * fr.n, zero);
    for (int sidx = 0; sidx < r; ++sidx) {
        int row = fr.piv.cols[sidx];
        for (int c = 0; c < fr.n; ++c) {
            if (is_piv[c]) {
                if (c == row) fr.q_num[(size_t)row * fr.n + c] = fr.det;
            } else {
                fr.q_num[(size_t)row * fr.n + c] = a2.at(sidx, c);
            }
        }
    }
    return fr;
}

std::vector<int> SymbolicPairs::dims() const {
    std::vector<int> d(1, m);
    d.resize((size_t)order, N);
    return d;
}

SymbolicPairs base_case(const Slicing& s, const TangentFrame& fr, int trunc) {
    SymbolicPairs h;
    h.order = 2;
    h.m = s.m;
    h.N = s.nvars;
    h.pairs.resize(1);
    if (fr.codim == 0) return h;

    PolyMat jac = poly_jacobian(s);
    int r = fr.codim;
    MultiPoly zero = MultiPoly::zero(s.field, (unsigned)s.nvars);

    // Recompute a2_num = adj(pivot block) * J_rows(I); DT~ = F1 * (a2_num/det)
    // with F1 the pivot columns of the Jacobian.
    PolyMat block(r, r, zero);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) block.at(i, j) = jac.at(fr.piv.rows[i], fr.piv.cols[j]);
    PolyMat adj = poly_adjugate(block);

    for (int i = 0; i < r; ++i) {
        LocalizedMap u = lm_zeros(s.field, (unsigned)s.nvars, {s.m}, 0);
        for (int l = 0; l < s.m; ++l) u.comp[l] = jac.at(l, fr.piv.cols[i]).truncated(trunc);
        LocalizedMap v = lm_zeros(s.field, (unsigned)s.nvars, {s.nvars}, 1);
        for (int c = 0; c < s.nvars; ++c) {
            MultiPoly acc = zero;
            for (int l = 0; l < r; ++l)
                acc = acc + (adj.at(i, l) * jac.at(fr.piv.rows[l], c)).truncated(trunc);
            v.comp[c] = std::move(acc);
        }
        h.pairs[0].emplace_back(std::move(u), std::move(v));
    }
    return h;
}

SymbolicPairs induction_step(const SymbolicPairs& h, const TangentFrame& fr,
                             const LocalizedMap& deriv, int trunc) {
    int c = h.order;
    SymbolicPairs out;
    out.order = c + 1;
    out.m = h.m;
    out.N = h.N;
    out.pairs.resize((size_t)Partition::count(c + 1));
    std::vector<MultiPoly> dp = det_projection_cache(fr, trunc);

    // Old partition S | S~ of c axes splits in two: the new axis joins the
    // complement (mask unchanged) with pair (u, (Dv)P), or joins S, which in
    // canonical form is the mask of the old complement, with pair (v, (Du)P).
    uint32_t old_full = (1u << (c - 1)) - 1;
    for (uint32_t mask = 1; mask <= old_full; ++mask) {
        uint32_t mask_b = (old_full & ~mask) | (1u << (c - 1));
        for (const auto& [u, v] : h.pairs[mask - 1]) {
            out.pairs[mask - 1].emplace_back(u, d_tangent(v, fr, dp, trunc));
            out.pairs[mask_b - 1].emplace_back(v, d_tangent(u, fr, dp, trunc));
        }
    }

    // Normal directions: det * (I - P) has nonzero rows only at the pivot
    // columns, so (D deriv)(I - P) = sum over pivot columns u of
    // (d_u deriv) (x) (q_num row u / det). These land in the partition
    // separating the new axis from all others.
    if (deriv.pow != 0) throw ShapeMismatch("derivative map must be polynomial");
    uint32_t full = (1u << c) - 1;
    for (int u : fr.piv.cols) {
        LocalizedMap du;
        du.arity = deriv.arity;
        du.shape = deriv.shape;
        du.pow = 0;
        du.comp.reserve(deriv.comp.size());
        for (const MultiPoly& comp : deriv.comp)
            du.comp.push_back(comp.partial((unsigned)u).truncated(trunc));
        LocalizedMap qrow = lm_zeros(fr.det.field(), deriv.arity, {fr.n}, 1);
        for (int j = 0; j < fr.n; ++j)
            qrow.comp[j] = fr.q_num[(size_t)u * fr.n + j].truncated(trunc);
        out.pairs[full - 1].emplace_back(std::move(du), std::move(qrow));
    }
    return out;
}

ConstructingElement evaluate_pairs(const SymbolicPairs& h, const TangentFrame& fr,
                                   const std::vector<Fe>& x0) {
    std::vector<int> dims = h.dims();
    int width = 0;
    for (const auto& plist : h.pairs) width = std::max(width, (int)plist.size());
    ConstructingElement ev = ConstructingElement::empty(dims, width);
    const FieldCtx* field = fr.det.field();
    Fe det_inv = fr.det.eval(x0).inv();

    for (uint32_t mask = 1; mask <= (uint32_t)h.pairs.size(); ++mask) {
        Partition part = Partition::from_mask(h.order, mask);
        std::vector<int> du = dims_subset(dims, part.axes_in());
        std::vector<int> dv = dims_subset(dims, part.axes_out());
        for (const auto& [u, v] : h.pairs[mask - 1]) {
            Tensor tu(field, du), tv(field, dv);
            Fe su = det_inv.pow((uint64_t)u.pow), sv = det_inv.pow((uint64_t)v.pow);
            for (size_t i = 0; i < u.comp.size(); ++i) tu.flat(i) = u.comp[i].eval(x0) * su;
            for (size_t i = 0; i < v.comp.size(); ++i) tv.flat(i) = v.comp[i].eval(x0) * sv;
            ev.pairs[mask - 1].emplace_back(std::move(tu), std::move(tv));
        }
    }
    return ev;
}

Tensor derivative_tensor(const Tensor& t, int axis, unsigned a, const std::vector<Fe>& x) {
    Slicing s = slice(t, axis);
    int nblocks = (int)s.block_dims.size();
    if ((int)a > nblocks) throw ShapeMismatch("derivative order exceeds block count");
    if ((int)a < nblocks && (int)x.size() != s.nvars)
        throw ShapeMismatch("point required below the top derivative order");

    std::vector<int> out_dims(1, s.m);
    out_dims.resize(1 + a, s.nvars);
    Tensor out(t.field(), out_dims);

    int k = t.order();
    std::vector<int> idx(k);
    std::vector<int> choice(a); // block handling each derivative axis
    std::vector<char> used(nblocks);
    std::vector<int> out_idx(1 + a);

    for (size_t f = 0; f < t.size(); ++f) {
        const Fe& coeff = t.flat(f);
        if (coeff.is_zero()) continue;
        t.unflatten(f, idx);

        std::vector<int> var(nblocks);
        for (int b = 0; b < nblocks; ++b)
            var[b] = s.block_offsets[b] + idx[s.block_axes[b]];
        out_idx[0] = idx[axis];

        // Every assignment of derivative axes to distinct blocks; the blocks
        // left over evaluate at x.
        std::fill(used.begin(), used.end(), 0);
        size_t level = 0;
        choice.assign(a, -1);
        while (true) {
            if (level == a) {
                Fe term = coeff;
                for (int b = 0; b < nblocks && !term.is_zero(); ++b)
                    if (!used[b]) term = term * x[var[b]];
                if (!term.is_zero()) {
                    for (unsigned r = 0; r < a; ++r) out_idx[1 + r] = var[choice[r]];
                    out.set(out_idx, out.at(out_idx) + term);
                }
                if (a == 0) break;
                --level;
            }
            int b = choice[level] + 1;
            if (choice[level] >= 0) used[choice[level]] = 0;
            while (b < nblocks && used[b]) ++b;
            if (b == nblocks) {
                choice[level] = -1;
                if (level == 0) break;
                --level;
            } else {
                choice[level] = b;
                used[b] = 1;
                ++level;
                if (level < a) choice[level] = -1;
            }
        }
    }
    return out;
}

namespace {

// Restricts the side tensor of a big-tensor term to the block ranges and
// reorders its axes to ascending original-axis order. big_axes lists the big
// tensor axes the side covers, ascending.
std::pair<Tensor, std::vector<int>> restrict_side(const Tensor& side,
                                                  const std::vector<int>& big_axes,
                                                  const Slicing& s) {
    Tensor cur = side;
    std::vector<int> orig;
    for (size_t pos = 0; pos < big_axes.size(); ++pos) {
        int a = big_axes[pos];
        if (a == 0) {
            orig.push_back(s.axis);
        } else {
            int b = a - 1;
            cur = slice_axis_range(cur, (int)pos, s.block_offsets[b], s.block_dims[b]);
            orig.push_back(s.block_axes[b]);
        }
    }
    std::vector<int> perm(orig.size());
    for (size_t i = 0; i < perm.size(); ++i) perm[i] = (int)i;
    std::sort(perm.begin(), perm.end(), [&](int i, int j) { return orig[i] < orig[j]; });
    std::vector<int> sorted_orig;
    for (int i : perm) sorted_orig.push_back(orig[i]);
    return {permute_axes(cur, perm), sorted_orig};
}

} // namespace

PRDecomposition restrict_to_blocks(const PRDecomposition& big, const Slicing& s) {
    int k = (int)s.orig_dims.size();
    PRDecomposition out;
    out.dims = s.orig_dims;
    for (const PRTerm& term : big.terms) {
        auto [ru, axes_u] = restrict_side(term.u, term.S.axes_in(), s);
        auto [rv, axes_v] = restrict_side(term.v, term.S.axes_out(), s);
        bool swapped = false;
        Partition part = Partition::from_axes(k, axes_u, &swapped);
        PRTerm nt;
        nt.S = part;
        nt.u = swapped ? std::move(rv) : std::move(ru);
        nt.v = swapped ? std::move(ru) : std::move(rv);
        if (nt.u.is_zero() || nt.v.is_zero()) continue;
        out.terms.push_back(std::move(nt));
    }
    return out;
}

Certificate decompose(const Tensor& t, const EngineConfig& cfg) {
    int k = t.order();
    if (k < 2) throw ShapeMismatch("decomposition needs order >= 2");
    set_poly_degree_limit((int)cfg.degree_limit);

    Certificate cert;
    cert.dims = t.dims();
    cert.field = t.field();
    cert.tensor_hash = tensor_hash(t);

    int axis = cfg.axis;
    if (axis < 0) {
        axis = 0;
        for (int a = 1; a < k; ++a)
            if (t.dims()[a] > t.dims()[axis]) axis = a;
    }
    if (axis >= k) throw ShapeMismatch("slice axis out of range");
    cert.axis = axis;

    if (t.is_zero()) {
        cert.dec.dims = t.dims();
        cert.verified = true;
        return cert;
    }

    RegularPointScan scan = find_regular_point(t, axis, cfg.budget, std::max(1, cfg.max_candidates));
    Slicing s = slice(t, axis);
    Tensor big_target = derivative_tensor(t, axis, (unsigned)(k - 1));

    int tried = 0;
    for (const PointCandidate& cand : scan.candidates) {
        if (tried >= cfg.max_candidates) break;
        if (cand.jac_rank == 0) break; // sorted by rank; nothing usable follows
        ++tried;
        std::vector<Fe> x0;
        for (uint32_t code : cand.x) x0.push_back(t.field()->element(code));
        try {
            // Recenter at x0 so truncation by total degree is truncation by
            // Taylor order; the remaining rounds consume k-2 derivatives.
            Slicing sc = s;
            for (MultiPoly& form : sc.forms) form = form.shifted(x0);
            std::vector<Fe> origin(s.nvars, t.field()->zero());

            TangentFrame fr = tangent_frame(sc, origin);
            SymbolicPairs h = base_case(sc, fr, k - 2);

            // D^(c-1)T~ around x0, plain polynomials, for the normal terms.
            LocalizedMap deriv = lm_zeros(t.field(), (unsigned)s.nvars, {s.m, s.nvars}, 0);
            for (int l = 0; l < s.m; ++l)
                for (int v = 0; v < s.nvars; ++v)
                    deriv.comp[(size_t)l * s.nvars + v] = sc.forms[l].partial((unsigned)v);

            for (int c = 2; c < k; ++c) {
                h = induction_step(h, fr, deriv, k - 1 - c);
                if (c + 1 < k) {
                    LocalizedMap next = lm_zeros(t.field(), (unsigned)s.nvars, deriv.shape, 0);
                    next.shape.push_back(s.nvars);
                    next.comp.clear();
                    next.comp.reserve(deriv.comp.size() * s.nvars);
                    for (const MultiPoly& comp : deriv.comp)
                        for (int v = 0; v < s.nvars; ++v)
                            next.comp.push_back(comp.partial((unsigned)v));
                    deriv = std::move(next);
                }
            }

            ConstructingElement ev = evaluate_pairs(h, fr, origin);
            Tensor applied = ip_apply(t.field(), ev);
            if (applied != big_target) {
                cert.diag.note += "pair sum misses the derivative tensor; ";
                continue;
            }
            PRDecomposition dec = restrict_to_blocks(constructing_to_decomposition(ev), s);
            VerifyResult vr = verify_decomposition(t, dec);
            if (!vr.ok) {
                cert.diag.note += "block restriction failed to verify; ";
                continue;
            }
            cert.x0_codes.assign(cand.x.begin(), cand.x.end());
            cert.r_used = fr.codim;
            cert.bound = Partition::count(k) * fr.codim;
            cert.dec = std::move(dec);
            cert.verified = true;
            cert.diag.candidates_tried = tried;
            cert.diag.kept_rank = fr.codim;
            return cert;
        } catch (const Error& e) {
            cert.diag.note += std::string(e.what()) + "; ";
        }
    }
    cert.diag.candidates_tried = tried;
    throw AllCandidatesFailed(cert.diag.note.empty()
                                  ? "no candidate base point produced a verified decomposition"
                                  : cert.diag.note);
}

} // namespace prd
