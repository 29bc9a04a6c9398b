#include "prd/oracles.hpp"

#include <algorithm>

#include "prd/errors.hpp"
#include "prd/packed_field.hpp"

namespace prd {

namespace {

// Rank of an m x n code matrix by forward elimination (destroys a).
int code_rank(std::vector<uint32_t>& a, int m, int n, const PackedField* pf) {
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

// Search state on packed codes: per partition mask, the flat offsets of every
// u-side and v-side multi-index into the full tensor.
struct SearchCtx {
    const PackedField* pf = nullptr;
    int k = 0;
    uint32_t q = 0;
    std::vector<uint32_t> a; // tensor codes, row-major
    struct MaskGeom {
        std::vector<size_t> uofs, vofs;
    };
    std::vector<MaskGeom> geom; // indexed by mask-1
};

std::vector<size_t> side_offsets(const std::vector<int>& dims, const std::vector<int>& axes) {
    std::vector<size_t> strides(dims.size(), 1);
    for (size_t i = dims.size() - 1; i-- > 0;) strides[i] = strides[i + 1] * dims[i + 1];
    size_t total = 1;
    for (int ax : axes) total *= (size_t)dims[ax];
    std::vector<size_t> ofs(total, 0);
    std::vector<int> idx(axes.size(), 0);
    for (size_t f = 0; f < total; ++f) {
        size_t o = 0;
        for (size_t i = 0; i < axes.size(); ++i) o += (size_t)idx[i] * strides[axes[i]];
        ofs[f] = o;
        for (size_t i = axes.size(); i-- > 0;) {
            if (++idx[i] < dims[axes[i]]) break;
            idx[i] = 0;
        }
    }
    return ofs;
}

SearchCtx make_ctx(const Tensor& t, uint64_t budget) {
    SearchCtx ctx;
    ctx.pf = PackedField::get(t.field(), budget);
    ctx.k = t.order();
    ctx.q = (uint32_t)t.field()->q();
    ctx.a.resize(t.size());
    for (size_t i = 0; i < t.size(); ++i) ctx.a[i] = (uint32_t)t.field()->code(t.flat(i));
    int nmasks = Partition::count(ctx.k);
    ctx.geom.resize(nmasks);
    for (int mask = 1; mask <= nmasks; ++mask) {
        Partition p = Partition::from_mask(ctx.k, (uint32_t)mask);
        ctx.geom[mask - 1].uofs = side_offsets(t.dims(), p.axes_in());
        ctx.geom[mask - 1].vofs = side_offsets(t.dims(), p.axes_out());
    }
    return ctx;
}

bool all_zero(const std::vector<uint32_t>& a) {
    for (uint32_t v : a)
        if (v) return false;
    return true;
}

// PR <= 1 on codes: some flattening has rank 1.
bool leq_one_packed(const SearchCtx& ctx) {
    for (const auto& g : ctx.geom) {
        int m = (int)g.uofs.size(), n = (int)g.vofs.size();
        std::vector<uint32_t> flat((size_t)m * n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) flat[(size_t)i * n + j] = ctx.a[g.uofs[i] + g.vofs[j]];
        if (code_rank(flat, m, n, ctx.pf) == 1) return true;
    }
    return false;
}

struct Triple {
    uint32_t mask = 1;
    uint64_t ucode = 0;
    uint64_t vcode = 0;
};

// Digits of code in base q, index 0 least significant = last side index
// varying fastest; the side arrays are filled with index 0 as the leading
// coordinate, so digit extraction runs from the high end.
void code_digits(uint64_t code, uint32_t q, std::vector<uint32_t>& d) {
    for (size_t i = d.size(); i-- > 0;) {
        d[i] = (uint32_t)(code % q);
        code /= q;
    }
}

// Depth-first search for a decomposition into at most r terms whose triples
// are nondecreasing from `min`. Subtractions are undone on backtrack.
bool search(SearchCtx& ctx, int r, const Triple& min, uint64_t& used, uint64_t budget) {
    if (all_zero(ctx.a)) return true;
    if (r <= 0) return false;
    if (r == 1) return leq_one_packed(ctx);

    const PackedField* pf = ctx.pf;
    uint32_t q = ctx.q;
    int nmasks = (int)ctx.geom.size();
    for (uint32_t mask = min.mask; mask <= (uint32_t)nmasks; ++mask) {
        const auto& g = ctx.geom[mask - 1];
        size_t su = g.uofs.size(), sv = g.vofs.size();
        uint64_t umax = 1, vmax = 1;
        for (size_t i = 0; i < su; ++i) umax *= q;
        for (size_t i = 0; i < sv; ++i) vmax *= q;
        std::vector<uint32_t> ud(su), vd(sv);

        uint64_t ustart = (mask == min.mask) ? std::max<uint64_t>(min.ucode, 1) : 1;
        for (uint64_t ucode = ustart; ucode < umax; ++ucode) {
            code_digits(ucode, q, ud);
            uint32_t lead = 0;
            for (uint32_t d : ud)
                if (d) {
                    lead = d;
                    break;
                }
            if (lead != 1) continue;

            uint64_t vstart = (mask == min.mask && ucode == min.ucode)
                                  ? std::max<uint64_t>(min.vcode, 1)
                                  : 1;
            for (uint64_t vcode = vstart; vcode < vmax; ++vcode) {
                code_digits(vcode, q, vd);
                if (++used > budget) throw BudgetExceeded("partition rank search budget");
                for (size_t i = 0; i < su; ++i) {
                    if (ud[i] == 0) continue;
                    for (size_t j = 0; j < sv; ++j) {
                        if (vd[j] == 0) continue;
                        size_t o = g.uofs[i] + g.vofs[j];
                        ctx.a[o] = pf->sub(ctx.a[o], pf->mul(ud[i], vd[j]));
                    }
                }
                if (search(ctx, r - 1, {mask, ucode, vcode}, used, budget)) return true;
                for (size_t i = 0; i < su; ++i) {
                    if (ud[i] == 0) continue;
                    for (size_t j = 0; j < sv; ++j) {
                        if (vd[j] == 0) continue;
                        size_t o = g.uofs[i] + g.vofs[j];
                        ctx.a[o] = pf->add(ctx.a[o], pf->mul(ud[i], vd[j]));
                    }
                }
            }
        }
    }
    return false;
}

// Fewest nonzero slices over all axes; a slice decomposition witnesses
// PR <= U.
int slice_bound(const Tensor& t) {
    int k = t.order();
    int best = -1;
    std::vector<int> idx(k);
    for (int axis = 0; axis < k; ++axis) {
        std::vector<char> nonzero(t.dims()[axis], 0);
        for (size_t f = 0; f < t.size(); ++f) {
            if (t.flat(f).is_zero()) continue;
            t.unflatten(f, idx);
            nonzero[idx[axis]] = 1;
        }
        int cnt = 0;
        for (char c : nonzero) cnt += c;
        if (best < 0 || cnt < best) best = cnt;
    }
    return best;
}

} // namespace

bool pr_leq_one(const Tensor& t, PRTerm* witness) {
    if (t.is_zero()) throw ShapeMismatch("pr_leq_one needs a nonzero tensor");
    int k = t.order();
    for (int mask = 1; mask <= Partition::count(k); ++mask) {
        Partition p = Partition::from_mask(k, (uint32_t)mask);
        Mat<Fe> flat = flatten(t, p);
        if (rank_of(flat) != 1) continue;
        if (witness) {
            int i0 = -1, j0 = -1;
            for (int i = 0; i < flat.rows() && i0 < 0; ++i)
                for (int j = 0; j < flat.cols(); ++j)
                    if (!flat.at(i, j).is_zero()) {
                        i0 = i;
                        j0 = j;
                        break;
                    }
            Tensor u(t.field(), dims_subset(t.dims(), p.axes_in()));
            Tensor v(t.field(), dims_subset(t.dims(), p.axes_out()));
            Fe pivot = flat.at(i0, j0);
            for (int j = 0; j < flat.cols(); ++j) v.flat(j) = flat.at(i0, j);
            for (int i = 0; i < flat.rows(); ++i) u.flat(i) = flat.at(i, j0) / pivot;
            witness->S = p;
            witness->u = std::move(u);
            witness->v = std::move(v);
        }
        return true;
    }
    return false;
}

PRResult pr_bruteforce(const Tensor& t, int r_max, uint64_t budget) {
    if (t.is_zero()) return {0, true};
    int upper = slice_bound(t);
    int cap = r_max < 0 ? upper : std::min(r_max, upper - 1);

    SearchCtx ctx = make_ctx(t, budget);
    uint64_t used = 0;
    for (int r = 1; r <= std::min(cap, upper - 1); ++r) {
        bool found = r == 1 ? leq_one_packed(ctx) : search(ctx, r, Triple{}, used, budget);
        if (found) return {r, true};
    }
    if (r_max < 0 || r_max >= upper) return {upper, true};
    return {r_max + 1, false};
}

namespace {

BigUint big_pow(const BigUint& base, unsigned e) {
    BigUint out((u128)1);
    for (unsigned i = 0; i < e; ++i) out = out * base;
    return out;
}

} // namespace

AuditRecord check_inequalities(const Tensor& t, const EngineConfig& cfg) {
    AuditRecord rec;
    rec.q = t.field()->q();
    rec.dims = t.dims();
    int k = t.order();
    int C = Partition::count(k);

    int axis = cfg.axis;
    if (axis < 0) {
        axis = 0;
        for (int a = 1; a < k; ++a)
            if (t.dims()[a] > t.dims()[axis]) axis = a;
    }
    rec.axis = axis;

    ARValue ar;
    try {
        ar = analytic_rank(t, axis, cfg.budget);
        rec.ar_ok = true;
        rec.ar_count = ar.count;
        rec.ar_value = ar.value();
        rec.N = ar.N;
    } catch (const Error& e) {
        rec.note += std::string("ar: ") + e.what() + "; ";
    }

    try {
        PRResult pr = pr_bruteforce(t, -1, cfg.budget);
        rec.pr = pr.value;
        rec.pr_exact = pr.exact;
    } catch (const Error& e) {
        rec.note += std::string("pr: ") + e.what() + "; ";
    }

    try {
        KernelReport rep = estimate_dim(t, axis, 3, cfg.budget);
        rec.gr_est = rep.gr_est;
        rec.gr_stable = !rep.unstable;
    } catch (const Error& e) {
        rec.note += std::string("gr: ") + e.what() + "; ";
    }

    try {
        Certificate cert = decompose(t, cfg);
        rec.cert_terms = (int)cert.dec.terms.size();
        rec.cert_bound = cert.bound;
        rec.cert_verified = cert.verified;
    } catch (const Error& e) {
        rec.note += std::string("cert: ") + e.what() + "; ";
    }

    if (rec.pr < 0 && rec.cert_verified) {
        rec.pr = rec.cert_terms;
        rec.pr_exact = false;
        rec.note += "pr is the certificate bound; ";
    }

    if (rec.ar_ok && rec.pr >= 0) {
        rec.holds_ar_le_pr = ar.leq(rec.pr);
        int e11 = C * rec.N + 1 - rec.pr;
        rec.holds_thm11 =
            e11 >= 0 && big_pow(BigUint(rec.ar_count), (unsigned)C) <=
                            BigUint::power(rec.q, (unsigned)e11);
    }
    if (rec.pr >= 0 && rec.gr_est >= 0) rec.holds_thm12 = rec.pr <= C * rec.gr_est;
    return rec;
}

} // namespace prd
