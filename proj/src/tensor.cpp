#include "prd/tensor.hpp"

#include <algorithm>

namespace prd {

Tensor::Tensor(const FieldCtx* field, std::vector<int> dims) : field_(field), dims_(std::move(dims)) {
    size_t n = 1;
    for (int d : dims_) {
        if (d <= 0) throw ShapeMismatch("tensor dims must be positive");
        n *= (size_t)d;
    }
    a_.assign(n, field_->zero());
}

size_t Tensor::flat_index(const std::vector<int>& idx) const {
    if (idx.size() != dims_.size()) throw ShapeMismatch("tensor index rank mismatch");
    size_t f = 0;
    for (size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] < 0 || idx[i] >= dims_[i]) throw ShapeMismatch("tensor index out of range");
        f = f * (size_t)dims_[i] + (size_t)idx[i];
    }
    return f;
}

void Tensor::unflatten(size_t flat, std::vector<int>& idx) const {
    idx.resize(dims_.size());
    for (size_t i = dims_.size(); i-- > 0;) {
        idx[i] = (int)(flat % (size_t)dims_[i]);
        flat /= (size_t)dims_[i];
    }
}

bool Tensor::is_zero() const {
    for (auto& v : a_)
        if (!v.is_zero()) return false;
    return true;
}

bool Tensor::operator==(const Tensor& b) const {
    return field_ == b.field_ && dims_ == b.dims_ && a_ == b.a_;
}

Tensor Tensor::operator+(const Tensor& b) const {
    if (field_ != b.field_ || dims_ != b.dims_) throw ShapeMismatch("tensor sum shape mismatch");
    Tensor out = *this;
    for (size_t i = 0; i < a_.size(); ++i) out.a_[i] = out.a_[i] + b.a_[i];
    return out;
}

Tensor Tensor::operator-(const Tensor& b) const {
    if (field_ != b.field_ || dims_ != b.dims_) throw ShapeMismatch("tensor diff shape mismatch");
    Tensor out = *this;
    for (size_t i = 0; i < a_.size(); ++i) out.a_[i] = out.a_[i] - b.a_[i];
    return out;
}

Fe Tensor::eval(const std::vector<std::vector<Fe>>& args) const {
    if ((int)args.size() != order()) throw ShapeMismatch("evaluation needs one vector per axis");
    for (int i = 0; i < order(); ++i)
        if ((int)args[i].size() != dims_[i]) throw ShapeMismatch("argument length mismatch");
    Fe acc = field_->zero();
    std::vector<int> idx;
    for (size_t f = 0; f < a_.size(); ++f) {
        if (a_[f].is_zero()) continue;
        unflatten(f, idx);
        Fe t = a_[f];
        for (int i = 0; i < order(); ++i) t = t * args[i][idx[i]];
        acc = acc + t;
    }
    return acc;
}

Partition Partition::from_mask(int k, uint32_t mask) {
    if (k < 2) throw ShapeMismatch("partitions need order >= 2");
    if (mask == 0 || mask >= (1u << (k - 1))) throw ShapeMismatch("invalid partition mask");
    Partition p;
    p.k = k;
    p.mask = mask;
    return p;
}

Partition Partition::from_axes(int k, const std::vector<int>& axes, bool* swapped) {
    uint32_t mask = 0;
    for (int a : axes) {
        if (a < 0 || a >= k) throw ShapeMismatch("partition axis out of range");
        mask |= 1u << a;
    }
    uint32_t full = (1u << k) - 1;
    if (mask == 0 || mask == full) throw ShapeMismatch("partition sides must be nonempty");
    bool swap = (mask >> (k - 1)) & 1;
    if (swap) mask = full & ~mask;
    if (swapped) *swapped = swap;
    return from_mask(k, mask);
}

std::vector<int> Partition::axes_in() const {
    std::vector<int> out;
    for (int i = 0; i < k - 1; ++i)
        if ((mask >> i) & 1) out.push_back(i);
    return out;
}

std::vector<int> Partition::axes_out() const {
    std::vector<int> out;
    for (int i = 0; i < k; ++i)
        if (i == k - 1 || !((mask >> i) & 1)) out.push_back(i);
    return out;
}

std::vector<int> dims_subset(const std::vector<int>& dims, const std::vector<int>& axes) {
    std::vector<int> out;
    out.reserve(axes.size());
    for (int a : axes) out.push_back(dims[(size_t)a]);
    return out;
}

Slicing slice(const Tensor& t, int axis) {
    if (axis < 0 || axis >= t.order()) throw ShapeMismatch("slice axis out of range");
    if (t.order() < 2) throw ShapeMismatch("slicing needs order >= 2");
    Slicing s;
    s.field = t.field();
    s.orig_dims = t.dims();
    s.axis = axis;
    s.m = t.dims()[(size_t)axis];
    for (int a = 0; a < t.order(); ++a) {
        if (a == axis) continue;
        s.block_axes.push_back(a);
        s.block_dims.push_back(t.dims()[(size_t)a]);
    }
    s.block_offsets.resize(s.block_axes.size());
    int off = 0;
    for (size_t b = 0; b < s.block_axes.size(); ++b) {
        s.block_offsets[b] = off;
        off += s.block_dims[b];
    }
    s.nvars = off;
    s.forms.assign((size_t)s.m, MultiPoly::zero(s.field, (unsigned)s.nvars));
    std::vector<int> idx;
    for (size_t f = 0; f < t.size(); ++f) {
        const Fe& c = t.flat(f);
        if (c.is_zero()) continue;
        t.unflatten(f, idx);
        ExpVec e((size_t)s.nvars, 0);
        for (size_t b = 0; b < s.block_axes.size(); ++b)
            e[(size_t)(s.block_offsets[b] + idx[(size_t)s.block_axes[b]])] += 1;
        s.forms[(size_t)idx[(size_t)axis]].add_term(e, c);
    }
    return s;
}

Fe tensor_eval(const Tensor& t, const std::vector<std::vector<Fe>>& args) { return t.eval(args); }

Mat<Fe> flatten(const Tensor& t, const Partition& s) {
    if (s.k != t.order()) throw ShapeMismatch("partition order mismatch");
    auto in_axes = s.axes_in();
    auto out_axes = s.axes_out();
    size_t rows = 1, cols = 1;
    for (int a : in_axes) rows *= (size_t)t.dims()[(size_t)a];
    for (int a : out_axes) cols *= (size_t)t.dims()[(size_t)a];
    Mat<Fe> m((int)rows, (int)cols, t.field()->zero());
    std::vector<int> idx;
    for (size_t f = 0; f < t.size(); ++f) {
        const Fe& c = t.flat(f);
        if (c.is_zero()) continue;
        t.unflatten(f, idx);
        size_t r = 0, cc = 0;
        for (int a : in_axes) r = r * (size_t)t.dims()[(size_t)a] + (size_t)idx[(size_t)a];
        for (int a : out_axes) cc = cc * (size_t)t.dims()[(size_t)a] + (size_t)idx[(size_t)a];
        m.at((int)r, (int)cc) = c;
    }
    return m;
}

Tensor expand_term(const FieldCtx* field, const std::vector<int>& dims, const PRTerm& term) {
    auto in_axes = term.S.axes_in();
    auto out_axes = term.S.axes_out();
    if (term.u.dims() != dims_subset(dims, in_axes) || term.v.dims() != dims_subset(dims, out_axes))
        throw ShapeMismatch("term side dims mismatch");
    Tensor out(field, dims);
    std::vector<int> idx, iu(in_axes.size()), iv(out_axes.size());
    for (size_t f = 0; f < out.size(); ++f) {
        out.unflatten(f, idx);
        for (size_t i = 0; i < in_axes.size(); ++i) iu[i] = idx[(size_t)in_axes[i]];
        for (size_t i = 0; i < out_axes.size(); ++i) iv[i] = idx[(size_t)out_axes[i]];
        Fe prod = term.u.at(iu) * term.v.at(iv);
        if (!prod.is_zero()) out.flat(f) = prod;
    }
    return out;
}

VerifyResult verify_decomposition(const Tensor& t, const PRDecomposition& d) {
    VerifyResult res;
    res.terms = d.terms.size();
    if (d.dims != t.dims()) return res;
    Tensor acc(t.field(), t.dims());
    for (auto& term : d.terms) acc = acc + expand_term(t.field(), t.dims(), term);
    res.ok = acc == t;
    return res;
}

ConstructingElement ConstructingElement::empty(const std::vector<int>& dims, int width) {
    ConstructingElement c;
    c.dims = dims;
    c.width = width;
    c.pairs.resize((size_t)Partition::count((int)dims.size()));
    return c;
}

Tensor ip_apply(const FieldCtx* field, const ConstructingElement& c) {
    Tensor out(field, c.dims);
    int k = (int)c.dims.size();
    for (uint32_t mask = 1; mask <= c.pairs.size(); ++mask) {
        Partition part = Partition::from_mask(k, mask);
        for (auto& [u, v] : c.pairs[mask - 1]) {
            PRTerm term{part, u, v};
            out = out + expand_term(field, c.dims, term);
        }
    }
    return out;
}

PRDecomposition constructing_to_decomposition(const ConstructingElement& c) {
    PRDecomposition d;
    d.dims = c.dims;
    int k = (int)c.dims.size();
    for (uint32_t mask = 1; mask <= c.pairs.size(); ++mask) {
        Partition part = Partition::from_mask(k, mask);
        for (auto& [u, v] : c.pairs[mask - 1]) {
            if (u.is_zero() || v.is_zero()) continue;
            d.terms.push_back(PRTerm{part, u, v});
        }
    }
    return d;
}

Tensor permute_axes(const Tensor& t, const std::vector<int>& perm) {
    if ((int)perm.size() != t.order()) throw ShapeMismatch("permutation rank mismatch");
    std::vector<int> new_dims(perm.size());
    for (size_t i = 0; i < perm.size(); ++i) new_dims[i] = t.dims()[(size_t)perm[i]];
    Tensor out(t.field(), new_dims);
    std::vector<int> idx, src(perm.size());
    for (size_t f = 0; f < out.size(); ++f) {
        out.unflatten(f, idx);
        for (size_t i = 0; i < perm.size(); ++i) src[(size_t)perm[i]] = idx[i];
        out.flat(f) = t.at(src);
    }
    return out;
}

Tensor slice_axis_range(const Tensor& t, int axis, int start, int len) {
    if (axis < 0 || axis >= t.order()) throw ShapeMismatch("axis out of range");
    if (start < 0 || len <= 0 || start + len > t.dims()[(size_t)axis])
        throw ShapeMismatch("axis range out of bounds");
    std::vector<int> new_dims = t.dims();
    new_dims[(size_t)axis] = len;
    Tensor out(t.field(), new_dims);
    std::vector<int> idx;
    for (size_t f = 0; f < out.size(); ++f) {
        out.unflatten(f, idx);
        idx[(size_t)axis] += start;
        out.flat(f) = t.at(idx);
    }
    return out;
}

uint64_t tensor_hash(const Tensor& t) {
    uint64_t h = 14695981039346656037ull;
    auto mix = [&h](uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    mix(t.field()->p());
    mix(t.field()->e());
    mix((uint64_t)t.order());
    for (int d : t.dims()) mix((uint64_t)d);
    for (size_t i = 0; i < t.size(); ++i) mix(t.field()->code(t.flat(i)));
    return h;
}

} // namespace prd
