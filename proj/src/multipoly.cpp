#include "prd/multipoly.hpp"

#include <algorithm>
#include <atomic>

#include "prd/version.hpp"

namespace prd {

namespace {
std::atomic<int> g_degree_limit{kDefaultDegreeLimit};
}

int poly_degree_limit() { return g_degree_limit.load(); }
void set_poly_degree_limit(int limit) { g_degree_limit.store(limit); }

MultiPoly MultiPoly::zero(const FieldCtx* field, unsigned nvars) {
    MultiPoly p;
    p.field_ = field;
    p.nvars_ = nvars;
    return p;
}

MultiPoly MultiPoly::constant(const FieldCtx* field, unsigned nvars, const Fe& c) {
    MultiPoly p = zero(field, nvars);
    if (!c.is_zero()) p.terms_.emplace(ExpVec(nvars, 0), c);
    return p;
}

MultiPoly MultiPoly::variable(const FieldCtx* field, unsigned nvars, unsigned j) {
    if (j >= nvars) throw ShapeMismatch("variable index out of range");
    MultiPoly p = zero(field, nvars);
    ExpVec e(nvars, 0);
    e[j] = 1;
    p.terms_.emplace(std::move(e), field->one());
    return p;
}

int MultiPoly::total_degree() const {
    if (terms_.empty()) return -1;
    unsigned d = 0;
    for (auto v : terms_.rbegin()->first) d += v;
    return (int)d;
}

void MultiPoly::add_term(const ExpVec& exp, const Fe& c) {
    if (exp.size() != nvars_) throw ShapeMismatch("exponent arity mismatch");
    if (c.is_zero()) return;
    auto it = terms_.find(exp);
    if (it == terms_.end()) {
        terms_.emplace(exp, c);
    } else {
        it->second = it->second + c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

MultiPoly MultiPoly::operator+(const MultiPoly& b) const {
    if (field_ != b.field_ || nvars_ != b.nvars_) throw ShapeMismatch("polynomial shape mismatch in +");
    MultiPoly out = *this;
    for (auto& [e, c] : b.terms_) out.add_term(e, c);
    return out;
}

MultiPoly MultiPoly::operator-(const MultiPoly& b) const {
    if (field_ != b.field_ || nvars_ != b.nvars_) throw ShapeMismatch("polynomial shape mismatch in -");
    MultiPoly out = *this;
    for (auto& [e, c] : b.terms_) out.add_term(e, -c);
    return out;
}

MultiPoly MultiPoly::operator-() const {
    MultiPoly out = zero(field_, nvars_);
    for (auto& [e, c] : terms_) out.terms_.emplace(e, -c);
    return out;
}

MultiPoly MultiPoly::scaled(const Fe& c) const {
    MultiPoly out = zero(field_, nvars_);
    if (c.is_zero()) return out;
    for (auto& [e, k] : terms_) {
        Fe v = k * c;
        if (!v.is_zero()) out.terms_.emplace(e, v);
    }
    return out;
}

MultiPoly MultiPoly::operator*(const MultiPoly& b) const {
    if (field_ != b.field_ || nvars_ != b.nvars_) throw ShapeMismatch("polynomial shape mismatch in *");
    if (is_zero() || b.is_zero()) return zero(field_, nvars_);
    int limit = poly_degree_limit();
    if (total_degree() + b.total_degree() > limit)
        throw DegreeBlowup("product degree " + std::to_string(total_degree() + b.total_degree()) +
                           " exceeds ceiling " + std::to_string(limit));
    MultiPoly out = zero(field_, nvars_);
    ExpVec e(nvars_);
    for (auto& [ea, ca] : terms_) {
        for (auto& [eb, cb] : b.terms_) {
            for (unsigned i = 0; i < nvars_; ++i) e[i] = (uint16_t)(ea[i] + eb[i]);
            out.add_term(e, ca * cb);
        }
    }
    return out;
}

bool MultiPoly::operator==(const MultiPoly& b) const {
    return field_ == b.field_ && nvars_ == b.nvars_ && terms_ == b.terms_;
}

Fe MultiPoly::eval(const std::vector<Fe>& x) const {
    if (x.size() != nvars_) throw ShapeMismatch("evaluation arity mismatch");
    Fe acc = field_->zero();
    for (auto& [e, c] : terms_) {
        Fe t = c;
        for (unsigned i = 0; i < nvars_; ++i)
            if (e[i] != 0) t = t * x[i].pow(e[i]);
        acc = acc + t;
    }
    return acc;
}

MultiPoly MultiPoly::partial(unsigned j) const {
    if (j >= nvars_) throw ShapeMismatch("derivative variable out of range");
    MultiPoly out = zero(field_, nvars_);
    for (auto& [e, c] : terms_) {
        if (e[j] == 0) continue;
        Fe k = c * field_->from_int(e[j]);
        if (k.is_zero()) continue; // exponent divisible by the characteristic
        ExpVec de = e;
        de[j] -= 1;
        out.terms_.emplace(std::move(de), k);
    }
    return out;
}

MultiPoly MultiPoly::truncated(int maxdeg) const {
    if (maxdeg < 0) return *this;
    MultiPoly out = zero(field_, nvars_);
    for (auto& [e, c] : terms_) {
        int d = 0;
        for (auto v : e) d += v;
        if (d <= maxdeg) out.terms_.emplace(e, c);
    }
    return out;
}

MultiPoly MultiPoly::shifted(const std::vector<Fe>& c) const {
    if (c.size() != nvars_) throw ShapeMismatch("shift point length differs from nvars");
    MultiPoly out = zero(field_, nvars_);
    for (auto& [e, coeff] : terms_) {
        // Expand coeff * prod_j (x_j + c_j)^(e_j), binomial per variable.
        MultiPoly term = constant(field_, nvars_, coeff);
        for (unsigned j = 0; j < nvars_; ++j) {
            if (e[j] == 0) continue;
            MultiPoly lin = variable(field_, nvars_, j) + constant(field_, nvars_, c[j]);
            for (int rep = 0; rep < e[j]; ++rep) term = term * lin;
        }
        out = out + term;
    }
    return out;
}

Fe MultiPoly::leading_coeff() const {
    if (terms_.empty()) return field_->zero();
    return terms_.rbegin()->second;
}

ExpVec MultiPoly::min_exponents() const {
    if (terms_.empty()) return {};
    ExpVec m = terms_.begin()->first;
    for (auto& [e, c] : terms_)
        for (unsigned i = 0; i < nvars_; ++i) m[i] = std::min(m[i], e[i]);
    return m;
}

MultiPoly MultiPoly::shifted_down(const ExpVec& shift) const {
    MultiPoly out = zero(field_, nvars_);
    for (auto& [e, c] : terms_) {
        ExpVec ne = e;
        for (unsigned i = 0; i < nvars_; ++i) {
            if (ne[i] < shift[i]) throw ShapeMismatch("term not divisible by monomial");
            ne[i] -= shift[i];
        }
        out.terms_.emplace(std::move(ne), c);
    }
    return out;
}

RatFunc MultiPoly::subst(const std::vector<RatFunc>& args) const {
    if (args.size() != nvars_) throw ShapeMismatch("substitution arity mismatch");
    const FieldCtx* f = field_;
    unsigned target_vars = args.empty() ? 0 : args[0].nvars();
    RatFunc acc = RatFunc::zero(f, target_vars);
    for (auto& [e, c] : terms_) {
        RatFunc t = RatFunc::constant(f, target_vars, c);
        for (unsigned i = 0; i < nvars_; ++i)
            for (unsigned rep = 0; rep < e[i]; ++rep) t = t * args[i];
        acc = acc + t;
    }
    return acc;
}

RatFunc::RatFunc(MultiPoly num, MultiPoly den, bool strip_content) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw DivisionByZero("zero denominator");
    if (num_.field() != den_.field() || num_.nvars() != den_.nvars())
        throw ShapeMismatch("num/den shape mismatch");
    if (num_.is_zero()) {
        den_ = MultiPoly::constant(den_.field(), den_.nvars(), den_.field()->one());
        return;
    }
    if (strip_content) {
        ExpVec mn = num_.min_exponents();
        ExpVec md = den_.min_exponents();
        ExpVec common(mn.size());
        bool any = false;
        for (size_t i = 0; i < mn.size(); ++i) {
            common[i] = std::min(mn[i], md[i]);
            any = any || common[i] != 0;
        }
        if (any) {
            num_ = num_.shifted_down(common);
            den_ = den_.shifted_down(common);
        }
    }
    Fe lc = den_.leading_coeff();
    if (!lc.is_one()) {
        Fe s = lc.inv();
        num_ = num_.scaled(s);
        den_ = den_.scaled(s);
    }
}

RatFunc RatFunc::from_poly(MultiPoly p) {
    const FieldCtx* f = p.field();
    unsigned n = p.nvars();
    return RatFunc(std::move(p), MultiPoly::constant(f, n, f->one()), false);
}

RatFunc RatFunc::zero(const FieldCtx* field, unsigned nvars) {
    return from_poly(MultiPoly::zero(field, nvars));
}

RatFunc RatFunc::one(const FieldCtx* field, unsigned nvars) {
    return from_poly(MultiPoly::constant(field, nvars, field->one()));
}

RatFunc RatFunc::variable(const FieldCtx* field, unsigned nvars, unsigned j) {
    return from_poly(MultiPoly::variable(field, nvars, j));
}

RatFunc RatFunc::constant(const FieldCtx* field, unsigned nvars, const Fe& c) {
    return from_poly(MultiPoly::constant(field, nvars, c));
}

RatFunc RatFunc::operator+(const RatFunc& b) const {
    if (den_ == b.den_) return RatFunc(num_ + b.num_, den_);
    return RatFunc(num_ * b.den_ + b.num_ * den_, den_ * b.den_);
}

RatFunc RatFunc::operator-(const RatFunc& b) const {
    if (den_ == b.den_) return RatFunc(num_ - b.num_, den_);
    return RatFunc(num_ * b.den_ - b.num_ * den_, den_ * b.den_);
}

RatFunc RatFunc::operator*(const RatFunc& b) const {
    return RatFunc(num_ * b.num_, den_ * b.den_);
}

RatFunc RatFunc::operator/(const RatFunc& b) const {
    if (b.is_zero()) throw DivisionByZero("division by zero rational function");
    return RatFunc(num_ * b.den_, den_ * b.num_);
}

RatFunc RatFunc::operator-() const { return RatFunc(-num_, den_, false); }

bool RatFunc::operator==(const RatFunc& b) const {
    return (num_ * b.den_ - b.num_ * den_).is_zero();
}

Fe RatFunc::eval(const std::vector<Fe>& x) const {
    Fe d = den_.eval(x);
    if (d.is_zero()) throw OutsideDomain("denominator vanishes at evaluation point");
    return num_.eval(x) / d;
}

RatFunc RatFunc::partial(unsigned j) const {
    MultiPoly n = den_ * num_.partial(j) - num_ * den_.partial(j);
    return RatFunc(std::move(n), den_ * den_, /*strip_content=*/false);
}

size_t RationalMap::shape_size(const std::vector<int>& s) {
    size_t n = 1;
    for (int d : s) {
        if (d <= 0) throw ShapeMismatch("nonpositive shape entry");
        n *= (size_t)d;
    }
    return n;
}

RationalMap RationalMap::zeros(const FieldCtx* field, unsigned arity, std::vector<int> shape) {
    RationalMap m;
    m.arity = arity;
    m.shape = std::move(shape);
    m.comp.assign(shape_size(m.shape), RatFunc::zero(field, arity));
    return m;
}

const RatFunc& RationalMap::at(const std::vector<int>& idx) const {
    return const_cast<RationalMap*>(this)->at(idx);
}

RatFunc& RationalMap::at(const std::vector<int>& idx) {
    if (idx.size() != shape.size()) throw ShapeMismatch("index rank mismatch");
    size_t flat = 0;
    for (size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] < 0 || idx[i] >= shape[i]) throw ShapeMismatch("index out of range");
        flat = flat * (size_t)shape[i] + (size_t)idx[i];
    }
    return comp[flat];
}

std::vector<Fe> RationalMap::eval(const std::vector<Fe>& x) const {
    std::vector<Fe> out;
    out.reserve(comp.size());
    for (auto& f : comp) out.push_back(f.eval(x));
    return out;
}

RationalMap RationalMap::total_derivative() const {
    RationalMap out;
    out.arity = arity;
    out.shape = shape;
    out.shape.push_back((int)arity);
    out.comp.reserve(comp.size() * arity);
    for (auto& f : comp)
        for (unsigned j = 0; j < arity; ++j) out.comp.push_back(f.partial(j));
    return out;
}

RationalMap RationalMap::higher_derivative(unsigned a) const {
    RationalMap out = *this;
    for (unsigned i = 0; i < a; ++i) out = out.total_derivative();
    return out;
}

RationalMap map_compose(const RationalMap& F, const RationalMap& G) {
    if (G.comp.size() != F.arity) throw ShapeMismatch("composition arity mismatch");
    RationalMap out;
    out.arity = G.arity;
    out.shape = F.shape;
    out.comp.reserve(F.comp.size());
    std::vector<RatFunc> args(G.comp.begin(), G.comp.end());
    for (auto& f : F.comp) {
        RatFunc n = f.num().subst(args);
        RatFunc d = f.den().subst(args);
        if (d.is_zero()) throw OutsideDomain("composed denominator vanishes identically");
        out.comp.push_back(n / d);
    }
    return out;
}

} // namespace prd
