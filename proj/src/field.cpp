#include "prd/field.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <tuple>

namespace prd {

namespace {

bool is_prime_u64(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

uint64_t addm(uint64_t a, uint64_t b, uint64_t p) { return (a + b) % p; }
uint64_t subm(uint64_t a, uint64_t b, uint64_t p) { return (a + p - b) % p; }
uint64_t mulm(uint64_t a, uint64_t b, uint64_t p) {
    return (uint64_t)((__uint128_t)a * b % p);
}

uint64_t inv_mod_p(uint64_t a, uint64_t p) {
    if (a == 0) throw DivisionByZero("inverse of zero");
    int64_t t = 0, newt = 1;
    int64_t r = (int64_t)p, newr = (int64_t)(a % p);
    while (newr != 0) {
        int64_t qq = r / newr;
        std::swap(t -= qq * newt, newt);
        std::swap(r -= qq * newr, newr);
    }
    int64_t res = t % (int64_t)p;
    if (res < 0) res += (int64_t)p;
    return (uint64_t)res;
}

} // namespace

namespace fppoly {

using Poly = std::vector<uint32_t>;

static void trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

static Poly mul(const Poly& a, const Poly& b, uint64_t p) {
    if (a.empty() || b.empty()) return {};
    Poly c(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); ++j) {
            uint64_t acc = c[i + j] + mulm(a[i], b[j], p);
            c[i + j] = (uint32_t)(acc % p);
        }
    }
    trim(c);
    return c;
}

// Remainder of a by monic-or-not b (b != 0).
static Poly rem(Poly a, const Poly& b, uint64_t p) {
    trim(a);
    uint64_t lead_inv = inv_mod_p(b.back(), p);
    while (a.size() >= b.size() && !a.empty()) {
        uint64_t coef = mulm(a.back(), lead_inv, p);
        size_t shift = a.size() - b.size();
        for (size_t i = 0; i < b.size(); ++i)
            a[shift + i] = (uint32_t)subm(a[shift + i], mulm(coef, b[i], p), p);
        trim(a);
    }
    return a;
}

Poly mul_mod(const Poly& a, const Poly& b, const Poly& mod, uint64_t p) {
    return rem(mul(a, b, p), mod, p);
}

static Poly pow_mod(Poly base, uint64_t n, const Poly& mod, uint64_t p) {
    Poly result{1};
    base = rem(std::move(base), mod, p);
    while (n > 0) {
        if (n & 1) result = mul_mod(result, base, mod, p);
        base = mul_mod(base, base, mod, p);
        n >>= 1;
    }
    return result;
}

static Poly gcd(Poly a, Poly b, uint64_t p) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        Poly r = rem(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

// Rabin's test: f irreducible over F_p iff x^(p^e) = x (mod f) and for every
// prime t | e, gcd(x^(p^(e/t)) - x, f) = 1.
bool is_irreducible(const Poly& f, uint64_t p) {
    size_t e = f.size() - 1;
    if (e == 0) return false;
    if (e == 1) return true;

    std::vector<Poly> frob(e + 1); // frob[i] = x^(p^i) mod f
    frob[0] = Poly{0, 1};
    for (size_t i = 1; i <= e; ++i) frob[i] = pow_mod(frob[i - 1], p, f, p);

    Poly diff = frob[e];
    diff.resize(std::max<size_t>(diff.size(), 2), 0);
    diff[1] = (uint32_t)subm(diff[1], 1, p);
    trim(diff);
    if (!diff.empty()) return false;

    for (size_t t = 2; t <= e; ++t) {
        if (e % t != 0) continue;
        bool prime_t = true;
        for (size_t d = 2; d * d <= t; ++d)
            if (t % d == 0) prime_t = false;
        if (!prime_t) continue;
        Poly g = frob[e / t];
        g.resize(std::max<size_t>(g.size(), 2), 0);
        g[1] = (uint32_t)subm(g[1], 1, p);
        trim(g);
        Poly d = gcd(f, g, p);
        if (d.size() != 1) return false;
    }
    return true;
}

} // namespace fppoly

namespace {

// Smallest monic irreducible of degree e: non-leading coefficients are the
// base-p digits of the smallest admissible integer code.
std::vector<uint32_t> find_modulus(uint64_t p, unsigned e) {
    for (uint64_t code = 0;; ++code) {
        std::vector<uint32_t> f(e + 1, 0);
        uint64_t c = code;
        for (unsigned i = 0; i < e; ++i) {
            f[i] = (uint32_t)(c % p);
            c /= p;
        }
        if (c != 0) throw Error("no irreducible modulus found"); // unreachable
        f[e] = 1;
        if (fppoly::is_irreducible(f, p)) return f;
    }
}

std::mutex g_registry_mutex;
std::map<std::pair<uint64_t, unsigned>, std::unique_ptr<FieldCtx>>& registry() {
    static std::map<std::pair<uint64_t, unsigned>, std::unique_ptr<FieldCtx>> r;
    return r;
}

} // namespace

FieldCtx::FieldCtx(uint64_t p, unsigned e, std::vector<uint32_t> modulus)
    : p_(p), e_(e), modulus_(std::move(modulus)) {
    q_ = 1;
    for (unsigned i = 0; i < e; ++i) {
        if (q_ > (uint64_t)1 << 62 || q_ * p / p != q_) throw Error("field too large");
        q_ *= p;
    }
}

const FieldCtx* FieldCtx::make(uint64_t p, unsigned e) {
    if (!is_prime_u64(p)) throw NotPrime("p = " + std::to_string(p) + " is not prime");
    if (e == 0) throw Error("extension degree must be positive");
    if (e > 1 && p > (1u << 20)) throw Error("extension base too large");
    std::lock_guard<std::mutex> lock(g_registry_mutex);
    auto key = std::make_pair(p, e);
    auto it = registry().find(key);
    if (it != registry().end()) return it->second.get();
    std::vector<uint32_t> modulus;
    if (e > 1) modulus = find_modulus(p, e);
    auto ctx = std::unique_ptr<FieldCtx>(new FieldCtx(p, e, std::move(modulus)));
    const FieldCtx* raw = ctx.get();
    registry().emplace(key, std::move(ctx));
    return raw;
}

Fe FieldCtx::zero() const { return Fe(this, std::vector<uint32_t>(e_, 0)); }

Fe FieldCtx::one() const {
    std::vector<uint32_t> c(e_, 0);
    c[0] = (uint32_t)(1 % p_);
    return Fe(this, std::move(c));
}

Fe FieldCtx::from_int(int64_t n) const {
    int64_t r = n % (int64_t)p_;
    if (r < 0) r += (int64_t)p_;
    std::vector<uint32_t> c(e_, 0);
    c[0] = (uint32_t)r;
    return Fe(this, std::move(c));
}

Fe FieldCtx::from_coeffs(std::vector<uint32_t> c) const {
    if (c.size() > e_) throw ShapeMismatch("coefficient vector longer than extension degree");
    for (uint32_t v : c)
        if (v >= p_) throw Error("coefficient not reduced mod p");
    c.resize(e_, 0);
    return Fe(this, std::move(c));
}

Fe FieldCtx::element(uint64_t code) const {
    if (code >= q_) throw Error("element code out of range");
    std::vector<uint32_t> c(e_, 0);
    for (unsigned i = 0; i < e_; ++i) {
        c[i] = (uint32_t)(code % p_);
        code /= p_;
    }
    return Fe(this, std::move(c));
}

uint64_t FieldCtx::code(const Fe& a) const {
    uint64_t code = 0;
    for (unsigned i = e_; i-- > 0;) code = code * p_ + a.c_[i];
    return code;
}

std::vector<Fe> FieldCtx::enumerate(uint64_t budget) const {
    if (q_ > budget)
        throw BudgetExceeded("field enumeration of size " + std::to_string(q_) +
                             " exceeds budget " + std::to_string(budget));
    std::vector<Fe> out;
    out.reserve(q_);
    for (uint64_t c = 0; c < q_; ++c) out.push_back(element(c));
    return out;
}

Fe FieldCtx::subfield_root(unsigned d) const {
    if (d == 0 || e_ % d != 0) throw ShapeMismatch("not a subfield degree");
    {
        std::lock_guard<std::mutex> lock(g_registry_mutex);
        for (auto& [deg, coeffs] : root_cache_)
            if (deg == d) return Fe(this, coeffs);
    }
    const FieldCtx* small = FieldCtx::make(p_, d);
    // Evaluate the degree-d modulus at every element, smallest code first.
    std::vector<Fe> mod_coeffs;
    if (d == 1) {
        // Modulus of F_p is x - 0 conceptually; any embedding sends constants
        // to constants, root = 0 works but is never used (d == 1 handled by
        // constant embedding). Keep x itself out of the picture.
        mod_coeffs = {zero(), one()};
    } else {
        for (uint32_t c : small->modulus()) mod_coeffs.push_back(from_int((int64_t)c));
    }
    for (uint64_t codev = 0; codev < q_; ++codev) {
        Fe x = element(codev);
        Fe acc = zero();
        for (size_t i = mod_coeffs.size(); i-- > 0;) acc = acc * x + mod_coeffs[i];
        if (acc.is_zero()) {
            std::lock_guard<std::mutex> lock(g_registry_mutex);
            root_cache_.emplace_back(d, x.coeffs());
            return x;
        }
    }
    throw Error("subfield modulus has no root; inconsistent construction");
}

bool Fe::is_zero() const {
    for (uint32_t v : c_)
        if (v != 0) return false;
    return true;
}

bool Fe::is_one() const { return *this == ctx_->one(); }

bool Fe::operator==(const Fe& b) const { return ctx_ == b.ctx_ && c_ == b.c_; }

Fe Fe::operator+(const Fe& b) const {
    if (ctx_ != b.ctx_) throw ShapeMismatch("field mismatch in +");
    std::vector<uint32_t> c(c_.size());
    for (size_t i = 0; i < c_.size(); ++i) c[i] = (uint32_t)addm(c_[i], b.c_[i], ctx_->p_);
    return Fe(ctx_, std::move(c));
}

Fe Fe::operator-(const Fe& b) const {
    if (ctx_ != b.ctx_) throw ShapeMismatch("field mismatch in -");
    std::vector<uint32_t> c(c_.size());
    for (size_t i = 0; i < c_.size(); ++i) c[i] = (uint32_t)subm(c_[i], b.c_[i], ctx_->p_);
    return Fe(ctx_, std::move(c));
}

Fe Fe::operator-() const {
    std::vector<uint32_t> c(c_.size());
    for (size_t i = 0; i < c_.size(); ++i) c[i] = (uint32_t)subm(0, c_[i], ctx_->p_);
    return Fe(ctx_, std::move(c));
}

Fe Fe::operator*(const Fe& b) const {
    if (ctx_ != b.ctx_) throw ShapeMismatch("field mismatch in *");
    uint64_t p = ctx_->p_;
    if (ctx_->e_ == 1) {
        std::vector<uint32_t> c{(uint32_t)mulm(c_[0], b.c_[0], p)};
        return Fe(ctx_, std::move(c));
    }
    std::vector<uint32_t> prod = fppoly::mul_mod(c_, b.c_, ctx_->modulus_, p);
    prod.resize(ctx_->e_, 0);
    return Fe(ctx_, std::move(prod));
}

Fe Fe::inv() const {
    if (is_zero()) throw DivisionByZero("inverse of zero");
    uint64_t p = ctx_->p_;
    if (ctx_->e_ == 1) return Fe(ctx_, {(uint32_t)inv_mod_p(c_[0], p)});
    // Extended Euclid in F_p[x] against the modulus.
    std::vector<uint32_t> r0 = ctx_->modulus_, r1 = c_;
    fppoly::trim(r1);
    std::vector<uint32_t> t0, t1{1};
    while (!r1.empty()) {
        // r0 = q*r1 + r2
        std::vector<uint32_t> q;
        std::vector<uint32_t> rem = r0;
        uint64_t lead_inv = inv_mod_p(r1.back(), p);
        while (rem.size() >= r1.size() && !rem.empty()) {
            uint64_t coef = mulm(rem.back(), lead_inv, p);
            size_t shift = rem.size() - r1.size();
            if (q.size() < shift + 1) q.resize(shift + 1, 0);
            q[shift] = (uint32_t)addm(q[shift], coef, p);
            for (size_t i = 0; i < r1.size(); ++i)
                rem[shift + i] = (uint32_t)subm(rem[shift + i], mulm(coef, r1[i], p), p);
            fppoly::trim(rem);
        }
        std::vector<uint32_t> t2 = t0; // t2 = t0 - q*t1
        std::vector<uint32_t> qt = fppoly::mul_mod(q, t1, ctx_->modulus_, p);
        if (t2.size() < qt.size()) t2.resize(qt.size(), 0);
        for (size_t i = 0; i < qt.size(); ++i) t2[i] = (uint32_t)subm(t2[i], qt[i], p);
        fppoly::trim(t2);
        r0 = std::move(r1);
        r1 = std::move(rem);
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    // r0 is a unit constant: gcd(modulus, a) = 1.
    if (r0.size() != 1) throw Error("modulus not irreducible; gcd > 1");
    uint64_t scale = inv_mod_p(r0[0], p);
    std::vector<uint32_t> out(ctx_->e_, 0);
    for (size_t i = 0; i < t0.size(); ++i) out[i] = (uint32_t)mulm(t0[i], scale, p);
    return Fe(ctx_, std::move(out));
}

Fe Fe::operator/(const Fe& b) const { return *this * b.inv(); }

Fe Fe::pow(uint64_t n) const {
    Fe result = ctx_->one();
    Fe base = *this;
    while (n > 0) {
        if (n & 1) result = result * base;
        base = base * base;
        n >>= 1;
    }
    return result;
}

Fe Fe::frobenius(unsigned n) const {
    Fe a = *this;
    for (unsigned i = 0; i < n; ++i) a = a.pow(ctx_->p_);
    return a;
}

Fe Fe::embed_into(const FieldCtx* big) const {
    if (big == ctx_) return *this;
    if (big->p() != ctx_->p_ || big->e() % ctx_->e_ != 0)
        throw ShapeMismatch("not an extension of the element's field");
    if (ctx_->e_ == 1) return big->from_int((int64_t)c_[0]);
    Fe beta = big->subfield_root(ctx_->e_);
    Fe acc = big->zero();
    for (size_t i = c_.size(); i-- > 0;) acc = acc * beta + big->from_int((int64_t)c_[i]);
    return acc;
}

} // namespace prd
