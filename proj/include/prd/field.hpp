#pragma once

// Finite fields F_{p^e} with exact, canonical element representation.
//
// A FieldCtx is an interned, immutable descriptor of one field. Prime fields
// store elements as a single residue; extension fields as coefficient vectors
// over F_p modulo a fixed irreducible polynomial. The modulus is chosen
// deterministically: the monic irreducible of degree e whose non-leading
// coefficient vector, read as the base-p integer c_0 + c_1*p + ..., is
// smallest. Two calls to FieldCtx::make with the same (p, e) return the same
// pointer, so contexts compare by identity.

#include <cstdint>
#include <memory>
#include <vector>

#include "prd/errors.hpp"

namespace prd {

class Fe;

class FieldCtx {
  public:
    // Interned constructor. Throws NotPrime if p is not prime.
    static const FieldCtx* make(uint64_t p, unsigned e = 1);

    uint64_t p() const { return p_; }
    unsigned e() const { return e_; }
    uint64_t q() const { return q_; }

    // Monic modulus as coefficients c_0..c_e (c_e = 1). Empty for e == 1.
    const std::vector<uint32_t>& modulus() const { return modulus_; }

    Fe zero() const;
    Fe one() const;
    // Reduces n mod p and embeds as a constant.
    Fe from_int(int64_t n) const;
    // Element with coefficient vector c (c_i < p, length <= e).
    Fe from_coeffs(std::vector<uint32_t> c) const;
    // Code order: code = sum c_i p^i, 0 <= code < q. element(0) = 0, element(1) = 1.
    Fe element(uint64_t code) const;
    uint64_t code(const Fe& a) const;

    // All q elements in code order. Throws BudgetExceeded if q > budget.
    std::vector<Fe> enumerate(uint64_t budget) const;

    // Root of the degree-d modulus of the subfield F_{p^d} inside this field,
    // d | e. Deterministic: smallest code that is a root. Cached.
    Fe subfield_root(unsigned d) const;

  private:
    FieldCtx(uint64_t p, unsigned e, std::vector<uint32_t> modulus);

    uint64_t p_;
    unsigned e_;
    uint64_t q_;
    std::vector<uint32_t> modulus_;
    mutable std::vector<std::pair<unsigned, std::vector<uint32_t>>> root_cache_;

    friend class Fe;
};

// One field element. Value type; carries a pointer to its (immortal) context.
// Default-constructed elements are a null sentinel usable only for assignment.
class Fe {
  public:
    Fe() : ctx_(nullptr) {}

    const FieldCtx* ctx() const { return ctx_; }
    bool valid() const { return ctx_ != nullptr; }

    bool is_zero() const;
    bool is_one() const;
    Fe zero_like() const { return ctx_->zero(); }
    Fe one_like() const { return ctx_->one(); }

    Fe operator+(const Fe& b) const;
    Fe operator-(const Fe& b) const;
    Fe operator*(const Fe& b) const;
    Fe operator/(const Fe& b) const; // DivisionByZero
    Fe operator-() const;
    Fe inv() const; // DivisionByZero
    Fe pow(uint64_t n) const;
    // n-fold arithmetic Frobenius a -> a^(p^n).
    Fe frobenius(unsigned n = 1) const;

    Fe& operator+=(const Fe& b) { return *this = *this + b; }
    Fe& operator-=(const Fe& b) { return *this = *this - b; }
    Fe& operator*=(const Fe& b) { return *this = *this * b; }

    bool operator==(const Fe& b) const;
    bool operator!=(const Fe& b) const { return !(*this == b); }

    // Coefficients c_0..c_{e-1} over F_p.
    const std::vector<uint32_t>& coeffs() const { return c_; }

    // Image under the inclusion F_{p^e} -> F_{p^(e*m)} determined by
    // big->subfield_root(e). Requires same p and e | big->e().
    Fe embed_into(const FieldCtx* big) const;

  private:
    Fe(const FieldCtx* ctx, std::vector<uint32_t> c) : ctx_(ctx), c_(std::move(c)) {}

    const FieldCtx* ctx_;
    std::vector<uint32_t> c_; // length ctx_->e(), little-endian over F_p

    friend class FieldCtx;
};

// Polynomial utilities over F_p used for modulus search; exposed for tests.
namespace fppoly {
// Coefficient vectors are little-endian, no trailing zeros except poly 0 = {}.
std::vector<uint32_t> mul_mod(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b,
                              const std::vector<uint32_t>& mod, uint64_t p);
bool is_irreducible(const std::vector<uint32_t>& f, uint64_t p);
} // namespace fppoly

} // namespace prd
