#pragma once

// Flat arithmetic for enumeration loops. Elements travel as codes
// 0..q-1 (code = sum c_i p^i, matching FieldCtx::element). Multiplication and
// inversion go through discrete-log tables built once per field; addition is
// digitwise, with an XOR fast path in characteristic 2. Cached per context.

#include <cstdint>
#include <memory>
#include <vector>

#include "prd/field.hpp"

namespace prd {

class PackedField {
  public:
    // Cached; builds exp/log tables on first use. Throws BudgetExceeded when
    // q exceeds the budget (tables are O(q)).
    static const PackedField* get(const FieldCtx* ctx, uint64_t budget);

    const FieldCtx* ctx() const { return ctx_; }
    uint32_t q() const { return q_; }

    uint32_t add(uint32_t a, uint32_t b) const {
        if (p_ == 2) return a ^ b;
        if (e_ == 1) {
            uint32_t s = a + b;
            return s >= q_ ? s - q_ : s;
        }
        return add_digits(a, b);
    }

    uint32_t sub(uint32_t a, uint32_t b) const {
        if (p_ == 2) return a ^ b;
        if (e_ == 1) return a >= b ? a - b : a + q_ - b;
        return sub_digits(a, b);
    }

    uint32_t neg(uint32_t a) const { return sub(0, a); }

    uint32_t mul(uint32_t a, uint32_t b) const {
        if (a == 0 || b == 0) return 0;
        return exp_[log_[a] + log_[b]];
    }

    uint32_t inv(uint32_t a) const {
        if (a == 0) throw DivisionByZero("inverse of zero code");
        return exp_[ord_ - log_[a]];
    }

    uint32_t div(uint32_t a, uint32_t b) const { return mul(a, inv(b)); }

    // Code of an element of a subfield under the canonical inclusion.
    uint32_t embed(const Fe& a) const;

  private:
    void build();
    uint32_t add_digits(uint32_t a, uint32_t b) const;
    uint32_t sub_digits(uint32_t a, uint32_t b) const;

    const FieldCtx* ctx_ = nullptr;
    uint32_t p_ = 0, q_ = 0;
    unsigned e_ = 0;
    uint32_t ord_ = 0;                // q - 1
    std::vector<uint32_t> exp_;       // length 2*ord, exp_[i] = g^i
    std::vector<uint32_t> log_;       // length q, log_[g^i] = i, log_[0] unused
    std::vector<uint32_t> pow_p_;     // p^i for digit extraction
};

} // namespace prd
