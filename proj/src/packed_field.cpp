#include "prd/packed_field.hpp"

#include <map>
#include <mutex>

namespace prd {

namespace {
std::mutex g_cache_mutex;
std::map<const FieldCtx*, std::unique_ptr<PackedField>>& cache() {
    static std::map<const FieldCtx*, std::unique_ptr<PackedField>> c;
    return c;
}
} // namespace

const PackedField* PackedField::get(const FieldCtx* ctx, uint64_t budget) {
    if (ctx->q() > budget)
        throw BudgetExceeded("packed field of size " + std::to_string(ctx->q()) +
                             " exceeds budget " + std::to_string(budget));
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    auto it = cache().find(ctx);
    if (it != cache().end()) return it->second.get();
    auto pf = std::unique_ptr<PackedField>(new PackedField());
    pf->ctx_ = ctx;
    pf->p_ = (uint32_t)ctx->p();
    pf->q_ = (uint32_t)ctx->q();
    pf->e_ = ctx->e();
    pf->build();
    const PackedField* raw = pf.get();
    cache().emplace(ctx, std::move(pf));
    return raw;
}

void PackedField::build() {
    ord_ = q_ - 1;
    pow_p_.resize(e_ + 1);
    pow_p_[0] = 1;
    for (unsigned i = 1; i <= e_; ++i) pow_p_[i] = pow_p_[i - 1] * p_;

    log_.assign(q_, 0);
    exp_.assign(ord_ == 0 ? 1 : 2 * ord_, 1);
    if (q_ == 2) { // trivial unit group
        exp_[0] = 1;
        log_[1] = 0;
        return;
    }
    // Smallest generator by code: walk the power chain with exact field ops;
    // a candidate generates iff no earlier power returns to 1.
    for (uint64_t gcode = 2; gcode < q_; ++gcode) {
        Fe g = ctx_->element(gcode);
        Fe acc = ctx_->one();
        bool ok = true;
        std::vector<uint32_t> chain(ord_);
        for (uint32_t i = 0; i < ord_; ++i) {
            chain[i] = (uint32_t)ctx_->code(acc);
            acc = acc * g;
            if (i + 1 < ord_ && acc.is_one()) {
                ok = false;
                break;
            }
        }
        if (!ok || !acc.is_one()) continue;
        for (uint32_t i = 0; i < ord_; ++i) {
            exp_[i] = chain[i];
            exp_[i + ord_] = chain[i];
            log_[chain[i]] = i;
        }
        return;
    }
    throw Error("no generator found; field construction inconsistent");
}

uint32_t PackedField::add_digits(uint32_t a, uint32_t b) const {
    uint32_t out = 0;
    for (unsigned i = 0; i < e_; ++i) {
        uint32_t da = a / pow_p_[i] % p_;
        uint32_t db = b / pow_p_[i] % p_;
        uint32_t s = da + db;
        if (s >= p_) s -= p_;
        out += s * pow_p_[i];
    }
    return out;
}

uint32_t PackedField::sub_digits(uint32_t a, uint32_t b) const {
    uint32_t out = 0;
    for (unsigned i = 0; i < e_; ++i) {
        uint32_t da = a / pow_p_[i] % p_;
        uint32_t db = b / pow_p_[i] % p_;
        uint32_t s = da >= db ? da - db : da + p_ - db;
        out += s * pow_p_[i];
    }
    return out;
}

uint32_t PackedField::embed(const Fe& a) const {
    return (uint32_t)ctx_->code(a.embed_into(ctx_));
}

} // namespace prd
