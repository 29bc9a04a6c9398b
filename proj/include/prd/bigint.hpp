#pragma once

// Minimal unsigned bignum: just enough for exact comparisons of point counts
// against powers of q. 32-bit limbs, little-endian.

#include <cstdint>
#include <string>
#include <vector>

namespace prd {

using u128 = unsigned __int128;

class BigUint {
  public:
    BigUint() = default;
    BigUint(u128 v) {
        while (v > 0) {
            limbs_.push_back((uint32_t)(v & 0xffffffffu));
            v >>= 32;
        }
    }

    static BigUint power(uint64_t base, unsigned exp) {
        BigUint out((u128)1);
        BigUint b((u128)base);
        while (exp > 0) {
            if (exp & 1) out = out * b;
            b = b * b;
            exp >>= 1;
        }
        return out;
    }

    BigUint operator*(const BigUint& o) const {
        if (limbs_.empty() || o.limbs_.empty()) return BigUint();
        std::vector<uint32_t> out(limbs_.size() + o.limbs_.size(), 0);
        for (size_t i = 0; i < limbs_.size(); ++i) {
            uint64_t carry = 0;
            for (size_t j = 0; j < o.limbs_.size(); ++j) {
                uint64_t cur = (uint64_t)limbs_[i] * o.limbs_[j] + out[i + j] + carry;
                out[i + j] = (uint32_t)cur;
                carry = cur >> 32;
            }
            size_t k = i + o.limbs_.size();
            while (carry) {
                uint64_t cur = out[k] + carry;
                out[k] = (uint32_t)cur;
                carry = cur >> 32;
                ++k;
            }
        }
        while (!out.empty() && out.back() == 0) out.pop_back();
        BigUint r;
        r.limbs_ = std::move(out);
        return r;
    }

    // -1, 0, 1
    int cmp(const BigUint& o) const {
        if (limbs_.size() != o.limbs_.size()) return limbs_.size() < o.limbs_.size() ? -1 : 1;
        for (size_t i = limbs_.size(); i-- > 0;)
            if (limbs_[i] != o.limbs_[i]) return limbs_[i] < o.limbs_[i] ? -1 : 1;
        return 0;
    }
    bool operator<(const BigUint& o) const { return cmp(o) < 0; }
    bool operator<=(const BigUint& o) const { return cmp(o) <= 0; }
    bool operator==(const BigUint& o) const { return cmp(o) == 0; }
    bool operator>=(const BigUint& o) const { return cmp(o) >= 0; }
    bool operator>(const BigUint& o) const { return cmp(o) > 0; }

    bool is_zero() const { return limbs_.empty(); }

    std::string to_string() const {
        if (limbs_.empty()) return "0";
        std::vector<uint32_t> work = limbs_;
        std::string digits;
        while (!work.empty()) {
            uint64_t rem = 0;
            for (size_t i = work.size(); i-- > 0;) {
                uint64_t cur = (rem << 32) | work[i];
                work[i] = (uint32_t)(cur / 10);
                rem = cur % 10;
            }
            digits.push_back((char)('0' + rem));
            while (!work.empty() && work.back() == 0) work.pop_back();
        }
        return std::string(digits.rbegin(), digits.rend());
    }

  private:
    std::vector<uint32_t> limbs_;
};

inline std::string u128_to_string(u128 v) { return BigUint(v).to_string(); }

} // namespace prd
