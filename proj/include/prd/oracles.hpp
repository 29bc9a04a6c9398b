#pragma once

// Independent ground truth for small instances: exact partition rank by
// exhaustive search over normalized witnesses, plus the inequality audit
// relating analytic rank, partition rank, and the geometric-rank estimate.

#include <cstdint>
#include <string>
#include <vector>

#include "prd/engine.hpp"
#include "prd/probe.hpp"
#include "prd/tensor.hpp"

namespace prd {

// True iff some flattening of t has rank 1; fills the one-term decomposition
// when requested. t must be nonzero.
bool pr_leq_one(const Tensor& t, PRTerm* witness = nullptr);

struct PRResult {
    int value = 0;
    bool exact = false; // true: PR == value. false: PR >= value, search stopped at r_max.
};

// Exact partition rank by depth-first search: terms use any partition, u is
// normalized (first nonzero coordinate 1), and term triples
// (partition mask, u code, v code) are nondecreasing along a branch. The
// slice count along the best axis bounds PR above by U, so exhausting level
// U-1 settles PR = U without searching level U. r_max < 0 searches up to U;
// exhausting r_max < U without success returns {r_max + 1, false}. Budget
// counts term subtractions; running out throws BudgetExceeded.
PRResult pr_bruteforce(const Tensor& t, int r_max = -1, uint64_t budget = kDefaultBudget);

struct AuditRecord {
    uint64_t q = 0;
    std::vector<int> dims;
    int axis = 0; // 0-based audited slice axis
    int N = 0;
    bool ar_ok = false;
    u128 ar_count = 0;
    double ar_value = 0.0;
    int pr = -1; // -1 when neither oracle nor certificate produced a value
    bool pr_exact = false;
    int gr_est = -1;
    bool gr_stable = false;
    int cert_terms = -1; // -1 when decomposition failed
    int cert_bound = -1;
    bool cert_verified = false;
    bool holds_ar_le_pr = false; // count >= q^(N - PR), exact
    bool holds_thm11 = false;    // count^C <= q^(CN + 1 - PR), C = 2^(k-1)-1, exact
    bool holds_thm12 = false;    // PR <= C * gr_est
    std::string note;
};

// Runs analytic rank, the partition-rank oracle (falling back to the
// certificate bound when the search does not fit the budget), dimension
// estimation, and the decomposition engine, then evaluates the inequalities
// with exact integer comparisons. Missing pieces leave their flags false and
// a note behind instead of failing the audit.
AuditRecord check_inequalities(const Tensor& t, const EngineConfig& cfg = {});

} // namespace prd
