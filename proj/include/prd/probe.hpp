#pragma once

// Kernel-variety probing: exact point counts of {x : T~(x) = 0} over the base
// field and its extensions, point enumeration in a canonical order, analytic
// rank from counts, dimension / geometric-rank estimation, and regular-point
// search with symbolic tangent data.
//
// Two enumeration kernels cover every counting question. The production one
// linearizes: it fixes all variable blocks but one, counts kernel vectors of
// the resulting linear system per assignment, and runs assignments in OpenMP
// chunks whose partial sums merge in a fixed order. The serial one walks all
// q^N points and evaluates every form; it is the reference the tests and the
// benchmark compare against.

#include <cstdint>
#include <utility>
#include <vector>

#include "prd/bigint.hpp"
#include "prd/field.hpp"
#include "prd/matrix.hpp"
#include "prd/multipoly.hpp"
#include "prd/packed_field.hpp"
#include "prd/tensor.hpp"

namespace prd {

// Slice system compiled to field codes over an extension of the tensor's
// field: m forms, each a sum of terms c * prod_b x[var[b]], one variable per
// block. Built directly from the tensor entries.
struct PackedSystem {
    const PackedField* pf = nullptr;
    const FieldCtx* ext_field = nullptr;
    int m = 0;
    int nvars = 0;
    std::vector<int> block_dims;
    std::vector<int> block_offsets;

    struct Term {
        int form;
        uint32_t coeff;
        std::vector<int> var; // absolute variable index, one per block
    };
    std::vector<Term> terms;

    // ext = 1 probes the base field. Throws BudgetExceeded when the extension
    // field's tables would not fit the budget.
    static PackedSystem build(const Tensor& t, int axis, unsigned ext, uint64_t budget);

    uint64_t q() const { return pf->q(); }
    int blocks() const { return (int)block_dims.size(); }
};

// Number of points of {T~ = 0} over the degree-ext extension. The production
// count fixes every block except the widest and sums q^(n_b - rank) over the
// remaining assignments; it needs q_ext^(N - n_b) assignments within budget.
// The serial reference needs the full q_ext^N within budget.
u128 count_kernel(const Tensor& t, int axis, unsigned ext, uint64_t budget);
u128 count_kernel_serial(const Tensor& t, int axis, unsigned ext, uint64_t budget);

// All kernel points as code vectors, in lexicographic order (variable 0 most
// significant, codes ascending). Production version linearizes over the last
// block, which keeps emission order lexicographic. Requires q_ext^N <= budget.
std::vector<std::vector<uint32_t>> enumerate_kernel(const Tensor& t, int axis, unsigned ext,
                                                    uint64_t budget);
std::vector<std::vector<uint32_t>> enumerate_kernel_serial(const Tensor& t, int axis,
                                                           unsigned ext, uint64_t budget);

// Exact analytic rank: AR = N - log_q(count). Comparisons against integers
// are exact (bignum powers of q), the floating value is for display.
struct ARValue {
    int N = 0;
    uint64_t q = 0;
    u128 count = 0;

    double value() const;
    bool leq(int c) const;    // AR <= c
    bool eq_int(int r) const; // count == q^(N-r) exactly
};

// check_axes verifies count_j * q^(n_j) is the same for every slice axis
// (throws Error when the cross-check fails).
ARValue analytic_rank(const Tensor& t, int axis, uint64_t budget, bool check_axes = false);

// Kernel point with the rank of the Jacobian DT~ there.
struct PointCandidate {
    std::vector<uint32_t> x;
    int jac_rank = 0;
};

// Base-field kernel scan: every point's Jacobian rank, candidates bucketed by
// rank (first max_keep of each, enumeration order) and listed best rank
// first. Throws NoPoint when T is nonzero but no point has positive rank.
struct RegularPointScan {
    std::vector<PointCandidate> candidates;
    int max_rank = 0;
    u128 kernel_count = 0;
};
RegularPointScan find_regular_point(const Tensor& t, int axis, uint64_t budget, int max_keep = 8);

// Dimension estimate from counts over extensions e = 1..max_ext (stopping at
// the budget): consecutive-ratio exponents round(log_q(count_{e+1}/count_e))
// cancel the leading constant; the estimate comes from the largest pair and
// is flagged unstable when the ratios disagree or only one count fits.
struct KernelReport {
    int axis = 0; // 0-based
    int N = 0;
    uint64_t q = 0;
    std::vector<std::pair<unsigned, u128>> counts; // (extension degree, count)
    int dim_est = 0;
    int gr_est = 0;
    bool unstable = false;
    std::vector<PointCandidate> candidates; // filled when base enumeration fits
};
KernelReport estimate_dim(const Tensor& t, int axis, unsigned max_ext, uint64_t budget);

// Symbolic Jacobian of the slice forms: entry (l, v) = d forms[l] / d x_v.
Mat<RatFunc> jacobian_map(const Slicing& s);

// Projection onto the kernel of the Jacobian, exact at and around x0: P is
// idempotent, J P = 0 as rational functions, and the pivot minor's
// determinant is nonzero at x0. codim = rank of J at x0.
struct TangentProjection {
    Mat<RatFunc> P;
    PivotSelection piv;
    int codim = 0;
    MultiPoly pivot_det;
};
TangentProjection tangent_projection(const Slicing& s, const std::vector<Fe>& x0);

} // namespace prd
