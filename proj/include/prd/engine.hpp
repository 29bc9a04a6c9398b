#pragma once

// Certified partition-rank decomposition. Slice the tensor along one axis,
// pick a kernel point where the Jacobian has maximal rank r, rank-factor the
// Jacobian there, then repeatedly differentiate the factorization while
// projecting every derivative onto the Jacobian's kernel. After k-2 rounds
// this yields a decomposition of the full derivative tensor D^(k-1)T~ whose
// block restriction recovers T with at most (2^(k-1)-1) * r terms. The result
// is verified entrywise before it is returned.
//
// All symbolic data lives in the localization at the pivot minor's
// determinant: a map is a polynomial numerator vector over det^pow. That
// keeps derivatives polynomial (the denominator power just steps up) instead
// of squaring denominators. The driver also recenters coordinates so the
// base point is the origin and truncates every numerator to the Taylor order
// the remaining derivative rounds can still consume.

#include <cstdint>
#include <string>
#include <vector>

#include "prd/matrix.hpp"
#include "prd/multipoly.hpp"
#include "prd/probe.hpp"
#include "prd/tensor.hpp"
#include "prd/version.hpp"

namespace prd {

// comp / det^pow with a fixed det supplied by the surrounding TangentFrame.
// comp is flat row-major over shape.
struct LocalizedMap {
    unsigned arity = 0;
    std::vector<int> shape;
    std::vector<MultiPoly> comp;
    int pow = 0;
};

// The pivot data of the Jacobian at the base point: det is the pivot minor's
// determinant, p_num = det * P and q_num = det * (I - P) are the polynomial
// numerators of the kernel projection and its complement (N x N, row-major).
struct TangentFrame {
    int n = 0;     // variable count N
    int codim = 0; // Jacobian rank r at the base point
    PivotSelection piv;
    MultiPoly det;
    std::vector<MultiPoly> p_num;
    std::vector<MultiPoly> q_num;
};

// Builds the frame from the slice forms at x0; piv comes from the greedy
// pivot search on the evaluated Jacobian, so det(x0) != 0.
TangentFrame tangent_frame(const Slicing& s, const std::vector<Fe>& x0);

// Constructing element over localized maps: for each bipartition of the axes
// of the order-c derivative tensor (axis 0 of size m, the rest of size N),
// pairs of maps whose pointwise outer products sum to that tensor near the
// base point.
struct SymbolicPairs {
    int order = 0;
    int m = 0;
    int N = 0;
    // Indexed by partition mask-1 (masks over axes 0..order-2).
    std::vector<std::vector<std::pair<LocalizedMap, LocalizedMap>>> pairs;

    std::vector<int> dims() const;
};

// Order-2 base: DT~ = F1 * F2 through the pivot block, one column-row pair
// per pivot. trunc bounds the numerator degree kept (-1 keeps everything;
// only sound once coordinates are centered at the base point).
SymbolicPairs base_case(const Slicing& s, const TangentFrame& fr, int trunc = -1);

// One derivative round: each pair differentiates on either side (projected
// through P), and the slices of D(deriv) at the pivot columns, paired with
// the rows of det * (I - P), absorb the normal directions into the partition
// that isolates the new axis. deriv must be the order-c derivative map
// D^(c-1)T~ with pow = 0.
SymbolicPairs induction_step(const SymbolicPairs& h, const TangentFrame& fr,
                             const LocalizedMap& deriv, int trunc = -1);

// Pointwise evaluation at x0 (den = det(x0)^pow).
ConstructingElement evaluate_pairs(const SymbolicPairs& h, const TangentFrame& fr,
                                   const std::vector<Fe>& x0);

// D^a T~ at x as an (a+1)-tensor [m, N, ..., N]. Entries sum the tensor
// coefficients compatible with the derivative directions (one block each,
// all distinct), times the remaining blocks evaluated at x. At a = k-1 the
// result is constant and x may be empty.
Tensor derivative_tensor(const Tensor& t, int axis, unsigned a, const std::vector<Fe>& x = {});

// Maps a decomposition of D^(k-1)T~ to one of T: axis 0 becomes the slice
// axis, derivative axis t restricts to block t's variable range. Exact in
// every characteristic because each term is multilinear across blocks.
PRDecomposition restrict_to_blocks(const PRDecomposition& big, const Slicing& s);

struct EngineConfig {
    uint64_t budget = kDefaultBudget;
    int max_candidates = 8;
    unsigned degree_limit = kDefaultDegreeLimit;
    int axis = -1; // -1 selects the axis with the largest dimension
};

struct Diagnostics {
    int candidates_tried = 0;
    int kept_rank = 0; // Jacobian rank at the accepted point
    std::string note;  // failure notes from rejected candidates
};

struct Certificate {
    std::vector<int> dims;
    const FieldCtx* field = nullptr;
    uint64_t tensor_hash = 0;
    int axis = 0;                   // 0-based slice axis
    std::vector<uint64_t> x0_codes; // base point, variable codes
    int r_used = 0;
    int bound = 0; // (2^(k-1)-1) * r_used
    PRDecomposition dec;
    bool verified = false;
    Diagnostics diag;
};

// Throws AllCandidatesFailed when no base point yields a verified
// decomposition, NoPoint when no usable kernel point exists, and
// BudgetExceeded when enumeration does not fit cfg.budget.
Certificate decompose(const Tensor& t, const EngineConfig& cfg = {});

} // namespace prd
