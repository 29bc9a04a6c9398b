#pragma once

// Dense k-tensors over a finite field, bipartitions of the axis set,
// partition-rank terms and decompositions, the slicing of a tensor into
// multilinear forms, and the pairing that sends a constructing-space element
// to the tensor it represents.
//
// Axes are 0-based internally; serialized indices are 1-based. A bipartition
// {S, S^c} of the axes is stored canonically as the side S that does not
// contain the last axis, as a bitmask over axes 0..k-2.

#include <cstdint>
#include <utility>
#include <vector>

#include "prd/field.hpp"
#include "prd/matrix.hpp"
#include "prd/multipoly.hpp"

namespace prd {

class Tensor {
  public:
    Tensor() : field_(nullptr) {}
    Tensor(const FieldCtx* field, std::vector<int> dims);

    const FieldCtx* field() const { return field_; }
    const std::vector<int>& dims() const { return dims_; }
    int order() const { return (int)dims_.size(); }
    size_t size() const { return a_.size(); }

    const Fe& at(const std::vector<int>& idx) const { return a_[flat_index(idx)]; }
    void set(const std::vector<int>& idx, const Fe& v) { a_[flat_index(idx)] = v; }
    const Fe& flat(size_t i) const { return a_[i]; }
    Fe& flat(size_t i) { return a_[i]; }

    bool is_zero() const;
    bool operator==(const Tensor& b) const;
    bool operator!=(const Tensor& b) const { return !(*this == b); }
    Tensor operator+(const Tensor& b) const;
    Tensor operator-(const Tensor& b) const;

    // Full multilinear pairing: one argument vector per axis.
    Fe eval(const std::vector<std::vector<Fe>>& args) const;

    size_t flat_index(const std::vector<int>& idx) const;
    // Inverse of flat_index; writes digits into idx.
    void unflatten(size_t flat, std::vector<int>& idx) const;

  private:
    const FieldCtx* field_;
    std::vector<int> dims_;
    std::vector<Fe> a_;
};

// Canonical bipartition of [0, k): the side S excluding axis k-1, nonempty.
struct Partition {
    int k = 0;
    uint32_t mask = 0; // bit i set <=> axis i in S, i in [0, k-1)

    // Number of nontrivial bipartitions of k axes.
    static int count(int k) { return (1 << (k - 1)) - 1; }
    static Partition from_mask(int k, uint32_t mask);
    // Canonicalizes an arbitrary nonempty proper axis subset; swapped reports
    // whether the complement was taken.
    static Partition from_axes(int k, const std::vector<int>& axes, bool* swapped = nullptr);

    std::vector<int> axes_in() const;  // ascending
    std::vector<int> axes_out() const; // ascending, includes axis k-1
    bool operator==(const Partition& b) const { return k == b.k && mask == b.mask; }
};

// Dims of a tensor restricted to the given axes (ascending).
std::vector<int> dims_subset(const std::vector<int>& dims, const std::vector<int>& axes);

// View along one axis: m = dims[axis] multilinear forms in the remaining
// variables, concatenated block per block in ascending axis order.
struct Slicing {
    const FieldCtx* field = nullptr;
    std::vector<int> orig_dims;
    int axis = 0; // 0-based
    int m = 0;    // dims[axis]
    int nvars = 0;
    std::vector<int> block_axes;    // ascending, excludes axis
    std::vector<int> block_dims;    // matching block_axes
    std::vector<int> block_offsets; // variable offset of each block
    std::vector<MultiPoly> forms;   // length m
};

Slicing slice(const Tensor& t, int axis);

// T(x^(1),...,x^(k)) with every block present; equals the pairing of the
// slice forms with the axis block.
Fe tensor_eval(const Tensor& t, const std::vector<std::vector<Fe>>& args);

// Matrix view of t with rows indexed by the S-side multi-index.
Mat<Fe> flatten(const Tensor& t, const Partition& s);

struct PRTerm {
    Partition S;
    Tensor u; // over dims(S)
    Tensor v; // over dims(S^c)
};

struct PRDecomposition {
    std::vector<int> dims;
    std::vector<PRTerm> terms;
};

// The rank-one tensor u (x) v placed on the full index set, axes interleaved
// back into their original order.
Tensor expand_term(const FieldCtx* field, const std::vector<int>& dims, const PRTerm& term);

struct VerifyResult {
    bool ok = false;
    size_t terms = 0;
};

// Exact: sums the terms and compares entrywise.
VerifyResult verify_decomposition(const Tensor& t, const PRDecomposition& d);

// Element of the constructing space: `width` pairs per bipartition (zero
// pairs allowed and ignored by the pairing).
struct ConstructingElement {
    std::vector<int> dims;
    int width = 0;
    // indexed by partition mask-1; each entry holds the (u, v) pairs
    std::vector<std::vector<std::pair<Tensor, Tensor>>> pairs;

    static ConstructingElement empty(const std::vector<int>& dims, int width);
};

// Sum over partitions and pairs of u (x) v.
Tensor ip_apply(const FieldCtx* field, const ConstructingElement& c);

// Forgets the constructing-space structure; drops pairs where u or v is zero.
PRDecomposition constructing_to_decomposition(const ConstructingElement& c);

// Axis permutation: out axis i is input axis perm[i].
Tensor permute_axes(const Tensor& t, const std::vector<int>& perm);
// Restricts one axis to the index range [start, start+len).
Tensor slice_axis_range(const Tensor& t, int axis, int start, int len);

// FNV-1a over field, dims, and entry codes; stable across runs and platforms.
uint64_t tensor_hash(const Tensor& t);

} // namespace prd
