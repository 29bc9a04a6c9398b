#pragma once

// Sparse multivariate polynomials over a finite field, the fraction type
// built on them, and shaped rational maps F^n -> tensors of rational
// functions. Terms are kept in graded lexicographic order so serialization
// and iteration are deterministic. Rational functions are *not* reduced to
// lowest terms (no polynomial gcd); the only normalization is stripping
// common monomial content and scaling the denominator monic. Zero tests and
// equality go through cross multiplication, which is exact.

#include <cstdint>
#include <map>
#include <vector>

#include "prd/field.hpp"

namespace prd {

using ExpVec = std::vector<uint16_t>;

// Process-wide total-degree ceiling; products that would exceed it throw
// DegreeBlowup.
int poly_degree_limit();
void set_poly_degree_limit(int limit);

struct GradedLexLess {
    bool operator()(const ExpVec& a, const ExpVec& b) const {
        unsigned da = 0, db = 0;
        for (auto v : a) da += v;
        for (auto v : b) db += v;
        if (da != db) return da < db;
        return a < b; // same grade: plain lexicographic
    }
};

class RatFunc;

class MultiPoly {
  public:
    MultiPoly() : field_(nullptr), nvars_(0) {}
    static MultiPoly zero(const FieldCtx* field, unsigned nvars);
    static MultiPoly constant(const FieldCtx* field, unsigned nvars, const Fe& c);
    static MultiPoly variable(const FieldCtx* field, unsigned nvars, unsigned j);

    const FieldCtx* field() const { return field_; }
    unsigned nvars() const { return nvars_; }
    bool is_zero() const { return terms_.empty(); }
    size_t nterms() const { return terms_.size(); }
    int total_degree() const; // -1 for the zero polynomial

    const std::map<ExpVec, Fe, GradedLexLess>& terms() const { return terms_; }

    // Adds c * x^exp into the polynomial.
    void add_term(const ExpVec& exp, const Fe& c);

    MultiPoly operator+(const MultiPoly& b) const;
    MultiPoly operator-(const MultiPoly& b) const;
    MultiPoly operator*(const MultiPoly& b) const;
    MultiPoly operator-() const;
    MultiPoly scaled(const Fe& c) const;
    bool operator==(const MultiPoly& b) const;
    bool operator!=(const MultiPoly& b) const { return !(*this == b); }

    Fe eval(const std::vector<Fe>& x) const;
    MultiPoly partial(unsigned j) const;

    // Drops every term of total degree above maxdeg (maxdeg < 0 keeps all).
    MultiPoly truncated(int maxdeg) const;
    // p(x + c): recenters the polynomial at -c.
    MultiPoly shifted(const std::vector<Fe>& c) const;

    // Coefficient of the graded-lex leading term; zero element if poly is 0.
    Fe leading_coeff() const;

    // Componentwise minimum exponent over all terms ({} if zero).
    ExpVec min_exponents() const;
    // Divides by the monomial x^shift; every term must be divisible.
    MultiPoly shifted_down(const ExpVec& shift) const;

    // Substitution x_j := args[j]; returns a rational function since the
    // arguments may have denominators.
    RatFunc subst(const std::vector<RatFunc>& args) const;

  private:
    const FieldCtx* field_;
    unsigned nvars_;
    std::map<ExpVec, Fe, GradedLexLess> terms_;
};

class RatFunc {
  public:
    RatFunc() = default;
    // den must be nonzero.
    RatFunc(MultiPoly num, MultiPoly den, bool strip_content = true);
    static RatFunc from_poly(MultiPoly p);
    static RatFunc zero(const FieldCtx* field, unsigned nvars);
    static RatFunc one(const FieldCtx* field, unsigned nvars);
    static RatFunc variable(const FieldCtx* field, unsigned nvars, unsigned j);
    static RatFunc constant(const FieldCtx* field, unsigned nvars, const Fe& c);

    const MultiPoly& num() const { return num_; }
    const MultiPoly& den() const { return den_; }
    const FieldCtx* field() const { return num_.field(); }
    unsigned nvars() const { return num_.nvars(); }

    bool is_zero() const { return num_.is_zero(); }
    RatFunc zero_like() const { return zero(field(), nvars()); }
    RatFunc one_like() const { return one(field(), nvars()); }

    RatFunc operator+(const RatFunc& b) const;
    RatFunc operator-(const RatFunc& b) const;
    RatFunc operator*(const RatFunc& b) const;
    RatFunc operator/(const RatFunc& b) const; // DivisionByZero
    RatFunc operator-() const;
    RatFunc& operator+=(const RatFunc& b) { return *this = *this + b; }

    // Field equality by cross multiplication.
    bool operator==(const RatFunc& b) const;
    bool operator!=(const RatFunc& b) const { return !(*this == b); }

    Fe eval(const std::vector<Fe>& x) const; // OutsideDomain if den(x) = 0

    // Quotient rule, denominator kept as den^2 (no content strip, so the
    // domain is preserved syntactically).
    RatFunc partial(unsigned j) const;

  private:
    MultiPoly num_, den_;
};

// A tensor-shaped tuple of rational functions of a common argument
// x in F^arity. Components are stored flat in row-major order.
struct RationalMap {
    unsigned arity = 0;
    std::vector<int> shape;
    std::vector<RatFunc> comp;

    size_t size() const { return comp.size(); }
    static size_t shape_size(const std::vector<int>& s);
    static RationalMap zeros(const FieldCtx* field, unsigned arity, std::vector<int> shape);

    const RatFunc& at(const std::vector<int>& idx) const;
    RatFunc& at(const std::vector<int>& idx);

    std::vector<Fe> eval(const std::vector<Fe>& x) const;

    // Appends one axis of length `arity`; entry (alpha, j) = d comp[alpha] / d x_j.
    RationalMap total_derivative() const;
    RationalMap higher_derivative(unsigned a) const;
};

// Composition F(G(x)): the flat component count of G must equal F.arity.
// Throws OutsideDomain if a composed denominator vanishes identically.
RationalMap map_compose(const RationalMap& F, const RationalMap& G);

} // namespace prd
