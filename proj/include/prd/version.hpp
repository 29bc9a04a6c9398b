#pragma once

namespace prd {

inline constexpr const char* kVersion = "0.1.0";

// Enumeration budget used when the caller does not pass one. Counts ambient
// points q^(e*N); overridable through the PRDECOMP_BUDGET environment variable.
inline constexpr unsigned long long kDefaultBudget = 1ull << 20;

// Total-degree ceiling for polynomial arithmetic. Derivative towers grow
// denominator degrees quickly; hitting this aborts with DegreeBlowup instead
// of thrashing.
inline constexpr int kDefaultDegreeLimit = 512;

} // namespace prd
