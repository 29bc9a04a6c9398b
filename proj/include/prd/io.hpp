#pragma once

// File formats and generation: tensor / certificate / kernel-report JSON,
// audit CSV rows, seeded random tensors, and provenance stamps.
//
// Conventions: every serialized index tuple is 1-based (axes included); field
// elements are a single integer for prime fields and the coefficient vector
// [c_0, ..., c_{e-1}] otherwise; counts that do not fit an unsigned 64-bit
// integer are emitted as decimal strings.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "prd/engine.hpp"
#include "prd/version.hpp"
#include "prd/oracles.hpp"
#include "prd/probe.hpp"
#include "prd/tensor.hpp"

namespace prd {

// FNV-1a of a canonical "key=value;..." config string, as fixed-width hex.
std::string config_hash(const std::string& canonical);

nlohmann::json element_to_json(const Fe& v);
Fe element_from_json(const FieldCtx* field, const nlohmann::json& j);

nlohmann::json tensor_to_json(const Tensor& t);
Tensor tensor_from_json(const nlohmann::json& j); // ParseError

nlohmann::json certificate_to_json(const Certificate& c, const std::string& cfg_hash);

// The certificate fields verification needs; S sides are canonicalized on
// read (u and v swap when the file stored the complement side).
struct ParsedCertificate {
    std::vector<int> dims;
    const FieldCtx* field = nullptr;
    PRDecomposition dec;
    bool verified = false;
    int bound = 0;
    int r_used = 0;
    int axis = 0; // 0-based
};
ParsedCertificate certificate_from_json(const nlohmann::json& j);

nlohmann::json kernel_report_to_json(const KernelReport& rep, const FieldCtx* field,
                                     const std::string& cfg_hash);

nlohmann::json audit_to_json(const AuditRecord& rec);
// Column order: tensor_id, q, dims, ar_count, ar_value, pr, gr_est,
// cert_terms, thm11, thm12.
std::string audit_csv_header();
std::string audit_csv_row(int tensor_id, const AuditRecord& rec);

// Deterministic tensor for fixed (field, dims, seed, density): entries in
// flat order; density is the probability an entry is drawn at all, and drawn
// entries are uniform over the whole field (density >= 1 skips the gate).
Tensor random_tensor(const FieldCtx* field, const std::vector<int>& dims, uint64_t seed,
                     double density = 1.0);

nlohmann::json read_json_file(const std::string& path); // ParseError
void write_json_file(const std::string& path, const nlohmann::json& j);

} // namespace prd
