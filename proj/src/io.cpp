#include "prd/io.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "prd/errors.hpp"

using nlohmann::json;

namespace prd {

std::string config_hash(const std::string& canonical) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
    return buf;
}

json element_to_json(const Fe& v) {
    if (v.ctx()->e() == 1) return v.coeffs().empty() ? 0 : v.coeffs()[0];
    json arr = json::array();
    const auto& c = v.coeffs();
    for (unsigned i = 0; i < v.ctx()->e(); ++i) arr.push_back(i < c.size() ? c[i] : 0);
    return arr;
}

Fe element_from_json(const FieldCtx* field, const json& j) {
    if (j.is_number_integer()) return field->from_int(j.get<int64_t>());
    if (!j.is_array()) throw ParseError("field element must be an integer or an array");
    std::vector<uint32_t> c;
    for (const auto& x : j) {
        if (!x.is_number_unsigned() && !x.is_number_integer())
            throw ParseError("element coefficient must be an integer");
        int64_t v = x.get<int64_t>();
        if (v < 0 || (uint64_t)v >= field->p()) throw ParseError("element coefficient out of range");
        c.push_back((uint32_t)v);
    }
    if (c.size() > field->e()) throw ParseError("element has too many coefficients");
    return field->from_coeffs(std::move(c));
}

json tensor_to_json(const Tensor& t) {
    json j;
    j["field"] = {{"p", t.field()->p()}, {"e", t.field()->e()}};
    j["dims"] = t.dims();
    json entries = json::array();
    std::vector<int> idx(t.order());
    for (size_t f = 0; f < t.size(); ++f) {
        if (t.flat(f).is_zero()) continue;
        t.unflatten(f, idx);
        json one;
        json ji = json::array();
        for (int v : idx) ji.push_back(v + 1);
        one["idx"] = std::move(ji);
        one["val"] = element_to_json(t.flat(f));
        entries.push_back(std::move(one));
    }
    j["entries"] = std::move(entries);
    return j;
}

Tensor tensor_from_json(const json& j) {
    if (!j.is_object() || !j.contains("field") || !j.contains("dims") || !j.contains("entries"))
        throw ParseError("tensor file needs field, dims, entries");
    const json& fj = j["field"];
    if (!fj.contains("p")) throw ParseError("field needs p");
    uint64_t p = fj["p"].get<uint64_t>();
    unsigned e = fj.contains("e") ? fj["e"].get<unsigned>() : 1;
    const FieldCtx* field = FieldCtx::make(p, e);

    std::vector<int> dims;
    for (const auto& d : j["dims"]) {
        int n = d.get<int>();
        if (n <= 0) throw ParseError("dims must be positive");
        dims.push_back(n);
    }
    if (dims.empty()) throw ParseError("dims must be nonempty");

    Tensor t(field, dims);
    for (const auto& ent : j["entries"]) {
        if (!ent.contains("idx") || !ent.contains("val"))
            throw ParseError("entry needs idx and val");
        const json& ji = ent["idx"];
        if (ji.size() != dims.size()) throw ParseError("entry index arity mismatch");
        std::vector<int> idx;
        for (size_t a = 0; a < ji.size(); ++a) {
            int v = ji[a].get<int>();
            if (v < 1 || v > dims[a]) throw ParseError("entry index out of range");
            idx.push_back(v - 1);
        }
        t.set(idx, element_from_json(field, ent["val"]));
    }
    return t;
}

namespace {

json u128_to_json(u128 v) {
    if (v <= (u128)UINT64_MAX) return (uint64_t)v;
    return u128_to_string(v);
}

json point_to_json(const FieldCtx* field, const std::vector<uint32_t>& codes) {
    json arr = json::array();
    for (uint32_t c : codes) arr.push_back(element_to_json(field->element(c)));
    return arr;
}

} // namespace

json certificate_to_json(const Certificate& c, const std::string& cfg_hash) {
    json j;
    j["tool_version"] = kVersion;
    j["config_hash"] = cfg_hash;
    j["dims"] = c.dims;
    j["field"] = {{"p", c.field->p()}, {"e", c.field->e()}};
    j["tensor_hash"] = c.tensor_hash;
    j["axis"] = c.axis + 1;
    json x0 = json::array();
    for (uint64_t code : c.x0_codes) x0.push_back(element_to_json(c.field->element(code)));
    j["x0"] = std::move(x0);
    j["r_used"] = c.r_used;
    j["bound"] = c.bound;
    j["verified"] = c.verified;
    json terms = json::array();
    for (const PRTerm& term : c.dec.terms) {
        json tj;
        json s = json::array();
        for (int a : term.S.axes_in()) s.push_back(a + 1);
        tj["S"] = std::move(s);
        tj["u"] = tensor_to_json(term.u);
        tj["v"] = tensor_to_json(term.v);
        terms.push_back(std::move(tj));
    }
    j["terms"] = std::move(terms);
    j["diagnostics"] = {{"candidates_tried", c.diag.candidates_tried},
                        {"kept_rank", c.diag.kept_rank},
                        {"note", c.diag.note}};
    return j;
}

ParsedCertificate certificate_from_json(const json& j) {
    if (!j.is_object() || !j.contains("dims") || !j.contains("field") || !j.contains("terms"))
        throw ParseError("certificate needs dims, field, terms");
    ParsedCertificate out;
    for (const auto& d : j["dims"]) out.dims.push_back(d.get<int>());
    int k = (int)out.dims.size();
    if (k == 0) throw ParseError("certificate dims must be nonempty");
    uint64_t p = j["field"]["p"].get<uint64_t>();
    unsigned e = j["field"].contains("e") ? j["field"]["e"].get<unsigned>() : 1;
    out.field = FieldCtx::make(p, e);
    out.verified = j.value("verified", false);
    out.bound = j.value("bound", 0);
    out.r_used = j.value("r_used", 0);
    out.axis = j.value("axis", 1) - 1;
    out.dec.dims = out.dims;
    for (const auto& tj : j["terms"]) {
        if (!tj.contains("S") || !tj.contains("u") || !tj.contains("v"))
            throw ParseError("certificate term needs S, u, v");
        std::vector<int> axes;
        for (const auto& a : tj["S"]) {
            int v = a.get<int>();
            if (v < 1 || v > k) throw ParseError("S axis out of range");
            axes.push_back(v - 1);
        }
        bool swapped = false;
        PRTerm term;
        term.S = Partition::from_axes(k, axes, &swapped);
        Tensor u = tensor_from_json(tj["u"]);
        Tensor v = tensor_from_json(tj["v"]);
        term.u = swapped ? std::move(v) : std::move(u);
        term.v = swapped ? std::move(u) : std::move(v);
        if (term.u.dims() != dims_subset(out.dims, term.S.axes_in()) ||
            term.v.dims() != dims_subset(out.dims, term.S.axes_out()))
            throw ParseError("certificate term shape mismatch");
        if (term.u.field() != out.field || term.v.field() != out.field)
            throw ParseError("certificate term field mismatch");
        out.dec.terms.push_back(std::move(term));
    }
    return out;
}

json kernel_report_to_json(const KernelReport& rep, const FieldCtx* field,
                           const std::string& cfg_hash) {
    json j;
    j["tool_version"] = kVersion;
    j["config_hash"] = cfg_hash;
    j["axis"] = rep.axis + 1;
    j["N"] = rep.N;
    j["q"] = rep.q;
    json counts = json::object();
    for (const auto& [e, c] : rep.counts) counts[std::to_string(e)] = u128_to_json(c);
    j["counts"] = std::move(counts);
    j["dim_est"] = rep.dim_est;
    j["gr_est"] = rep.gr_est;
    j["unstable"] = rep.unstable;
    json cands = json::array();
    for (const auto& c : rep.candidates)
        cands.push_back({{"point", point_to_json(field, c.x)}, {"rank", c.jac_rank}});
    j["candidates"] = std::move(cands);
    return j;
}

namespace {

std::string dims_str(const std::vector<int>& dims) {
    std::string s;
    for (size_t i = 0; i < dims.size(); ++i) {
        if (i) s += 'x';
        s += std::to_string(dims[i]);
    }
    return s;
}

} // namespace

json audit_to_json(const AuditRecord& rec) {
    json j;
    j["q"] = rec.q;
    j["dims"] = rec.dims;
    j["axis"] = rec.axis + 1;
    j["N"] = rec.N;
    if (rec.ar_ok) {
        j["ar_count"] = u128_to_json(rec.ar_count);
        j["ar_value"] = rec.ar_value;
    } else {
        j["ar_count"] = nullptr;
        j["ar_value"] = nullptr;
    }
    j["pr"] = rec.pr >= 0 ? json(rec.pr) : json(nullptr);
    j["pr_exact"] = rec.pr_exact;
    j["gr_est"] = rec.gr_est >= 0 ? json(rec.gr_est) : json(nullptr);
    j["gr_stable"] = rec.gr_stable;
    j["cert_terms"] = rec.cert_terms >= 0 ? json(rec.cert_terms) : json(nullptr);
    j["cert_bound"] = rec.cert_bound >= 0 ? json(rec.cert_bound) : json(nullptr);
    j["cert_verified"] = rec.cert_verified;
    j["holds_ar_le_pr"] = rec.holds_ar_le_pr;
    j["holds_thm11"] = rec.holds_thm11;
    j["holds_thm12"] = rec.holds_thm12;
    j["note"] = rec.note;
    return j;
}

std::string audit_csv_header() {
    return "tensor_id,q,dims,ar_count,ar_value,pr,gr_est,cert_terms,thm11,thm12";
}

std::string audit_csv_row(int tensor_id, const AuditRecord& rec) {
    std::ostringstream os;
    os << tensor_id << ',' << rec.q << ',' << dims_str(rec.dims) << ',';
    if (rec.ar_ok) {
        os << u128_to_string(rec.ar_count) << ',';
        char buf[32];
        snprintf(buf, sizeof buf, "%.6f", rec.ar_value);
        os << buf << ',';
    } else {
        os << ",,";
    }
    if (rec.pr >= 0) os << rec.pr;
    os << ',';
    if (rec.gr_est >= 0) os << rec.gr_est;
    os << ',';
    if (rec.cert_terms >= 0) os << rec.cert_terms;
    os << ',' << (rec.holds_thm11 ? 1 : 0) << ',' << (rec.holds_thm12 ? 1 : 0);
    return os.str();
}

Tensor random_tensor(const FieldCtx* field, const std::vector<int>& dims, uint64_t seed,
                     double density) {
    Tensor t(field, dims);
    std::mt19937_64 rng(seed);
    uint64_t q = field->q();
    bool gated = density < 1.0;
    uint64_t threshold = 0;
    if (gated && density > 0.0) threshold = (uint64_t)(density * 18446744073709551615.0);
    for (size_t f = 0; f < t.size(); ++f) {
        if (gated) {
            if (density <= 0.0 || rng() > threshold) continue;
        }
        t.flat(f) = field->element(rng() % q);
    }
    return t;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return j;
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
}

} // namespace prd
