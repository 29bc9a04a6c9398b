// prdecomp: exact partition-rank decomposition certificates and rank probes
// for small tensors over finite fields.
//
// Exit codes: 0 success / verified, 1 usage or input error, 2 unverified or
// failed, 3 budget exceeded.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "prd/engine.hpp"
#include "prd/errors.hpp"
#include "prd/io.hpp"
#include "prd/oracles.hpp"
#include "prd/probe.hpp"

using nlohmann::json;
using namespace prd;

namespace {

struct FieldSpec {
    uint64_t p = 0;
    unsigned e = 1;
};

FieldSpec parse_field(const std::string& s) {
    FieldSpec fs;
    size_t caret = s.find('^');
    try {
        fs.p = std::stoull(s.substr(0, caret));
        if (caret != std::string::npos) fs.e = (unsigned)std::stoul(s.substr(caret + 1));
    } catch (const std::exception&) {
        throw CLI::ValidationError("--field", "expected p or p^e");
    }
    if (fs.p < 2 || fs.e < 1) throw CLI::ValidationError("--field", "expected p or p^e");
    return fs;
}

std::vector<int> parse_dims(const std::string& s) {
    std::vector<int> dims;
    size_t pos = 0;
    while (pos <= s.size()) {
        size_t x = s.find('x', pos);
        std::string part = s.substr(pos, x == std::string::npos ? x : x - pos);
        try {
            dims.push_back(std::stoi(part));
        } catch (const std::exception&) {
            throw CLI::ValidationError("--dims", "expected n1xn2x...");
        }
        if (dims.back() <= 0) throw CLI::ValidationError("--dims", "dims must be positive");
        if (x == std::string::npos) break;
        pos = x + 1;
    }
    return dims;
}

uint64_t default_budget() {
    if (const char* env = std::getenv("PRDECOMP_BUDGET")) {
        char* end = nullptr;
        uint64_t v = strtoull(env, &end, 10);
        if (end && *end == '\0' && v > 0) return v;
    }
    return kDefaultBudget;
}

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty())
        std::cout << j.dump(2) << '\n';
    else
        write_json_file(out_path, j);
}

// Same default the engine uses when no axis is given.
int resolve_axis(const Tensor& t, int axis_flag) {
    if (axis_flag > 0) {
        if (axis_flag > t.order()) throw CLI::ValidationError("--axis", "axis out of range");
        return axis_flag - 1;
    }
    int axis = 0;
    for (int a = 1; a < t.order(); ++a)
        if (t.dims()[a] > t.dims()[axis]) axis = a;
    return axis;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"partition-rank decomposition toolkit"};
    app.set_version_flag("--version", std::string("prdecomp ") + kVersion);
    app.require_subcommand(1);
    // Let global flags like --budget appear after the subcommand name.
    app.fallthrough();

    uint64_t budget = default_budget();
    app.add_option("--budget", budget, "work budget for enumeration and search");

    std::string field_str, dims_str, out_path, tensor_path, cert_path, report_fmt = "csv";
    uint64_t seed = 0;
    double density = 1.0;
    int count = 1, axis_flag = 0, max_candidates = 8, max_ext = 3;

    auto* gen = app.add_subcommand("gen", "write a seeded random tensor");
    gen->add_option("--field", field_str, "field, p or p^e")->required();
    gen->add_option("--dims", dims_str, "dimensions, n1xn2x...")->required();
    gen->add_option("--seed", seed, "generator seed");
    gen->add_option("--density", density, "probability an entry is drawn");
    gen->add_option("--out", out_path, "output file (default stdout)");

    auto* ar = app.add_subcommand("ar", "exact analytic rank from the kernel count");
    ar->add_option("tensor", tensor_path, "tensor JSON file")->required();
    ar->add_option("--axis", axis_flag, "slice axis, 1-based (default: largest dim)");

    auto* dim = app.add_subcommand("dim", "kernel counts over extensions and dimension estimate");
    dim->add_option("tensor", tensor_path, "tensor JSON file")->required();
    dim->add_option("--axis", axis_flag, "slice axis, 1-based (default: largest dim)");
    dim->add_option("--max-ext", max_ext, "largest extension degree to count over");

    auto* dec = app.add_subcommand("decompose", "certified partition-rank decomposition");
    dec->add_option("tensor", tensor_path, "tensor JSON file")->required();
    dec->add_option("--axis", axis_flag, "slice axis, 1-based (default: largest dim)");
    dec->add_option("--max-candidates", max_candidates, "base points to try");
    dec->add_option("--out", out_path, "certificate file (default stdout)");

    auto* ver = app.add_subcommand("verify", "check a certificate against a tensor");
    ver->add_option("tensor", tensor_path, "tensor JSON file")->required();
    ver->add_option("cert", cert_path, "certificate JSON file")->required();

    auto* corpus = app.add_subcommand("corpus", "seeded sweep: gen, decompose, audit");
    corpus->add_option("--field", field_str, "field, p or p^e")->required();
    corpus->add_option("--dims", dims_str, "dimensions, n1xn2x...")->required();
    corpus->add_option("--count", count, "number of tensors");
    corpus->add_option("--seed", seed, "base seed; tensor i uses seed+i");
    corpus->add_option("--density", density, "probability an entry is drawn");
    corpus->add_option("--report", report_fmt, "report format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    corpus->add_option("--out", out_path, "report file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (gen->parsed()) {
            FieldSpec fs = parse_field(field_str);
            std::vector<int> dims = parse_dims(dims_str);
            const FieldCtx* field = FieldCtx::make(fs.p, fs.e);
            Tensor t = random_tensor(field, dims, seed, density);
            emit(tensor_to_json(t), out_path);
            return 0;
        }

        if (ar->parsed()) {
            Tensor t = tensor_from_json(read_json_file(tensor_path));
            int axis = resolve_axis(t, axis_flag);
            std::string cfg = "cmd=ar;axis=" + std::to_string(axis + 1) +
                              ";budget=" + std::to_string(budget);
            ARValue v = analytic_rank(t, axis, budget);
            json j;
            j["tool_version"] = kVersion;
            j["config_hash"] = config_hash(cfg);
            j["axis"] = axis + 1;
            j["N"] = v.N;
            j["q"] = v.q;
            j["count"] = v.count <= (u128)UINT64_MAX ? json((uint64_t)v.count)
                                                     : json(u128_to_string(v.count));
            j["ar"] = v.value();
            std::cout << j.dump(2) << '\n';
            return 0;
        }

        if (dim->parsed()) {
            Tensor t = tensor_from_json(read_json_file(tensor_path));
            int axis = resolve_axis(t, axis_flag);
            std::string cfg = "cmd=dim;axis=" + std::to_string(axis + 1) +
                              ";max_ext=" + std::to_string(max_ext) +
                              ";budget=" + std::to_string(budget);
            KernelReport rep = estimate_dim(t, axis, (unsigned)max_ext, budget);
            std::cout << kernel_report_to_json(rep, t.field(), config_hash(cfg)).dump(2) << '\n';
            return 0;
        }

        if (dec->parsed()) {
            Tensor t = tensor_from_json(read_json_file(tensor_path));
            EngineConfig cfg;
            cfg.budget = budget;
            cfg.max_candidates = max_candidates;
            if (axis_flag > 0) cfg.axis = axis_flag - 1;
            std::string canon = "cmd=decompose;axis=" + std::to_string(cfg.axis + 1) +
                                ";max_candidates=" + std::to_string(cfg.max_candidates) +
                                ";budget=" + std::to_string(budget);
            try {
                Certificate cert = decompose(t, cfg);
                emit(certificate_to_json(cert, config_hash(canon)), out_path);
                return cert.verified ? 0 : 2;
            } catch (const BudgetExceeded&) {
                throw;
            } catch (const Error& e) {
                json j;
                j["tool_version"] = kVersion;
                j["config_hash"] = config_hash(canon);
                j["dims"] = t.dims();
                j["field"] = {{"p", t.field()->p()}, {"e", t.field()->e()}};
                j["tensor_hash"] = tensor_hash(t);
                j["verified"] = false;
                j["terms"] = json::array();
                j["diagnostics"] = {{"note", e.what()}};
                emit(j, out_path);
                return 2;
            }
        }

        if (ver->parsed()) {
            Tensor t = tensor_from_json(read_json_file(tensor_path));
            ParsedCertificate pc = certificate_from_json(read_json_file(cert_path));
            if (pc.field != t.field() || pc.dims != t.dims()) {
                fprintf(stderr, "certificate does not match tensor shape or field\n");
                return 2;
            }
            VerifyResult vr = verify_decomposition(t, pc.dec);
            bool ok = vr.ok && (int)vr.terms <= pc.bound;
            printf("%s: %zu terms, bound %d\n", ok ? "verified" : "FAILED", vr.terms, pc.bound);
            return ok ? 0 : 2;
        }

        if (corpus->parsed()) {
            FieldSpec fs = parse_field(field_str);
            std::vector<int> dims = parse_dims(dims_str);
            const FieldCtx* field = FieldCtx::make(fs.p, fs.e);
            EngineConfig cfg;
            cfg.budget = budget;
            std::string canon = "cmd=corpus;field=" + std::to_string(fs.p) + "^" +
                                std::to_string(fs.e) + ";dims=" + dims_str +
                                ";count=" + std::to_string(count) +
                                ";seed=" + std::to_string(seed) +
                                ";density=" + std::to_string(density) +
                                ";budget=" + std::to_string(budget);
            std::string hash = config_hash(canon);

            std::vector<AuditRecord> rows;
            rows.reserve(count);
            for (int i = 0; i < count; ++i) {
                Tensor t = random_tensor(field, dims, seed + (uint64_t)i, density);
                rows.push_back(check_inequalities(t, cfg));
            }

            if (report_fmt == "csv") {
                std::string text = "# prdecomp " + std::string(kVersion) + " config " +
                                   hash + "\n" + audit_csv_header() + "\n";
                for (int i = 0; i < count; ++i) text += audit_csv_row(i, rows[i]) + "\n";
                if (out_path.empty()) {
                    fputs(text.c_str(), stdout);
                } else {
                    FILE* f = fopen(out_path.c_str(), "w");
                    if (!f) throw ParseError("cannot open " + out_path + " for writing");
                    fputs(text.c_str(), f);
                    fclose(f);
                }
            } else {
                json j;
                j["tool_version"] = kVersion;
                j["config_hash"] = hash;
                json arr = json::array();
                for (int i = 0; i < count; ++i) {
                    json row = audit_to_json(rows[i]);
                    row["tensor_id"] = i;
                    arr.push_back(std::move(row));
                }
                j["rows"] = std::move(arr);
                emit(j, out_path);
            }
            return 0;
        }
    } catch (const BudgetExceeded& e) {
        fprintf(stderr, "budget exceeded: %s\n", e.what());
        return 3;
    } catch (const ParseError& e) {
        fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const CLI::ValidationError& e) {
        fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const Error& e) {
        fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 1;
}
