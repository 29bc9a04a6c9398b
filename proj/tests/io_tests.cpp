#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <random>

#include "prd/io.hpp"

using namespace prd;
using nlohmann::json;

namespace {

Tensor wtensor(const FieldCtx* f) {
    Tensor t(f, {2, 2, 2});
    t.set({0, 0, 1}, f->one());
    t.set({0, 1, 0}, f->one());
    t.set({1, 0, 0}, f->one());
    return t;
}

} // namespace

TEST_CASE("field elements serialize as integers or coefficient vectors") {
    const FieldCtx* F7 = FieldCtx::make(7, 1);
    CHECK(element_to_json(F7->from_int(4)) == json(4));
    CHECK(element_from_json(F7, json(4)) == F7->from_int(4));

    const FieldCtx* F9 = FieldCtx::make(3, 2);
    Fe g = F9->element(5); // coefficients (2, 1)
    json j = element_to_json(g);
    REQUIRE(j.is_array());
    CHECK(j == json::array({2, 1}));
    CHECK(element_from_json(F9, j) == g);
    CHECK_THROWS_AS(element_from_json(F7, json::parse("\"x\"")), ParseError);
    CHECK_THROWS_AS(element_from_json(F7, json::array({9})), ParseError);
}

TEST_CASE("tensor json round trip uses 1-based sparse entries") {
    const FieldCtx* F5 = FieldCtx::make(5, 1);
    Tensor w = wtensor(F5);
    json j = tensor_to_json(w);
    CHECK(j["field"]["p"] == 5);
    CHECK(j["field"]["e"] == 1);
    CHECK(j["dims"] == json::array({2, 2, 2}));
    REQUIRE(j["entries"].size() == 3);
    // Entries walk the flat order; the first nonzero of W is (0,0,1) -> 1-based (1,1,2).
    CHECK(j["entries"][0]["idx"] == json::array({1, 1, 2}));
    CHECK(j["entries"][0]["val"] == json(1));
    CHECK(tensor_from_json(j) == w);

    // Extension-field entries carry coefficient vectors.
    const FieldCtx* F4 = FieldCtx::make(2, 2);
    Tensor t(F4, {2, 2});
    t.set({0, 1}, F4->element(2));
    json j2 = tensor_to_json(t);
    CHECK(j2["entries"][0]["val"] == json::array({0, 1}));
    CHECK(tensor_from_json(j2) == t);
}

TEST_CASE("tensor parsing rejects malformed input") {
    json good = tensor_to_json(wtensor(FieldCtx::make(5, 1)));
    json bad = good;
    bad["entries"][0]["idx"] = json::array({1, 1});
    CHECK_THROWS_AS(tensor_from_json(bad), ParseError);
    bad = good;
    bad["entries"][0]["idx"] = json::array({1, 1, 3});
    CHECK_THROWS_AS(tensor_from_json(bad), ParseError);
    bad = good;
    bad["entries"][0]["idx"] = json::array({0, 1, 1}); // 0 is not a valid 1-based index
    CHECK_THROWS_AS(tensor_from_json(bad), ParseError);
    bad = good;
    bad.erase("dims");
    CHECK_THROWS_AS(tensor_from_json(bad), ParseError);
}

TEST_CASE("certificate json round trips and canonicalizes the partition side") {
    const FieldCtx* F3 = FieldCtx::make(3, 1);
    Tensor w = wtensor(F3);
    Certificate cert = decompose(w);
    REQUIRE(cert.verified);
    json j = certificate_to_json(cert, config_hash("test"));
    CHECK(j["tool_version"] == kVersion);
    CHECK(j["axis"] == cert.axis + 1);
    CHECK(j["bound"] == 6);

    ParsedCertificate pc = certificate_from_json(j);
    CHECK(pc.dims == w.dims());
    CHECK(pc.field == F3);
    CHECK(pc.bound == cert.bound);
    CHECK(pc.r_used == cert.r_used);
    CHECK(pc.verified);
    CHECK(verify_decomposition(w, pc.dec).ok);

    // A file that stores the complement side S still parses to the same
    // canonical terms, with u and v swapped.
    json term = j["terms"][0];
    std::vector<int> s_axes = term["S"].get<std::vector<int>>();
    json flipped = json::array();
    for (int a = 1; a <= 3; ++a)
        if (std::find(s_axes.begin(), s_axes.end(), a) == s_axes.end()) flipped.push_back(a);
    json j2 = j;
    j2["terms"][0]["S"] = flipped;
    std::swap(j2["terms"][0]["u"], j2["terms"][0]["v"]);
    ParsedCertificate pc2 = certificate_from_json(j2);
    CHECK(verify_decomposition(w, pc2.dec).ok);
}

TEST_CASE("kernel report json carries counts keyed by extension degree") {
    const FieldCtx* F2 = FieldCtx::make(2, 1);
    Tensor w = wtensor(F2);
    KernelReport rep = estimate_dim(w, 2, 3, 1 << 22);
    json j = kernel_report_to_json(rep, F2, config_hash("test"));
    CHECK(j["axis"] == 3);
    CHECK(j["N"] == 4);
    CHECK(j["q"] == 2);
    CHECK(j["counts"]["1"] == 8);
    CHECK(j["counts"]["2"] == 40);
    CHECK(j["counts"]["3"] == 176);
    CHECK(j["dim_est"] == 2);
    CHECK(j["gr_est"] == 2);
    CHECK(j["unstable"] == false);
    CHECK(j["candidates"].is_array());
}

TEST_CASE("audit csv rows follow the pinned column order") {
    CHECK(audit_csv_header() ==
          "tensor_id,q,dims,ar_count,ar_value,pr,gr_est,cert_terms,thm11,thm12");
    AuditRecord rec = check_inequalities(wtensor(FieldCtx::make(3, 1)));
    std::string row = audit_csv_row(7, rec);
    CHECK(row == "7,3,2x2x2,21,1.228756,2,2,2,1,1");
    json j = audit_to_json(rec);
    CHECK(j["pr"] == 2);
    CHECK(j["gr_est"] == 2);
    CHECK(j["cert_terms"] == 2);
    CHECK(j["holds_ar_le_pr"] == true);
}

TEST_CASE("random tensors are reproducible and density-controlled") {
    const FieldCtx* F5 = FieldCtx::make(5, 1);
    Tensor a = random_tensor(F5, {2, 3, 2}, 42);
    Tensor b = random_tensor(F5, {2, 3, 2}, 42);
    CHECK(a == b);
    Tensor c = random_tensor(F5, {2, 3, 2}, 43);
    CHECK(a != c);
    CHECK(random_tensor(F5, {3, 3, 3}, 1, 0.0).is_zero());

    // Density 1 draws every entry uniformly; check rough uniformity over F2.
    const FieldCtx* F2 = FieldCtx::make(2, 1);
    int ones = 0, total = 0;
    for (uint64_t seed = 0; seed < 40; ++seed) {
        Tensor t = random_tensor(F2, {4, 4, 4}, seed, 1.0);
        for (size_t i = 0; i < t.size(); ++i) {
            ones += t.flat(i).is_zero() ? 0 : 1;
            ++total;
        }
    }
    double frac = (double)ones / total;
    CHECK(frac > 0.45);
    CHECK(frac < 0.55);
}

TEST_CASE("json files round trip through disk") {
    const FieldCtx* F3 = FieldCtx::make(3, 1);
    Tensor w = wtensor(F3);
    std::string path = "io_test_tensor.json";
    write_json_file(path, tensor_to_json(w));
    CHECK(tensor_from_json(read_json_file(path)) == w);
    std::remove(path.c_str());
    CHECK_THROWS_AS(read_json_file("does_not_exist.json"), ParseError);
}

TEST_CASE("config hash is stable and input-sensitive") {
    CHECK(config_hash("a") == config_hash("a"));
    CHECK(config_hash("a") != config_hash("b"));
    CHECK(config_hash("").size() == 16);
}
