// Compares the linearized OpenMP kernel counter against the serial
// all-points reference on growing random instances; both must agree exactly.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "prd/io.hpp"
#include "prd/probe.hpp"

using namespace prd;
using Clock = std::chrono::steady_clock;

static double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

int main() {
#ifdef _OPENMP
    printf("openmp threads: %d\n", omp_get_max_threads());
#else
    printf("openmp: off\n");
#endif
    struct Case {
        uint64_t p;
        std::vector<int> dims;
        unsigned ext;
    };
    std::vector<Case> cases = {
        {2, {3, 3, 3}, 1}, {2, {3, 3, 3}, 2}, {3, {3, 3, 3}, 1}, {3, {3, 3, 3}, 2},
        {5, {3, 3, 3}, 1}, {2, {2, 2, 2, 2}, 2}, {3, {2, 3, 4}, 2}, {7, {3, 3, 3}, 1},
    };
    uint64_t budget = 1ull << 28;
    printf("%-22s %10s %12s %12s %8s\n", "case", "ext", "serial ms", "linear ms", "speedup");
    for (size_t i = 0; i < cases.size(); ++i) {
        const Case& c = cases[i];
        const FieldCtx* f = FieldCtx::make(c.p, 1);
        Tensor t = random_tensor(f, c.dims, 1000 + i);
        int axis = 0;

        auto t0 = Clock::now();
        u128 serial = count_kernel_serial(t, axis, c.ext, budget);
        double s_ms = ms_since(t0);

        t0 = Clock::now();
        u128 linear = count_kernel(t, axis, c.ext, budget);
        double l_ms = ms_since(t0);

        if (serial != linear) {
            printf("MISMATCH on case %zu: serial %s linear %s\n", i,
                   u128_to_string(serial).c_str(), u128_to_string(linear).c_str());
            return 1;
        }
        char name[64];
        snprintf(name, sizeof name, "q=%llu dims=%dx%dx%d%s", (unsigned long long)c.p,
                 c.dims[0], c.dims[1], c.dims[2], c.dims.size() > 3 ? "x2" : "");
        printf("%-22s %10u %12.2f %12.2f %7.1fx\n", name, c.ext, s_ms, l_ms,
               l_ms > 0 ? s_ms / l_ms : 0.0);
    }
    puts("all counts agree");
    return 0;
}
