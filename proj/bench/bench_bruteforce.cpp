// Brute-force equivalence kernel: OpenMP word evaluator against the
// single-threaded big-integer reference.

#include "hedcheck/modular.hpp"

#include <benchmark/benchmark.h>

#include <string>

using namespace hedcheck;

namespace {

// Two equal polynomials built differently: (x+y+z+...)^3 and its product
// taken in the other order. Each variable has `bits` bits.
struct Pair {
    Manager m;
    HedRef a, b;

    Pair(int nvars, unsigned bits) {
        HedRef sum = m.zero(), rev = m.zero();
        std::vector<HedRef> v;
        for (int i = 0; i < nvars; ++i) v.push_back(m.mk_var(m.add_var("x" + std::to_string(i), bits)));
        for (int i = 0; i < nvars; ++i) {
            sum = m.add(sum, m.scale(v[i], BigInt(i + 1)));
            rev = m.add(m.scale(v[nvars - 1 - i], BigInt(nvars - i)), rev);
        }
        a = m.mul(m.mul(sum, sum), sum);
        b = m.mul(rev, m.mul(rev, rev));
    }
};

void BM_parallel(benchmark::State& st) {
    Pair p(int(st.range(0)), unsigned(st.range(1)));
    for (auto _ : st) benchmark::DoNotOptimize(brute_force_equiv(p.m, p.a, p.b, 16));
    st.SetItemsProcessed(st.iterations() * (std::int64_t(1) << (st.range(0) * st.range(1))));
}

void BM_serial(benchmark::State& st) {
    Pair p(int(st.range(0)), unsigned(st.range(1)));
    for (auto _ : st) benchmark::DoNotOptimize(brute_force_equiv_serial(p.m, p.a, p.b, 16));
    st.SetItemsProcessed(st.iterations() * (std::int64_t(1) << (st.range(0) * st.range(1))));
}

} // namespace

BENCHMARK(BM_parallel)->Args({2, 6})->Args({3, 5})->Args({4, 4})->Args({4, 5})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_serial)->Args({2, 6})->Args({3, 5})->Args({4, 4})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
