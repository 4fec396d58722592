#include <benchmark/benchmark.h>

#include "cmin/oracle.hpp"
#include "cmin/partition.hpp"
#include "cmin/refine.hpp"
#include "cmin/sumbag.hpp"
#include "cmin/wta.hpp"

using namespace cmin;

static void BM_sumbag_insert_erase(benchmark::State& state) {
    auto desc = descriptor(monoid_id::nat_max);
    auto pool = weight_pool(desc, 50);
    rng rand(1);
    for (auto _ : state) {
        sum_bag bag(desc);
        for (int i = 0; i < 1000; ++i)
            bag.insert(pool[rand.below(pool.size())], 1);
        for (int i = 0; i < 1000; ++i)
            bag.erase_up_to(pool[rand.below(pool.size())], 1);
        benchmark::DoNotOptimize(bag.distinct_size());
    }
}
BENCHMARK(BM_sumbag_insert_erase);

static void BM_partition_split(benchmark::State& state) {
    const std::uint32_t n = static_cast<std::uint32_t>(state.range(0));
    rng rand(2);
    for (auto _ : state) {
        refinable_partition p(n);
        for (int round = 0; round < 200; ++round) {
            std::uint32_t b = static_cast<std::uint32_t>(rand.below(p.num_blocks()));
            for (std::uint32_t s : p.members(b))
                if (rand.below(2) == 0)
                    p.mark(s);
            p.split_marked(b);
        }
        benchmark::DoNotOptimize(p.num_blocks());
    }
}
BENCHMARK(BM_partition_split)->Arg(1 << 12)->Arg(1 << 16);

static void BM_minimize_wta(benchmark::State& state) {
    const std::uint32_t n = static_cast<std::uint32_t>(state.range(0));
    wta w = random_wta(n, {{"a0", 2}, {"a1", 2}, {"a2", 2}, {"a3", 2}},
                       monoid_id::nat_max, 50, 50, 7);
    for (auto _ : state) {
        state_partition p = minimize_wta(w);
        benchmark::DoNotOptimize(p.size());
    }
}
BENCHMARK(BM_minimize_wta)->Unit(benchmark::kMillisecond)->Arg(200)->Arg(1000);

static void BM_minimize_markov(benchmark::State& state) {
    functor_term t = parse_functor("DX");
    random_opts opts;
    opts.max_fanout = 6;
    opts.seed = 11;
    symbolic_coalgebra s = random_coalgebra(t, static_cast<std::uint32_t>(state.range(0)),
                                            opts);
    sort_plan plan = plan_decomposition(t);
    encoded_coalgebra e = flatten(s, plan);
    for (auto _ : state) {
        state_partition p = minimize_encoded(e);
        benchmark::DoNotOptimize(p.size());
    }
}
BENCHMARK(BM_minimize_markov)->Unit(benchmark::kMillisecond)->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
