// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include <random>

#include "fexp/kernels.hpp"

using namespace fexp;

namespace {

ChartPtr bench_chart() {
    static const ChartPtr c =
        Chart::make_simple({{"z1", 0}, {"z2", 0}, {"z3", 0}, {"th1", 1}, {"th2", 1}}, {8, 4});
    return c;
}

// Dense-ish series: random monomials in base and fiber generators.
Series dense_series(std::size_t terms, unsigned seed) {
    const ChartPtr c = bench_chart();
    std::mt19937 rng(seed);
    Series s(c);
    std::uniform_int_distribution<int> e(0, 3), coef(-9, 9);
    while (s.size() < terms) {
        std::vector<std::uint8_t> x(c->size(), 0);
        for (std::size_t a = 0; a < c->base_count(); ++a) {
            const unsigned cap = c->gen(a).odd() ? 1 : 3;
            x[c->base(a)] = static_cast<std::uint8_t>(std::min<unsigned>(e(rng), cap));
            x[c->fiber(a)] = static_cast<std::uint8_t>(std::min<unsigned>(e(rng) % 2, cap));
        }
        Monomial m(*c, x);
        if (m.resdeg() > 4) continue;
        s.add_term(m, Rational(coef(rng), 1 + rng() % 3));
    }
    return s;
}

Derivation dense_derivation(std::size_t terms) {
    const ChartPtr c = bench_chart();
    Derivation v = Derivation::de_rham(c);
    for (std::size_t a = 0; a < c->base_count(); ++a) {
        // D(eps^a) = -dz^a + dz^b * (degree-matched polynomial) pieces
        Series img = -Series::generator(c, c->form(a));
        const Series p = dense_series(terms, 100 + a);
        for (std::size_t b = 0; b < c->base_count(); ++b) {
            Series piece(c);
            for (const auto& [m, q] : p.terms()) {
                Series t = Series::monomial(c, m, q) * Series::generator(c, c->form(b));
                auto d = t.zdeg();
                if (d && *d == c->gen(c->fiber(a)).zdeg + 1) piece += t;
            }
            img += piece;
        }
        v.set_image(c->fiber(a), img);
    }
    return v;
}

void BM_mul(benchmark::State& state, bool parallel) {
    const Series a = dense_series(state.range(0), 1), b = dense_series(state.range(0), 2);
    for (auto _ : state) {
        Series r = parallel ? kernels::mul_parallel(a, b) : kernels::mul_serial(a, b);
        benchmark::DoNotOptimize(r);
    }
    state.counters["threads"] = kernels::max_threads();
}

void BM_apply(benchmark::State& state, bool parallel) {
    const Derivation v = dense_derivation(state.range(0));
    const Series f = dense_series(state.range(0), 3);
    for (auto _ : state) {
        Series r = parallel ? kernels::apply_parallel(v, f) : kernels::apply_serial(v, f);
        benchmark::DoNotOptimize(r);
    }
    state.counters["threads"] = kernels::max_threads();
}

}  // namespace

BENCHMARK_CAPTURE(BM_mul, serial, false)->Arg(32)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_mul, parallel, true)->Arg(32)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_apply, serial, false)->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_apply, parallel, true)->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
