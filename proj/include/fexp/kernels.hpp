#pragma once

#include "fexp/derivation.hpp"
#include "fexp/series.hpp"

namespace fexp::kernels {

// Reference product: a plain double loop into one ordered accumulator.
Series mul_serial(const Series& a, const Series& b);

// OpenMP product: rows of `a` are distributed over threads, each thread
// accumulates into a private map, and the maps are summed at the end.
// Rational addition is exact, so the result is independent of scheduling.
Series mul_parallel(const Series& a, const Series& b);

// Products with fewer term pairs than this run the serial kernel.
inline constexpr std::size_t parallel_threshold = 4096;

// Reference derivation action: generators in order, one product each.
Series apply_serial(const Derivation& v, const Series& f);

// OpenMP derivation action: generators are distributed over threads and
// the per-generator products are summed in generator order.
Series apply_parallel(const Derivation& v, const Series& f);

// Chooses between the two by problem size.
Series apply_dispatch(const Derivation& v, const Series& f);

bool openmp_enabled();
int max_threads();

}  // namespace fexp::kernels
