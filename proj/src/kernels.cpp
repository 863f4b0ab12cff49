#include "fexp/kernels.hpp"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fexp::kernels {

namespace {

Truncation common_trunc(const Series& a, const Series& b) {
    return {std::min(a.trunc().res, b.trunc().res), std::min(a.trunc().form, b.trunc().form)};
}

void accumulate(TermMap& acc, const Monomial& m, const Rational& c) {
    auto [it, inserted] = acc.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) acc.erase(it);
    }
}

}  // namespace

Series mul_serial(const Series& a, const Series& b) {
    const Truncation t = common_trunc(a, b);
    const Chart& chart = *a.chart();
    TermMap acc;
    for (const auto& [ma, ca] : a.terms())
        for (const auto& [mb, cb] : b.terms())
            if (auto p = multiply(chart, ma, mb, t)) accumulate(acc, p->first, p->second < 0 ? Rational(-ca * cb) : Rational(ca * cb));
    Series out(a.chart(), t);
    for (const auto& [m, c] : acc) out.add_term(m, c);
    return out;
}

Series mul_parallel(const Series& a, const Series& b) {
    const Truncation t = common_trunc(a, b);
    const Chart& chart = *a.chart();
    std::vector<const std::pair<const Monomial, Rational>*> rows;
    rows.reserve(a.size());
    for (const auto& term : a.terms()) rows.push_back(&term);

    std::vector<TermMap> partial(static_cast<std::size_t>(max_threads()));
#pragma omp parallel
    {
#ifdef _OPENMP
        TermMap& acc = partial[static_cast<std::size_t>(omp_get_thread_num())];
#else
        TermMap& acc = partial[0];
#endif
#pragma omp for schedule(dynamic, 8)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(rows.size()); ++i) {
            const auto& [ma, ca] = *rows[static_cast<std::size_t>(i)];
            for (const auto& [mb, cb] : b.terms())
                if (auto p = multiply(chart, ma, mb, t))
                    accumulate(acc, p->first, p->second < 0 ? Rational(-ca * cb) : Rational(ca * cb));
        }
    }
    Series out(a.chart(), t);
    for (const auto& acc : partial)
        for (const auto& [m, c] : acc) out.add_term(m, c);
    return out;
}

Series apply_serial(const Derivation& v, const Series& f) {
    Series out(f.chart(), f.trunc());
    for (std::size_t g = 0; g < v.images().size(); ++g) {
        if (v.image(g).is_zero()) continue;
        Series d = partial(g, f);
        if (!d.is_zero()) out += v.image(g) * d;
    }
    return out;
}

Series apply_parallel(const Derivation& v, const Series& f) {
    const std::size_t n = v.images().size();
    std::vector<Series> parts(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        const auto g = static_cast<std::size_t>(i);
        if (v.image(g).is_zero()) continue;
        Series d = partial(g, f);
        if (!d.is_zero()) parts[g] = v.image(g) * d;
    }
    Series out(f.chart(), f.trunc());
    for (const auto& p : parts)
        if (p.chart()) out += p;
    return out;
}

Series apply_dispatch(const Derivation& v, const Series& f) {
    if (max_threads() > 1 && f.size() >= 64) return apply_parallel(v, f);
    return apply_serial(v, f);
}

bool openmp_enabled() {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace fexp::kernels
