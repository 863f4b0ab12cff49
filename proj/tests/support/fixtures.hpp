#pragma once

#include "fexp/fexp.hpp"
#include "support/random.hpp"

namespace fexp::testing {

// Two even and two odd coordinates.
inline ChartPtr mixed_chart(Truncation t = {}) {
    return Chart::make_simple({{"z1", 0}, {"z2", 0}, {"th1", 1}, {"th2", 1}}, t);
}

// Random term of resolution degree l (formdeg 0) and Z-degree deg, with a
// base-coordinate factor of total degree <= max_base.
inline std::optional<Monomial> random_res_term(Rng& rng, const Chart& chart, int l, int deg, int max_base) {
    const std::size_t n = chart.base_count();
    std::vector<std::uint8_t> e(chart.size(), 0);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (int i = 0; i < l; ++i) {
        const std::size_t g = chart.fiber(pick(rng));
        if (chart.gen(g).odd() && e[g]) return std::nullopt;
        ++e[g];
    }
    std::uniform_int_distribution<int> nb(0, max_base);
    const int k = nb(rng);
    for (int i = 0; i < k; ++i) {
        const std::size_t g = chart.base(pick(rng));
        if (chart.gen(g).odd() && e[g]) continue;
        ++e[g];
    }
    Monomial m(chart, std::move(e));
    if (m.zdeg(chart) != deg) return std::nullopt;
    return m;
}

inline Series random_res_component(Rng& rng, const ChartPtr& chart, int l, int deg, int terms, int max_base) {
    Series s(chart);
    int added = 0;
    for (int tries = 0; added < terms && tries < 400; ++tries)
        if (auto m = random_res_term(rng, *chart, l, deg, max_base)) {
            s.add_term(*m, small_rational(rng, 2));
            ++added;
        }
    return s;
}

// Unimodular linear matrix E(b, a): block-triangular with constant
// invertible diagonal, polynomial off-diagonal entries of matching degree.
inline SeriesMatrix random_unimodular(Rng& rng, const ChartPtr& chart) {
    const std::size_t n = chart->base_count();
    SeriesMatrix e(chart, n);
    const Rational diag[] = {1, -1, 2, Rational(1, 2), -3};
    for (std::size_t a = 0; a < n; ++a) e(a, a) = Series::constant(chart, diag[rng() % 5]);
    for (std::size_t b = 0; b < n; ++b)
        for (std::size_t a = b + 1; a < n; ++a) {
            const int deg = chart->gen(a).zdeg - chart->gen(b).zdeg;
            e(b, a) = random_res_component(rng, chart, 0, deg, 2, 2);
        }
    return e;
}

// Valid fexp with polynomial e_2..e_4; proper unless `general`.
inline FormalExpMap random_fexp(Rng& rng, const ChartPtr& chart, bool general = false) {
    const std::size_t n = chart->base_count();
    SeriesMatrix e1 = general ? random_unimodular(rng, chart) : SeriesMatrix::identity(chart, n);
    FormalExpMap f{chart, {}};
    for (std::size_t a = 0; a < n; ++a) {
        Series p = Series::generator(chart, chart->base(a));
        for (std::size_t b = 0; b < n; ++b) p += Series::generator(chart, chart->fiber(b)) * e1(b, a);
        for (int l = 2; l <= 4; ++l) p += random_res_component(rng, chart, l, chart->gen(a).zdeg, 2, 2);
        f.pullbacks.push_back(p);
    }
    return f;
}

}  // namespace fexp::testing

#include "fexp/connection.hpp"

namespace fexp::testing {

// Random torsion-free connection with polynomial coefficients of the
// required degree.
inline Connection random_connection(Rng& rng, const ChartPtr& chart, int terms = 1) {
    const std::size_t n = chart->base_count();
    Connection conn(chart);
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a; b < n; ++b) {
                const int deg = chart->gen(c).zdeg - chart->gen(a).zdeg - chart->gen(b).zdeg;
                if (a == b && chart->gen(a).odd()) continue;  // A^c_{aa} = -A^c_{aa}
                if (rng() % 3 == 0) continue;
                conn.set_symmetric(c, a, b, random_res_component(rng, chart, 0, deg, terms, 1));
            }
    return conn;
}

}  // namespace fexp::testing
