#pragma once

#include "fexp/qp.hpp"

namespace fexp::testing {

// Structure constants of T*h = h + h*, h Heisenberg ([x,y] = z), with the
// coadjoint brackets [x,zs] = -ys, [y,zs] = xs. Index order x y z xs ys zs.
struct StructureConstant {
    std::size_t out, b, c;
    int value;  // f^out_{bc}, b < c
};

inline std::vector<StructureConstant> heisenberg_double() {
    return {{2, 0, 1, 1}, {4, 0, 5, -1}, {3, 1, 5, 1}};
}

// Q xi^a = -1/2 f^a_bc xi^b xi^c on g[1] with the natural pairing.
inline QPStructure ce_structure(const std::vector<StructureConstant>& f, Rational x_pairing = 1) {
    auto c = Chart::make_simple({{"x", 1}, {"y", 1}, {"z", 1}, {"xs", 1}, {"ys", 1}, {"zs", 1}});
    std::vector<Series> img(c->size(), Series(c));
    for (const auto& k : f) {
        // -1/2 (f_bc xi^b xi^c + f_cb xi^c xi^b) = -f_bc xi^b xi^c
        Series t = Series::generator(c, c->base(k.b)) * Series::generator(c, c->base(k.c));
        t *= Rational(-k.value);
        img[c->base(k.out)] += t;
    }
    RationalMatrix om(6, std::vector<Rational>(6, 0));
    for (int i = 0; i < 3; ++i) om[i][i + 3] = om[i + 3][i] = 1;
    om[0][3] = om[3][0] = x_pairing;
    return {c, 2, om, Derivation(c, 1, img)};
}

// T*[1]R^2 with Poisson bivector pi^{12} = x1 x2.
inline QPStructure poisson_structure() {
    auto c = Chart::make_simple({{"x1", 0}, {"x2", 0}, {"p1", 1}, {"p2", 1}});
    Derivation q(c, 1);
    q.set_image(0, parse_series(c, "x1*x2*p2"));
    q.set_image(1, parse_series(c, "-x1*x2*p1"));
    q.set_image(2, parse_series(c, "x2*p1*p2"));
    q.set_image(3, parse_series(c, "x1*p1*p2"));
    RationalMatrix om(4, std::vector<Rational>(4, 0));
    om[0][2] = om[2][0] = 1;
    om[1][3] = om[3][1] = 1;
    return {c, 1, om, q};
}

}  // namespace fexp::testing
