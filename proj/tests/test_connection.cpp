#include <doctest.h>

#include "fexp/connection.hpp"
#include "support/fixtures.hpp"

using namespace fexp;
using fexp::testing::Rng;

namespace {

Series S(const ChartPtr& c, const std::string& text) { return parse_series(c, text); }

ChartPtr plane(Truncation t = {6, 4}) { return Chart::make_simple({{"z1", 0}, {"z2", 0}}, t); }

Connection plane_connection(const ChartPtr& c) {
    Connection a(c);
    a.set(0, 1, 1, S(c, "z1"));
    return a;
}

}  // namespace

TEST_CASE("superconnection images") {
    auto c = plane();
    Connection zero(c);
    CHECK(nabla_superconnection(zero) == Derivation::de_rham(c));
    auto d0 = nabla_superconnection(plane_connection(c));
    CHECK(d0.image(c->require("e_z1")) == S(c, "-z1*dz2*e_z2"));
    CHECK(commutator(Derivation::delta(c), d0).is_zero());
}

TEST_CASE("torsion and degree violations are reported") {
    auto c = plane();
    Connection a(c);
    a.set(0, 0, 1, S(c, "z1"));
    CHECK_FALSE(validate_connection(a).ok());
    auto cm = testing::mixed_chart();
    Connection b(cm);
    b.set_symmetric(0, 0, 1, S(cm, "z2"));
    CHECK(validate_connection(b).ok());
    Connection wrong(cm);
    wrong.set_symmetric(0, 0, 2, S(cm, "z2"));  // needs degree -1
    CHECK_FALSE(validate_connection(wrong).ok());
}

TEST_CASE("flat connection completes to d + delta") {
    auto c = plane();
    HptReport rep;
    auto g = hpt_complete(Connection(c), &rep);
    CHECK(g.D == Derivation::de_rham(c) + Derivation::delta(c));
    CHECK(rep.literal_step_matches);
}

TEST_CASE("curvature term S_0 by hand and flat completion") {
    // D_0(eps^1) = -z1 dz2 eps^2, D_0(eps^2) = 0, so
    // D_0^2(eps^1) = -dz1 dz2 eps^2 z... expanded: d(-z1 dz2 eps^2) = -dz1 dz2 eps^2.
    auto c = plane();
    auto conn = plane_connection(c);
    auto d0 = nabla_superconnection(conn);
    auto s0 = square(d0);
    CHECK(s0.image(c->require("e_z1")) == S(c, "-dz1*dz2*e_z2"));
    CHECK(s0.image(c->require("e_z2")).is_zero());

    HptReport rep;
    auto g = hpt_complete(conn, &rep);
    CHECK(g.order == 6);
    CHECK(check_flatness(g).empty());
    CHECK(piece(g.D, 0) == d0);
    // D_1(eps^1) = -H(S_0(eps^1)) = -1/3 zeta(-dz1 dz2 eps^2)
    CHECK(rep.step_one.image(c->require("e_z1")) == S(c, "1/3*dz1*e_z2^2 - 1/3*dz2*e_z1*e_z2"));
    CHECK_FALSE(rep.literal_step_matches);
    CHECK_FALSE(rep.literal_step.image(c->require("dz1")).is_zero());
}

TEST_CASE("round trip connection -> hpt -> fexp -> connection") {
    auto c = plane();
    auto conn = plane_connection(c);
    auto f = fexp_from_grothendieck(hpt_complete(conn));
    CHECK(validate_fexp(f).proper);
    CHECK(connection_from_fexp(f) == conn);
    CHECK(connection_from_fexp(FormalExpMap::canonical(c)).is_zero());

    auto cm = testing::mixed_chart({5, 4});
    Rng rng(51);
    for (int i = 0; i < 2; ++i) {
        auto rc = testing::random_connection(rng, cm);
        REQUIRE(validate_connection(rc).ok());
        auto g = hpt_complete(rc);
        CHECK(check_flatness(g).empty());
        CHECK(connection_from_fexp(fexp_from_grothendieck(g)) == rc);
    }
}

TEST_CASE("quadratic term -Gamma gives A = Gamma") {
    auto c = plane();
    // e_2^a = -1/2 Gamma^a_bc eps^b eps^c, Gamma^1_12 = Gamma^1_21 = 2, Gamma^2_22 = -1
    FormalExpMap f{c, {S(c, "z1 + e_z1 - 2*e_z1*e_z2"), S(c, "z2 + e_z2 + 1/2*e_z2^2")}};
    auto a = connection_from_fexp(f);
    Connection want(c);
    want.set_symmetric(0, 0, 1, S(c, "2"));
    want.set(1, 1, 1, S(c, "-1"));
    CHECK(a == want);
}

TEST_CASE("geodesic oracle") {
    auto c = plane();
    auto flat = geodesic_taylor_oracle(Connection(c), 4);
    CHECK(flat[1][0] == S(c, "e_z1"));
    for (int k = 2; k <= 4; ++k) CHECK(flat[k][0].is_zero());

    auto conn = plane_connection(c);
    auto geo = geodesic_taylor_oracle(conn, 4, {Rational(3), Rational(-1)});
    CHECK(geo[2][0] == S(c, "-3/2*e_z2^2"));
    auto f = fexp_from_grothendieck(hpt_complete(conn));
    for (int k = 0; k <= 4; ++k)
        for (std::size_t a = 0; a < 2; ++a)
            CHECK(evaluate_at(f.component(a, k), {3, -1}) == geo[k][a]);
}
