#include <doctest.h>

#include "fexp/fexp.hpp"
#include "support/fixtures.hpp"
#include "support/random.hpp"

using namespace fexp;
using fexp::testing::Rng;

namespace {

Series S(const ChartPtr& c, const std::string& text) { return parse_series(c, text); }

}  // namespace

TEST_CASE("validate: canonical, degenerate, non-proper") {
    auto c = Chart::make_simple({{"z1", 0}, {"z2", 0}});
    auto can = FormalExpMap::canonical(c);
    auto r = validate_fexp(can);
    CHECK(r.ok());
    CHECK(r.proper);

    FormalExpMap zero{c, {S(c, "z1"), S(c, "z2")}};
    CHECK_FALSE(validate_fexp(zero).ok());

    FormalExpMap two{c, {S(c, "z1 + 2*e_z1 + z1*e_z1*e_z2"), S(c, "z2 + e_z2")}};
    auto r2 = validate_fexp(two);
    CHECK(r2.ok());
    CHECK_FALSE(r2.proper);
    // determinant oracle: reduced matrix diag(2, 1)
    CHECK(commutative_det(two.linear_matrix()) == Series::constant(c, 2));

    FormalExpMap bad0{c, {S(c, "z1 + 1 + e_z1"), S(c, "z2 + e_z2")}};
    CHECK_FALSE(validate_fexp(bad0).ok());
}

TEST_CASE("canonical fexp gives d + delta and back") {
    auto c = Chart::make_simple({{"z1", 0}, {"z2", 0}, {"th", 1}});
    auto can = FormalExpMap::canonical(c);
    auto g = grothendieck_from_fexp(can);
    CHECK(g.D == Derivation::de_rham(c) + Derivation::delta(c));
    auto f = fexp_from_grothendieck(g);
    for (std::size_t a = 0; a < c->base_count(); ++a) CHECK(f.pullbacks[a] == can.pullbacks[a]);
    CHECK(check_flatness(g).empty());
}

TEST_CASE("constant quadratic term: resolution-one coefficient by hand expansion") {
    // e_2^a = 1/2 T^a_bc eps^b eps^c, T^1_12 = T^1_21 = 3, T^2_11 = -1.
    // At resolution degree one, D(P^a) = 0 reads Y_1^a = -Y_0^b d_b e_2^a with
    // Y_0^b = -dz^b, so Y_1^a = dz^b T^a_bc eps^c.
    auto c = Chart::make_simple({{"z1", 0}, {"z2", 0}});
    FormalExpMap f{c, {S(c, "z1 + e_z1 + 3*e_z1*e_z2"), S(c, "z2 + e_z2 - 1/2*e_z1^2")}};
    auto g = grothendieck_from_fexp(f);
    auto y1 = [&](const char* e) { return grade_project(g.D.image(c->require(e)), Grading::resdeg, 1); };
    CHECK(y1("e_z1") == S(c, "3*dz1*e_z2 + 3*dz2*e_z1"));
    CHECK(y1("e_z2") == S(c, "-dz1*e_z1"));
    CHECK(grade_project(g.D.image(c->require("e_z1")), Grading::resdeg, 0) == S(c, "-dz1"));
}

TEST_CASE("C_{-1} = -2 gives e_1 = 1/2") {
    auto c = Chart::make_simple({{"z", 0}});
    GrothendieckConnection g{lift_of_de_rham(c, {S(c, "-2*dz")}), 5};
    auto f = fexp_from_grothendieck(g);
    CHECK(f.component(0, 1) == S(c, "1/2*e_z"));
}

TEST_CASE("round trips on random proper and non-proper maps") {
    auto c = testing::mixed_chart({6, 4});
    Rng rng(31);
    for (int i = 0; i < 6; ++i) {
        auto f = testing::random_fexp(rng, c, i % 2 == 1);
        auto g = grothendieck_from_fexp(f);
        CHECK(g.order == 5);
        auto f2 = fexp_from_grothendieck(g);
        for (std::size_t a = 0; a < c->base_count(); ++a) CHECK(f2.pullbacks[a] == f.pullbacks[a]);
        auto g2 = grothendieck_from_fexp(f2);
        CHECK(g2.D == g.D);
        CHECK(check_flatness(g).empty());
    }
}

TEST_CASE("perturbed connection is not flat at weight zero") {
    // D(eps^2) = -dz2 + z2 dz1 eps^1: D^2(eps^2) = dz2 dz1 eps^1 = -dz1 dz2 eps^1.
    auto c = Chart::make_simple({{"z1", 0}, {"z2", 0}});
    GrothendieckConnection g{lift_of_de_rham(c, {S(c, "-dz1"), S(c, "-dz2 + z2*dz1*e_z1")}), 5};
    auto res = check_flatness(g);
    REQUIRE(res.size() == 1);
    CHECK(res[0].generator == c->require("e_z2"));
    CHECK(res[0].weight == 0);
    CHECK(res[0].resdeg == 1);
    CHECK(res[0].value == S(c, "-dz1*dz2*e_z1"));
}

TEST_CASE("canonicalize") {
    auto c = Chart::make_simple({{"z1", 0}, {"z2", 0}});
    auto can = FormalExpMap::canonical(c);
    auto rho = canonicalize(can);
    CHECK(rho.eps_images[0] == S(c, "e_z1"));
    CHECK(rho.eps_images[1] == S(c, "e_z2"));

    // e_2 = 1/2 T eps eps with T constant: rho_2 = -T.
    FormalExpMap f{c, {S(c, "z1 + e_z1 + 3*e_z1*e_z2"), S(c, "z2 + e_z2 - 1/2*e_z1^2")}};
    auto r2 = canonicalize(f);
    CHECK(grade_project(r2.eps_images[0], Grading::resdeg, 2) == S(c, "-3*e_z1*e_z2"));
    CHECK(grade_project(r2.eps_images[1], Grading::resdeg, 2) == S(c, "1/2*e_z1^2"));

    auto cm = testing::mixed_chart({5, 3});
    Rng rng(32);
    for (int i = 0; i < 4; ++i) {
        auto fr = testing::random_fexp(rng, cm, i % 2 == 0);
        auto rho2 = canonicalize(fr);
        auto im = rho2.images();
        for (std::size_t a = 0; a < cm->base_count(); ++a)
            CHECK(ring_morphism(im, fr.pullbacks[a]) ==
                  Series::generator(cm, cm->base(a)) + Series::generator(cm, cm->fiber(a)));
    }
}

TEST_CASE("transfer along a shear") {
    auto c = Chart::make_simple({{"z1", 0}, {"z2", 0}}, {6, 4});
    Diffeo shear{{S(c, "z1 + z2^2"), S(c, "z2")}, {S(c, "z1 - z2^2"), S(c, "z2")}};
    Diffeo id{{S(c, "z1"), S(c, "z2")}, {S(c, "z1"), S(c, "z2")}};
    FormalExpMap f{c, {S(c, "z1 + e_z1 + z2*e_z1*e_z2"), S(c, "z2 + e_z2 - 1/2*z1*e_z1^2")}};
    auto g = grothendieck_from_fexp(f);

    auto same = transfer_diffeo(f, g, id);
    CHECK(same.fexp.pullbacks[0] == f.pullbacks[0]);
    CHECK(same.connection.D == g.D);

    auto t = transfer_diffeo(f, g, shear);
    auto gbar = grothendieck_from_fexp(t.fexp);
    CHECK(gbar.order == t.connection.order);
    CHECK(gbar.D == t.connection.D);
    CHECK(check_flatness(t.connection).empty());

    Diffeo wrong{{S(c, "z1 + z2^2"), S(c, "z2")}, {S(c, "z1"), S(c, "z2")}};
    CHECK_THROWS_AS(transfer_fexp(f, wrong), PreconditionError);
}

TEST_CASE("polynomial exponential maps") {
    auto c = Chart::make_simple({{"z", 0}}, {6, 4});
    auto ec = Chart::make({{"z", 0, "dz", "ez"}, {"v", 0, "dv", "ev"}});
    auto lin = fexp_from_polynomial_exp(c, ec, {S(ec, "z + v")});
    CHECK(lin.pullbacks[0] == FormalExpMap::canonical(c).pullbacks[0]);
    auto q = fexp_from_polynomial_exp(c, ec, {S(ec, "z + v + z*v^2")});
    CHECK(q.pullbacks[0] == S(c, "z + e_z + z*e_z^2"));

    // Jets: n-th v-derivative at v = 0 over n! equals e_n.
    auto e = S(ec, "z + v + z*v^2 - 1/3*v^3 + 2*z^2*v^5 + v^8");
    auto f = fexp_from_polynomial_exp(c, ec, {e});
    Series jet = e;
    Rational fact = 1;
    for (int k = 0; k <= 6; ++k) {
        Series at0(ec);
        for (const auto& [m, coef] : jet.terms())
            if (m.exp(1) == 0) at0.add_term(m, coef);
        const Series want = S(c, to_string((Rational(1) / fact) * at0)) *
                            (k == 0 ? Series::constant(c, 1) : S(c, "e_z^" + std::to_string(k)));
        CHECK(f.component(0, k) == want);
        jet = partial(1, jet);
        fact *= (k + 1);
    }
    CHECK_THROWS_AS(fexp_from_polynomial_exp(c, ec, {S(ec, "z + v^2")}), PreconditionError);
}
