#include <doctest.h>

#include <map>
#include <tuple>

#include "support/fixtures.hpp"
#include "support/qp_fixtures.hpp"

using namespace fexp;
using fexp::testing::Rng;

namespace {

using Key = std::tuple<int, std::size_t, std::vector<std::size_t>>;

std::map<Key, std::string> table(const LInftyPackage& p) {
    std::map<Key, std::string> t;
    for (const auto& e : p.brackets) t[{e.arity, e.output, e.inputs}] = to_string(e.coeff);
    return t;
}

BasePoint origin(std::size_t n) { return BasePoint(n, Rational(0)); }

}  // namespace

TEST_CASE("Chevalley-Eilenberg structure is a QP structure") {
    auto s = testing::ce_structure(testing::heisenberg_double());
    CHECK(validate_qp(s).ok());
    auto zero = s;
    zero.Q = Derivation(s.chart, 1);
    CHECK(validate_qp(zero).ok());
}

TEST_CASE("Jacobi violation shows up in [Q,Q]") {
    // [x,y] = z, [y,z] = x, [z,x] = zs: Jacobi fails on (x,y,z)-triples.
    auto f = testing::heisenberg_double();
    f.push_back({0, 1, 2, 1});
    f.push_back({5, 0, 2, -1});
    auto rep = validate_qp(testing::ce_structure(f));
    bool saw = false;
    for (const auto& v : rep.violations) saw |= v.find("[Q,Q]") != std::string::npos;
    CHECK(saw);
}

TEST_CASE("omega checks") {
    auto s = testing::poisson_structure();
    CHECK(validate_qp(s).ok());
    auto asym = s;
    asym.omega[2][0] = -1;
    CHECK_FALSE(validate_qp(asym).ok());
    auto wrong_p = s;
    wrong_p.P = 2;
    CHECK_FALSE(validate_qp(wrong_p).ok());
    auto degen = s;
    degen.omega[1][3] = degen.omega[3][1] = 0;
    CHECK_FALSE(validate_qp(degen).ok());
    // ordinary symplectic plane: antisymmetric
    auto c = Chart::make_simple({{"q", 0}, {"p", 0}});
    QPStructure plane{c, 0, {{0, 1}, {-1, 0}}, Derivation(c, 1)};
    CHECK(validate_qp(plane).ok());
    plane.omega = {{0, 1}, {1, 0}};
    CHECK_FALSE(validate_qp(plane).ok());
}

TEST_CASE("CE linearization gives the structure constants") {
    auto s = testing::ce_structure(testing::heisenberg_double());
    auto pkg = linearize_at_point(s, FormalExpMap::canonical(s.chart), origin(6));
    std::map<Key, std::string> want;
    for (const auto& k : testing::heisenberg_double())
        want[{2, k.out, {k.b, k.c}}] = std::to_string(k.value);
    CHECK(table(pkg) == want);
    CHECK_FALSE(pkg.curved);
    CHECK(pkg.report.ok());
    auto cyc = check_cyclic(pkg);
    CHECK(cyc.ok());
    CHECK(cyc.arities.size() == 6);
}

TEST_CASE("zero Q has no brackets") {
    auto s = testing::poisson_structure();
    s.Q = Derivation(s.chart, 1);
    auto pkg = linearize_at_point(s, FormalExpMap::canonical(s.chart), origin(4));
    CHECK(pkg.brackets.empty());
    CHECK(check_cyclic(pkg).ok());
}

TEST_CASE("non-invariant pairing fails at arity 2") {
    auto s = testing::ce_structure(testing::heisenberg_double(), 2);
    CHECK_FALSE(validate_qp(s).ok());
    CHECK_THROWS_AS(linearize_at_point(s, FormalExpMap::canonical(s.chart), origin(6)), PreconditionError);
    auto pkg = linearize_at_point(s, FormalExpMap::canonical(s.chart), origin(6), false);
    auto cyc = check_cyclic(pkg);
    for (auto [arity, ok] : cyc.arities) CHECK(ok == (arity != 2));
}

TEST_CASE("Poisson linearization against a hand expansion") {
    auto s = testing::poisson_structure();
    // Q^a(x + w) at x = (1, 2): e.g. Q(x1) = (1+w1)(2+w2) wp2.
    auto pkg = linearize_at_point(s, FormalExpMap::canonical(s.chart),
                                  {Rational(1), Rational(2), Rational(0), Rational(0)});
    std::map<Key, std::string> want = {
        {{1, 0, {3}}, "2"},          {{1, 1, {2}}, "-2"},         {{2, 0, {0, 3}}, "2"},
        {{2, 0, {1, 3}}, "1"},       {{2, 1, {0, 2}}, "-2"},      {{2, 1, {1, 2}}, "-1"},
        {{2, 2, {2, 3}}, "-2"},      {{2, 3, {2, 3}}, "-1"},      {{3, 0, {0, 1, 3}}, "1"},
        {{3, 1, {0, 1, 2}}, "-1"},   {{3, 2, {1, 2, 3}}, "-1"},   {{3, 3, {0, 2, 3}}, "-1"},
    };
    CHECK(table(pkg) == want);
    CHECK(pkg.report.ok());
    CHECK(check_cyclic(pkg).ok());

    auto at0 = linearize_at_point(s, FormalExpMap::canonical(s.chart), origin(4));
    CHECK(at0.report.ok());
    CHECK(check_cyclic(at0).ok());
    for (const auto& e : at0.brackets) CHECK(e.arity == 3);
}

TEST_CASE("symbolic point gives polynomial brackets") {
    auto s = testing::poisson_structure();
    BasePoint x = {std::nullopt, std::nullopt, Rational(0), Rational(0)};
    auto pkg = linearize_at_point(s, FormalExpMap::canonical(s.chart), x);
    auto t = table(pkg);
    CHECK(t[{1, 0, {3}}] == "x1*x2");
    CHECK(t[{2, 1, {1, 2}}] == "-x1");
    CHECK(pkg.report.ok());
    CHECK(check_cyclic(pkg).ok());
    // Specializing the symbolic coefficients reproduces a rational point.
    auto num = table(linearize_at_point(s, FormalExpMap::canonical(s.chart),
                                        {Rational(1), Rational(2), Rational(0), Rational(0)}));
    for (const auto& e : pkg.brackets) {
        std::vector<Series> img = identity_images(pkg.chart);
        img[0] = Series::constant(pkg.chart, 1);
        img[1] = Series::constant(pkg.chart, 2);
        CHECK(to_string(ring_morphism(img, e.coeff)) == num[{e.arity, e.output, e.inputs}]);
    }
}

TEST_CASE("random points and a non-canonical map") {
    auto s = testing::poisson_structure();
    Rng rng(61);
    FormalExpMap f{s.chart,
                   {parse_series(s.chart, "x1 + e_x1 + e_x1*e_x2"), parse_series(s.chart, "x2 + e_x2 - 1/2*e_x1^2"),
                    parse_series(s.chart, "p1 + e_p1 + x1*e_p2*e_x2"), parse_series(s.chart, "p2 + e_p2")}};
    REQUIRE(validate_fexp(f).ok());
    for (int i = 0; i < 4; ++i) {
        BasePoint x = {testing::small_rational(rng), testing::small_rational(rng), Rational(0), Rational(0)};
        auto a = linearize_at_point(s, FormalExpMap::canonical(s.chart), x);
        auto b = linearize_at_point(s, f, x);
        CHECK(table(a) == table(b));
        CHECK(a.report.ok());
        CHECK(check_cyclic(a).ok());
    }
}

TEST_CASE("curved package and point errors") {
    auto c = Chart::make_simple({{"u", -1}, {"v", 2}});
    QPStructure s{c, 1, {{0, 1}, {1, 0}}, Derivation(c, 1)};
    s.Q.set_image(0, Series::constant(c, 1));
    REQUIRE(validate_qp(s).ok());
    auto pkg = linearize_at_point(s, FormalExpMap::canonical(c), origin(2));
    CHECK(pkg.curved);
    CHECK(pkg.brackets.front().arity == 0);

    auto p = testing::poisson_structure();
    CHECK_THROWS_AS(linearize_at_point(p, FormalExpMap::canonical(p.chart),
                                       {Rational(0), Rational(0), Rational(1), Rational(0)}),
                    PreconditionError);
    CHECK_THROWS_AS(linearize_at_point(p, FormalExpMap::canonical(p.chart),
                                       {Rational(0), Rational(0), std::nullopt, Rational(0)}),
                    PreconditionError);
}
