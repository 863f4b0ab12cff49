#include <doctest.h>

#include <fstream>
#include <sstream>

#include "fexp/commands.hpp"

using namespace fexp;

namespace {

std::string fixture(const std::string& name) {
    std::ifstream in(std::string(FIXTURE_DIR) + "/" + name, std::ios::binary);
    REQUIRE(in);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string error_of(const std::string& text) {
    try {
        parse_session(text);
    } catch (const InputError& e) {
        return e.what();
    }
    return "";
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

const std::string plane_chart =
    R"("chart": {"generators": [{"name": "z1", "degree": 0}, {"name": "z2", "degree": 0}]})";

}  // namespace

TEST_CASE("minimal chart") {
    auto s = parse_session(R"({"chart": {"generators": [{"name": "x", "degree": 0}]}})");
    CHECK(s.chart->size() == 3);
    CHECK(s.chart->gen(1).name == "dx");
    CHECK(s.chart->gen(2).name == "e_x");
    CHECK(s.chart->trunc() == Truncation{6, 4});
    CHECK(parse_session(serialize_session(s)).chart->same_layout(*s.chart));
}

TEST_CASE("fixtures round-trip byte for byte") {
    for (const char* name : {"canonical.json", "r2_connection.json", "sphere_like.json", "mixed.json", "shear.json",
                             "nonflat.json", "ce.json", "ce_noninvariant.json", "poisson.json", "poisson_point.json",
                             "poisson_symbolic_point.json"}) {
        CAPTURE(name);
        const std::string text = fixture(name);
        CHECK(serialize_session(parse_session(text)) == text);
    }
}

TEST_CASE("canonical fixture is a valid proper fexp") {
    auto s = parse_session(fixture("canonical.json"));
    REQUIRE(s.fexp);
    auto r = validate_fexp(*s.fexp);
    CHECK(r.ok());
    CHECK(r.proper);
    CHECK(s.fexp->pullbacks[0] == FormalExpMap::canonical(s.chart).pullbacks[0]);
}

TEST_CASE("series forms") {
    auto text = parse_session("{" + plane_chart + R"(, "function": "1/2*z1^2*z2 - 3"})");
    auto arr = parse_session("{" + plane_chart + R"(, "function": [["-3", []], ["1/2", [["z2", 1], ["z1", 2]]]]})");
    CHECK(*text.function == *arr.function);
    // odd factors out of order pick up a sign
    const std::string odd = R"("chart": {"generators": [{"name": "a", "degree": 1}, {"name": "b", "degree": 1}]})";
    auto swapped = parse_session("{" + odd + R"(, "function": [["1", [["b", 1], ["a", 1]]]]})");
    CHECK(to_string(*swapped.function) == "-a*b");
}

TEST_CASE("parse errors carry line and column") {
    const std::string msg = error_of(fixture("malformed.json"));
    CHECK(contains(msg, "line 2, column 40"));
    CHECK(contains(error_of("{\n  \"chart\": [1,\n"), "line 3"));
}

TEST_CASE("semantic errors name the block") {
    CHECK(contains(error_of(fixture("bad_rational.json")), "block 'fexp'"));
    CHECK(contains(error_of(fixture("bad_rational.json")), "zero denominator"));
    CHECK(contains(error_of("{" + plane_chart + R"(, "function": "z3"})"), "block 'function'"));
    CHECK(contains(error_of("{" + plane_chart + R"(, "fexp": {"z1": "z1 + e_z1"}})"), "no entry for 'z2'"));
    CHECK(contains(error_of("{" + plane_chart + R"(, "bogus": 1})"), "unknown block 'bogus'"));
    CHECK(contains(error_of(R"({"fexp": {}})"), "'chart' is required"));
    CHECK(contains(error_of(R"({"chart": {"generators": [{"name": "z", "degree": 0}, {"name": "z", "degree": 1}]}})"),
                   "duplicate"));
    CHECK(contains(error_of("{" + plane_chart + R"(, "christoffel": [)"
                            R"({"upper": "z1", "lower": ["z1", "z2"], "value": "1"},)"
                            R"({"upper": "z1", "lower": ["z2", "z1"], "value": "2"}]})"),
                   "duplicate entry"));
}

TEST_CASE("truncation override") {
    auto s = parse_session(fixture("canonical.json"), {3, 2});
    CHECK(s.chart->trunc() == Truncation{3, 2});
}

TEST_CASE("flatness on the canonical fixture") {
    auto r = run_command("flatness", parse_session(fixture("canonical.json")));
    CHECK(r.exit_code == exit_ok);
    CHECK(contains(r.report, "0 nonzero residuals"));
    CHECK(contains(r.report, "\nresiduals=0\n"));
    auto bad = run_command("flatness", parse_session(fixture("nonflat.json")));
    CHECK(bad.exit_code == exit_violations);
    CHECK(contains(bad.report, "\nresiduals=1\n"));
}

TEST_CASE("hpt, f-from-g, extract-connection reproduce the input") {
    const std::string input = fixture("r2_connection.json");
    auto g = run_command("hpt", parse_session(input));
    REQUIRE(g.exit_code == exit_ok);
    auto f = run_command("f-from-g", parse_session(serialize_session(*g.output)));
    REQUIRE(f.exit_code == exit_ok);
    auto c = run_command("extract-connection", parse_session(serialize_session(*f.output)));
    REQUIRE(c.exit_code == exit_ok);
    CHECK(serialize_session(*c.output) == input);
}

TEST_CASE("linearize on the CE fixture") {
    auto r = run_command("linearize", parse_session(fixture("ce.json")));
    CHECK(r.exit_code == exit_ok);
    CHECK(contains(r.report, "2 z (x,y) 1\n2 xs (y,zs) 1\n2 ys (x,zs) -1\n"));
    CHECK(contains(r.report, "\nbrackets=3\n"));
    auto bad = run_command("linearize", parse_session(fixture("ce_noninvariant.json")));
    CHECK(bad.exit_code == exit_precondition);
}

TEST_CASE("error exit codes") {
    auto s = parse_session(fixture("canonical.json"));
    CHECK(run_command("nope", s).exit_code == exit_input);
    CHECK(run_command("hpt", s).exit_code == exit_input);
    CHECK(run_command("linearize", s).exit_code == exit_input);
    auto ps = parse_session(fixture("poisson.json"));
    ps.point->at(2) = Rational(1);
    CHECK(run_command("linearize", ps).exit_code == exit_precondition);
    CHECK(command_names().size() == 13);
}

TEST_CASE("reports are deterministic") {
    for (const char* cmd : {"validate", "g-from-f", "lift", "primitive", "check-homotopy"}) {
        auto s = parse_session(fixture("canonical.json"), {4, 3});
        auto a = run_command(cmd, s);
        auto b = run_command(cmd, s);
        CHECK(a.report == b.report);
        CHECK(contains(a.report, std::string("\ncommand=") + cmd + "\n"));
        if (a.output) CHECK(serialize_session(*a.output) == serialize_session(*b.output));
    }
}
