#include "fexp/session.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

namespace fexp {

using Json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& block, const std::string& msg) {
    throw InputError("session: block '" + block + "': " + msg);
}

const Json& field(const Json& obj, const std::string& key, const std::string& block) {
    if (!obj.is_object() || !obj.contains(key)) fail(block, "missing field '" + key + "'");
    return obj.at(key);
}

int integer(const Json& j, const std::string& block, const std::string& what) {
    if (!j.is_number_integer()) fail(block, what + " must be an integer");
    return j.get<int>();
}

std::string text(const Json& j, const std::string& block, const std::string& what) {
    if (!j.is_string()) fail(block, what + " must be a string");
    return j.get<std::string>();
}

Rational rational(const Json& j, const std::string& block, const std::string& what) {
    if (j.is_number_integer()) return Rational(j.get<long>());
    return parse_rational(text(j, block, what));
}

Series series(const ChartPtr& c, const Json& j, const std::string& block) {
    if (j.is_string()) return parse_series(c, j.get<std::string>());
    if (!j.is_array()) fail(block, "series must be a string or an array of terms");
    Series out(c);
    for (const auto& term : j) {
        if (!term.is_array() || term.size() != 2 || !term[1].is_array())
            fail(block, "term must be [coefficient, [[generator, exponent], ...]]");
        Series t = Series::constant(c, rational(term[0], block, "coefficient"));
        for (const auto& f : term[1]) {
            if (!f.is_array() || f.size() != 2) fail(block, "factor must be [generator, exponent]");
            const std::size_t g = c->require(text(f[0], block, "generator"));
            const int e = integer(f[1], block, "exponent");
            if (e < 0) fail(block, "negative exponent");
            for (int k = 0; k < e; ++k) t = t * Series::generator(c, g);
        }
        out += t;
    }
    return out;
}

Json series_json(const Series& f) {
    const Chart& c = *f.chart();
    Json arr = Json::array();
    for (const auto& [m, coef] : f.terms()) {
        Json mono = Json::array();
        for (std::size_t g = 0; g < c.size(); ++g)
            if (m.exp(g)) mono.push_back(Json::array({c.gen(g).name, m.exp(g)}));
        arr.push_back(Json::array({to_string(coef), mono}));
    }
    return arr;
}

std::size_t base_index(const ChartPtr& c, const std::string& name, const std::string& block) {
    auto g = c->find(name);
    if (!g || c->gen(*g).klass != GenClass::base) fail(block, "'" + name + "' is not a base generator");
    return *g;
}

std::size_t fiber_index(const ChartPtr& c, const std::string& name, const std::string& block) {
    auto g = c->find(name);
    if (!g || c->gen(*g).klass != GenClass::fiber) fail(block, "'" + name + "' is not a fiber generator");
    return c->gen(*g).index;
}

// Object keyed by base names; missing keys take `fallback`.
std::vector<Series> per_base(const ChartPtr& c, const Json& j, const std::string& block, bool required) {
    if (!j.is_object()) fail(block, "expected an object keyed by base generator");
    std::vector<Series> out(c->base_count(), Series(c));
    std::vector<bool> seen(c->base_count(), false);
    for (const auto& [k, v] : j.items()) {
        const std::size_t a = base_index(c, k, block);
        out[a] = series(c, v, block);
        seen[a] = true;
    }
    if (required)
        for (std::size_t a = 0; a < seen.size(); ++a)
            if (!seen[a]) fail(block, "no entry for '" + c->gen(a).name + "'");
    return out;
}

Json per_base_json(const ChartPtr& c, const std::vector<Series>& v, bool skip_zero) {
    Json o = Json::object();
    for (std::size_t a = 0; a < v.size(); ++a)
        if (!skip_zero || !v[a].is_zero()) o[c->gen(c->base(a)).name] = series_json(v[a]);
    return o;
}

ChartPtr parse_chart(const Json& j, const TruncationOverride& over) {
    const std::string b = "chart";
    Truncation t;
    if (j.contains("order")) t.res = integer(j["order"], b, "order");
    if (j.contains("form_order")) t.form = integer(j["form_order"], b, "form_order");
    if (over.order) t.res = *over.order;
    if (over.form_order) t.form = *over.form_order;
    const Json& gens = field(j, "generators", b);
    if (!gens.is_array() || gens.empty()) fail(b, "generators must be a non-empty array");
    std::vector<BaseSpec> specs;
    for (const auto& g : gens) {
        BaseSpec s;
        s.name = text(field(g, "name", b), b, "name");
        s.zdeg = integer(field(g, "degree", b), b, "degree");
        s.form_name = g.contains("form") ? text(g["form"], b, "form") : "d" + s.name;
        s.fiber_name = g.contains("fiber") ? text(g["fiber"], b, "fiber") : "e_" + s.name;
        specs.push_back(std::move(s));
    }
    return Chart::make(std::move(specs), t);
}

template <class F>
void in_block(const std::string& block, F&& f) {
    try {
        f();
    } catch (const InputError& e) {
        const std::string msg = e.what();
        if (msg.rfind("session:", 0) == 0) throw;
        fail(block, msg);
    } catch (const Error& e) {
        fail(block, e.what());
    }
}

// Objects are indented; arrays holding no objects are written on one line.
void write(std::ostringstream& os, const Json& j, int indent) {
    const std::string pad(indent, ' '), inner(indent + 2, ' ');
    bool has_object = false;
    if (j.is_array())
        for (const auto& e : j) has_object |= e.is_object();
    if (j.is_object() && !j.empty()) {
        os << "{\n";
        std::size_t i = 0;
        for (const auto& [k, v] : j.items()) {
            os << inner << Json(k).dump() << ": ";
            write(os, v, indent + 2);
            os << (++i < j.size() ? ",\n" : "\n");
        }
        os << pad << "}";
    } else if (has_object) {
        os << "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            os << inner;
            write(os, j[i], indent + 2);
            os << (i + 1 < j.size() ? ",\n" : "\n");
        }
        os << pad << "]";
    } else {
        os << j.dump(-1, ' ', false);
    }
}

}  // namespace

QPStructure qp_structure(const ChartPtr& chart, const QPBlock& b) {
    std::vector<Series> img(chart->size(), Series(chart));
    for (std::size_t a = 0; a < b.Q.size(); ++a) img[chart->base(a)] = b.Q[a];
    return {chart, b.P, b.omega, Derivation(chart, 1, img)};
}

Session parse_session(const std::string& input, const TruncationOverride& over) {
    Json j;
    try {
        j = Json::parse(input);
    } catch (const Json::parse_error& e) {
        std::size_t line = 1, col = 1;
        const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, input.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (input[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string what = e.what();
        if (auto p = what.find(": "); p != std::string::npos) what = what.substr(p + 2);
        throw InputError("session: parse error at line " + std::to_string(line) + ", column " +
                         std::to_string(col) + ": " + what);
    }
    if (!j.is_object()) throw InputError("session: top level must be an object");
    static const std::vector<std::string> known = {"chart",  "fexp",     "grothendieck", "christoffel",
                                                   "qp",     "diffeo",   "point",        "function",
                                                   "form",   "fiber_morphism", "result"};
    for (const auto& [k, v] : j.items())
        if (std::find(known.begin(), known.end(), k) == known.end())
            throw InputError("session: unknown block '" + k + "'");
    if (!j.contains("chart")) throw InputError("session: block 'chart' is required");

    Session s;
    in_block("chart", [&] { s.chart = parse_chart(j["chart"], over); });
    const ChartPtr& c = s.chart;

    if (j.contains("fexp"))
        in_block("fexp", [&] { s.fexp = FormalExpMap{c, per_base(c, j["fexp"], "fexp", true)}; });
    if (j.contains("grothendieck"))
        in_block("grothendieck", [&] {
            const Json& g = j["grothendieck"];
            const int order = integer(field(g, "order", "grothendieck"), "grothendieck", "order");
            const Json& im = field(g, "images", "grothendieck");
            if (!im.is_object()) fail("grothendieck", "images must be an object keyed by fiber generator");
            std::vector<Series> eps(c->base_count(), Series(c));
            std::vector<bool> seen(c->base_count(), false);
            for (const auto& [k, v] : im.items()) {
                const std::size_t a = fiber_index(c, k, "grothendieck");
                eps[a] = series(c, v, "grothendieck");
                seen[a] = true;
            }
            for (std::size_t a = 0; a < seen.size(); ++a)
                if (!seen[a]) fail("grothendieck", "no image for '" + c->gen(c->fiber(a)).name + "'");
            s.grothendieck = GrothendieckConnection{lift_of_de_rham(c, eps), order};
        });
    if (j.contains("christoffel"))
        in_block("christoffel", [&] {
            const Json& arr = j["christoffel"];
            if (!arr.is_array()) fail("christoffel", "expected an array of entries");
            Connection conn(c);
            std::vector<std::vector<std::vector<bool>>> set(
                c->base_count(), std::vector<std::vector<bool>>(c->base_count(), std::vector<bool>(c->base_count())));
            for (const auto& e : arr) {
                const std::size_t up = base_index(c, text(field(e, "upper", "christoffel"), "christoffel", "upper"),
                                                  "christoffel");
                const Json& lo = field(e, "lower", "christoffel");
                if (!lo.is_array() || lo.size() != 2) fail("christoffel", "lower must list two base generators");
                const std::size_t a = base_index(c, text(lo[0], "christoffel", "lower"), "christoffel");
                const std::size_t b = base_index(c, text(lo[1], "christoffel", "lower"), "christoffel");
                if (set[up][a][b]) fail("christoffel", "duplicate entry for " + c->gen(up).name + "_" +
                                                           c->gen(a).name + c->gen(b).name);
                set[up][a][b] = set[up][b][a] = true;
                conn.set_symmetric(up, a, b, series(c, field(e, "value", "christoffel"), "christoffel"));
            }
            s.christoffel = conn;
        });
    if (j.contains("qp"))
        in_block("qp", [&] {
            const Json& q = j["qp"];
            QPBlock b;
            b.P = integer(field(q, "P", "qp"), "qp", "P");
            b.omega.assign(c->base_count(), std::vector<Rational>(c->base_count(), 0));
            const Json& om = field(q, "omega", "qp");
            if (!om.is_array()) fail("qp", "omega must be an array of [row, column, value]");
            for (const auto& e : om) {
                if (!e.is_array() || e.size() != 3) fail("qp", "omega entry must be [row, column, value]");
                const std::size_t r = base_index(c, text(e[0], "qp", "row"), "qp");
                const std::size_t col = base_index(c, text(e[1], "qp", "column"), "qp");
                b.omega[r][col] = rational(e[2], "qp", "omega value");
            }
            b.Q = q.contains("Q") ? per_base(c, q["Q"], "qp", false)
                                  : std::vector<Series>(c->base_count(), Series(c));
            qp_structure(c, b);  // degree check
            s.qp = b;
        });
    if (j.contains("diffeo"))
        in_block("diffeo", [&] {
            const Json& d = j["diffeo"];
            s.diffeo = Diffeo{per_base(c, field(d, "forward", "diffeo"), "diffeo", true),
                              per_base(c, field(d, "inverse", "diffeo"), "diffeo", true)};
        });
    if (j.contains("point"))
        in_block("point", [&] {
            const Json& p = j["point"];
            if (!p.is_object()) fail("point", "expected an object keyed by base generator");
            BasePoint x(c->base_count(), Rational(0));
            for (const auto& [k, v] : p.items()) {
                const std::size_t a = base_index(c, k, "point");
                if (v.is_null()) x[a] = std::nullopt;
                else x[a] = rational(v, "point", "coordinate");
            }
            s.point = x;
        });
    if (j.contains("function")) in_block("function", [&] { s.function = series(c, j["function"], "function"); });
    if (j.contains("form")) in_block("form", [&] { s.form = series(c, j["form"], "form"); });
    if (j.contains("fiber_morphism"))
        in_block("fiber_morphism", [&] {
            const Json& m = j["fiber_morphism"];
            if (!m.is_object()) fail("fiber_morphism", "expected an object keyed by fiber generator");
            FiberMorphism r{c, std::vector<Series>(c->base_count(), Series(c))};
            for (const auto& [k, v] : m.items())
                r.eps_images[fiber_index(c, k, "fiber_morphism")] = series(c, v, "fiber_morphism");
            s.fiber_morphism = r;
        });
    if (j.contains("result")) in_block("result", [&] { s.result = series(c, j["result"], "result"); });
    return s;
}

std::string serialize_session(const Session& s) {
    const ChartPtr& c = s.chart;
    Json j = Json::object();
    Json chart = Json::object();
    chart["order"] = c->trunc().res;
    chart["form_order"] = c->trunc().form;
    Json gens = Json::array();
    for (std::size_t a = 0; a < c->base_count(); ++a) {
        Json g = Json::object();
        g["name"] = c->gen(c->base(a)).name;
        g["degree"] = c->gen(c->base(a)).zdeg;
        g["form"] = c->gen(c->form(a)).name;
        g["fiber"] = c->gen(c->fiber(a)).name;
        gens.push_back(g);
    }
    chart["generators"] = gens;
    j["chart"] = chart;

    if (s.fexp) j["fexp"] = per_base_json(c, s.fexp->pullbacks, false);
    if (s.grothendieck) {
        Json g = Json::object();
        g["order"] = s.grothendieck->order;
        Json im = Json::object();
        for (std::size_t a = 0; a < c->base_count(); ++a)
            im[c->gen(c->fiber(a)).name] = series_json(s.grothendieck->D.image(c->fiber(a)));
        g["images"] = im;
        j["grothendieck"] = g;
    }
    if (s.christoffel) {
        Json arr = Json::array();
        const std::size_t n = c->base_count();
        for (std::size_t up = 0; up < n; ++up)
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = a; b < n; ++b) {
                    const Series& v = s.christoffel->coeff(up, a, b);
                    if (v.is_zero()) continue;
                    Json e = Json::object();
                    e["upper"] = c->gen(up).name;
                    e["lower"] = Json::array({c->gen(a).name, c->gen(b).name});
                    e["value"] = series_json(v);
                    arr.push_back(e);
                }
        j["christoffel"] = arr;
    }
    if (s.qp) {
        Json q = Json::object();
        q["P"] = s.qp->P;
        Json om = Json::array();
        for (std::size_t r = 0; r < c->base_count(); ++r)
            for (std::size_t col = 0; col < c->base_count(); ++col)
                if (s.qp->omega[r][col] != 0)
                    om.push_back(Json::array({c->gen(r).name, c->gen(col).name, to_string(s.qp->omega[r][col])}));
        q["omega"] = om;
        q["Q"] = per_base_json(c, s.qp->Q, true);
        j["qp"] = q;
    }
    if (s.diffeo) {
        Json d = Json::object();
        d["forward"] = per_base_json(c, s.diffeo->forward, false);
        d["inverse"] = per_base_json(c, s.diffeo->inverse, false);
        j["diffeo"] = d;
    }
    if (s.point) {
        Json p = Json::object();
        for (std::size_t a = 0; a < c->base_count(); ++a) {
            const auto& v = (*s.point)[a];
            p[c->gen(a).name] = v ? Json(to_string(*v)) : Json(nullptr);
        }
        j["point"] = p;
    }
    if (s.function) j["function"] = series_json(*s.function);
    if (s.form) j["form"] = series_json(*s.form);
    if (s.fiber_morphism) {
        Json m = Json::object();
        for (std::size_t a = 0; a < c->base_count(); ++a)
            m[c->gen(c->fiber(a)).name] = series_json(s.fiber_morphism->eps_images[a]);
        j["fiber_morphism"] = m;
    }
    if (s.result) j["result"] = series_json(*s.result);
    std::ostringstream os;
    write(os, j, 0);
    os << "\n";
    return os.str();
}

Session chart_only(const Session& s) {
    Session out;
    out.chart = s.chart;
    return out;
}

}  // namespace fexp
