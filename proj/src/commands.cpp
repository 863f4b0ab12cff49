#include "fexp/commands.hpp"

#include <functional>
#include <map>
#include <sstream>

#include "fexp/resolution.hpp"

namespace fexp {

namespace {

class Out {
public:
    explicit Out(std::string cmd) : cmd_(std::move(cmd)) { body_ << "== " << cmd_ << "\n"; }

    std::ostream& line() { return body_; }
    void check(const std::string& identity) { body_ << "checked: " << identity << "\n"; }
    void violation(const std::string& v) {
        body_ << "VIOLATION: " << v << "\n";
        ++violations_;
    }
    void violations(const Report& r, const std::string& prefix = "") {
        for (const auto& v : r.violations) violation(prefix + v);
        for (const auto& n : r.notes) body_ << "note: " << prefix << n << "\n";
    }
    void key(const std::string& k, const std::string& v) { trailer_.emplace_back(k, v); }
    void key(const std::string& k, long v) { key(k, std::to_string(v)); }
    int violation_count() const { return violations_; }

    CommandResult finish(std::optional<Session> output = std::nullopt) const {
        CommandResult r;
        r.exit_code = violations_ ? exit_violations : exit_ok;
        r.output = std::move(output);
        r.report = render(violations_ ? "violations" : "ok");
        return r;
    }

    std::string render(const std::string& status) const {
        std::ostringstream os;
        os << body_.str() << "--\n";
        os << "command=" << cmd_ << "\n";
        os << "status=" << status << "\n";
        os << "violations=" << violations_ << "\n";
        for (const auto& [k, v] : trailer_) os << k << "=" << v << "\n";
        return os.str();
    }

private:
    std::string cmd_;
    std::ostringstream body_;
    std::vector<std::pair<std::string, std::string>> trailer_;
    int violations_ = 0;
};

const std::string& name(const ChartPtr& c, std::size_t g) { return c->gen(g).name; }

void require_block(bool present, const std::string& block, const std::string& cmd) {
    if (!present) throw InputError(cmd + ": session has no '" + block + "' block");
}

// Connection from the session: the grothendieck block if present, else
// built from the fexp block.
GrothendieckConnection connection_of(const Session& s, const std::string& cmd) {
    if (s.grothendieck) return *s.grothendieck;
    require_block(s.fexp.has_value(), "grothendieck' or 'fexp", cmd);
    return grothendieck_from_fexp(*s.fexp);
}

void print_connection(Out& out, const GrothendieckConnection& g) {
    const ChartPtr& c = g.chart();
    for (std::size_t a = 0; a < c->base_count(); ++a)
        out.line() << "D(" << name(c, c->fiber(a)) << ") = " << to_string(g.D.image(c->fiber(a))) << "\n";
}

void print_fexp(Out& out, const FormalExpMap& f) {
    for (std::size_t a = 0; a < f.pullbacks.size(); ++a)
        out.line() << "fexp*" << name(f.chart, a) << " = " << to_string(f.pullbacks[a]) << "\n";
}

int report_flatness(Out& out, const GrothendieckConnection& g) {
    const auto res = check_flatness(g);
    const int top = std::min(g.order, g.chart()->trunc().res) - 1;
    out.check("D^2 = 0 on all generators through resolution degree " + std::to_string(top));
    for (const auto& r : res)
        out.violation("D^2(" + name(g.chart(), r.generator) + ") at resolution degree " +
                      std::to_string(r.resdeg) + ": " + to_string(r.value));
    out.line() << res.size() << " nonzero residuals";
    if (res.empty()) out.line() << " (" << g.chart()->size() << " generators, all components zero)";
    out.line() << "\n";
    return static_cast<int>(res.size());
}

Session with_chart(const Session& s) { return chart_only(s); }

// ------------------------------------------------------------- commands

CommandResult cmd_validate(const Session& s) {
    Out out("validate");
    std::vector<std::string> blocks;
    if (s.fexp) {
        blocks.push_back("fexp");
        const auto r = validate_fexp(*s.fexp);
        out.check("fexp: degree-0 part is z, linear part unimodular");
        out.violations(r, "fexp: ");
        out.line() << "fexp: " << (r.proper ? "proper" : "not proper") << "\n";
    }
    if (s.grothendieck) {
        blocks.push_back("grothendieck");
        out.check("grothendieck: lifts d, form degree 1, unimodular leading term");
        out.violations(validate_grothendieck(*s.grothendieck), "grothendieck: ");
        report_flatness(out, *s.grothendieck);
    }
    if (s.christoffel) {
        blocks.push_back("christoffel");
        out.check("christoffel: degrees and graded symmetry");
        out.violations(validate_connection(*s.christoffel), "christoffel: ");
    }
    if (s.qp) {
        blocks.push_back("qp");
        out.check("qp: omega, [Q,Q] = 0, L_Q omega = 0");
        out.violations(validate_qp(qp_structure(s.chart, *s.qp)), "qp: ");
    }
    if (s.diffeo) {
        blocks.push_back("diffeo");
        out.check("diffeo: forward and inverse compose to the identity");
        try {
            check_diffeo(s.chart, *s.diffeo);
        } catch (const PreconditionError& e) {
            out.violation(std::string("diffeo: ") + e.what());
        }
    }
    std::string list;
    for (const auto& b : blocks) list += (list.empty() ? "" : ",") + b;
    out.key("blocks", list.empty() ? "none" : list);
    return out.finish();
}

CommandResult cmd_g_from_f(const Session& s) {
    Out out("g-from-f");
    require_block(s.fexp.has_value(), "fexp", "g-from-f");
    const auto g = grothendieck_from_fexp(*s.fexp);
    out.check("D(fexp* z^a) = 0 through resolution degree " + std::to_string(g.order));
    print_connection(out, g);
    out.key("order", g.order);
    Session o = with_chart(s);
    o.grothendieck = g;
    return out.finish(o);
}

CommandResult cmd_f_from_g(const Session& s) {
    Out out("f-from-g");
    require_block(s.grothendieck.has_value(), "grothendieck", "f-from-g");
    const auto f = fexp_from_grothendieck(*s.grothendieck);
    out.check("D(fexp* z^a) = 0 and the residual equation at every degree");
    print_fexp(out, f);
    out.key("order", f.order());
    out.key("proper", validate_fexp(f).proper ? "true" : "false");
    Session o = with_chart(s);
    o.fexp = f;
    return out.finish(o);
}

CommandResult cmd_flatness(const Session& s) {
    Out out("flatness");
    const auto g = connection_of(s, "flatness");
    out.key("residuals", report_flatness(out, g));
    return out.finish();
}

CommandResult cmd_canonicalize(const Session& s) {
    Out out("canonicalize");
    require_block(s.fexp.has_value(), "fexp", "canonicalize");
    const auto rho = canonicalize(*s.fexp);
    out.check("rho* fexp* z^a = z^a + eps^a through resolution degree " + std::to_string(s.fexp->order()));
    for (std::size_t a = 0; a < rho.eps_images.size(); ++a)
        out.line() << "rho*(" << name(s.chart, s.chart->fiber(a)) << ") = " << to_string(rho.eps_images[a]) << "\n";
    Session o = with_chart(s);
    o.fiber_morphism = rho;
    return out.finish(o);
}

CommandResult cmd_transfer(const Session& s) {
    Out out("transfer");
    require_block(s.fexp.has_value(), "fexp", "transfer");
    require_block(s.diffeo.has_value(), "diffeo", "transfer");
    const auto g = grothendieck_from_fexp(*s.fexp);
    const auto t = transfer_diffeo(*s.fexp, g, *s.diffeo);
    const auto rebuilt = grothendieck_from_fexp(t.fexp);
    out.check("transfer-then-construct equals construct-then-transfer");
    const int top = std::min(rebuilt.order, t.connection.order);
    bool same = true;
    for (std::size_t a = 0; a < s.chart->base_count(); ++a) {
        const auto x = s.chart->fiber(a);
        const int f = s.chart->trunc().form;
        if (!(rebuilt.D.image(x).truncated(top, f) == t.connection.D.image(x).truncated(top, f))) {
            same = false;
            out.violation("naturality fails on " + name(s.chart, x));
        }
    }
    print_fexp(out, t.fexp);
    print_connection(out, t.connection);
    out.key("naturality", same ? "exact" : "fails");
    out.key("order", top);
    Session o = with_chart(s);
    o.fexp = t.fexp;
    o.grothendieck = t.connection;
    return out.finish(o);
}

CommandResult cmd_lift(const Session& s) {
    Out out("lift");
    require_block(s.function.has_value(), "function", "lift");
    const auto g = connection_of(s, "lift");
    const auto h = build_zeta(g);
    const Series l = cohomology_lift(g, h, *s.function);
    out.check("D(lift) = 0 and lift = g on the zero section");
    out.line() << "lift = " << to_string(l) << "\n";
    if (s.fexp) {
        auto pull = identity_images(s.chart);
        for (std::size_t a = 0; a < s.chart->base_count(); ++a) pull[s.chart->base(a)] = s.fexp->pullbacks[a];
        out.check("lift equals the pullback of g through fexp");
        if (!(ring_morphism(pull, *s.function) == l)) out.violation("lift differs from fexp* g");
    }
    Session o = with_chart(s);
    o.result = l;
    return out.finish(o);
}

CommandResult cmd_primitive(const Session& s) {
    Out out("primitive");
    require_block(s.form.has_value(), "form", "primitive");
    const auto g = connection_of(s, "primitive");
    const auto h = build_zeta(g);
    const Series p = find_primitive(g, h, *s.form);
    const int top = std::min(g.order, s.chart->trunc().res) - 1;
    const int form = s.chart->trunc().form;
    out.check("D p = f through resolution degree " + std::to_string(top));
    const Series r = (g.D.apply(p) - *s.form).truncated(top, form);
    if (!r.is_zero()) out.violation("D p - f = " + to_string(r));
    out.line() << "p = " << to_string(p) << "\n";
    Session o = with_chart(s);
    o.result = p;
    return out.finish(o);
}

void enumerate(const ChartPtr& c, std::size_t g, std::vector<std::uint8_t>& exps, int res, int form,
               const std::function<void(const Monomial&)>& visit) {
    if (g == c->size()) {
        visit(Monomial(*c, exps));
        return;
    }
    const Generator& gen = c->gen(g);
    if (gen.klass == GenClass::base) {
        enumerate(c, g + 1, exps, res, form, visit);
        return;
    }
    int& budget = gen.klass == GenClass::form ? form : res;
    const int cap = gen.odd() ? std::min(budget, 1) : budget;
    for (int e = 0; e <= cap; ++e) {
        exps[g] = static_cast<std::uint8_t>(e);
        budget -= e;
        enumerate(c, g + 1, exps, res, form, visit);
        budget += e;
    }
    exps[g] = 0;
}

CommandResult cmd_check_homotopy(const Session& s) {
    Out out("check-homotopy");
    const auto g = connection_of(s, "check-homotopy");
    const auto h = build_zeta(g);
    const ChartPtr& c = s.chart;
    out.check("[zeta, delta] = eps_HT on all " + std::to_string(c->size()) + " generators");
    const int res = std::min(g.order, c->trunc().res) - 1;
    const int form = c->trunc().form - 1;
    out.check("H delta + delta H = id - pr_0 on monomials with resolution degree <= " + std::to_string(res) +
              " and form degree <= " + std::to_string(form));
    std::vector<Series> prefactors = {Series::constant(c, 1)};
    for (std::size_t a = 0; a < c->base_count(); ++a) prefactors.push_back(Series::generator(c, c->base(a)));
    long count = 0;
    std::vector<std::uint8_t> exps(c->size(), 0);
    enumerate(c, 0, exps, res, form, [&](const Monomial& m) {
        for (const auto& pre : prefactors) {
            const Series f = pre * Series::monomial(c, m, 1);
            if (f.is_zero()) continue;
            ++count;
            Series lhs = homotopy_H(h, h.delta.apply(f)) + h.delta.apply(homotopy_H(h, f));
            const Series want = m.resdeg() + m.formdeg() == 0 ? Series(c) : f;
            if (!(lhs == want)) out.violation("homotopy identity fails on " + to_string(f));
        }
    });
    out.line() << count << " monomials checked\n";
    out.key("monomials", count);
    return out.finish();
}

CommandResult cmd_hpt(const Session& s) {
    Out out("hpt");
    require_block(s.christoffel.has_value(), "christoffel", "hpt");
    const Report v = validate_connection(*s.christoffel);
    if (!v.ok()) throw PreconditionError("hpt: " + v.violations.front());
    HptReport rep;
    const auto g = hpt_complete(*s.christoffel, &rep);
    out.check("[delta, S_k] = 0, [delta, D_{k+1}] + S_k = 0 at every step");
    for (const auto& l : rep.lines) out.line() << l << "\n";
    out.line() << "k=0 step " << (rep.literal_step_matches ? "equals" : "differs from")
               << " -1/2 [zeta, D_0^2]\n";
    print_connection(out, g);
    const int res = report_flatness(out, g);
    out.key("order", g.order);
    out.key("residuals", res);
    out.key("literal_step", rep.literal_step_matches ? "equal" : "differs");
    Session o = with_chart(s);
    o.grothendieck = g;
    return out.finish(o);
}

CommandResult cmd_extract_connection(const Session& s) {
    Out out("extract-connection");
    Connection conn;
    if (s.fexp) {
        conn = connection_from_fexp(*s.fexp);
        out.check("A^a_bc = -d_eps^c d_dz^b D_0(eps^a) from the fexp block");
    } else {
        require_block(s.grothendieck.has_value(), "fexp' or 'grothendieck", "extract-connection");
        conn = connection_from_grothendieck(*s.grothendieck);
        out.check("A^a_bc = -d_eps^c d_dz^b D_0(eps^a) from the grothendieck block");
    }
    out.violations(validate_connection(conn));
    const std::size_t n = s.chart->base_count();
    long nonzero = 0;
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a; b < n; ++b)
                if (!conn.coeff(c, a, b).is_zero()) {
                    ++nonzero;
                    out.line() << "A^" << name(s.chart, c) << "_" << name(s.chart, a) << "," << name(s.chart, b)
                               << " = " << to_string(conn.coeff(c, a, b)) << "\n";
                }
    out.key("coefficients", nonzero);
    Session o = with_chart(s);
    o.christoffel = conn;
    return out.finish(o);
}

CommandResult cmd_geodesic_oracle(const Session& s) {
    Out out("geodesic-oracle");
    require_block(s.christoffel.has_value(), "christoffel", "geodesic-oracle");
    std::vector<Rational> point;
    if (s.point)
        for (const auto& v : *s.point) {
            if (!v) throw InputError("geodesic-oracle: point must be numeric");
            point.push_back(*v);
        }
    const int order = std::min(4, s.chart->trunc().res);
    const auto jets = geodesic_taylor_oracle(*s.christoffel, order, point);
    const auto f = fexp_from_grothendieck(hpt_complete(*s.christoffel));
    out.check("jets of the connection-derived fexp equal the geodesic Taylor coefficients through order " +
              std::to_string(order));
    long mismatches = 0;
    for (int k = 0; k <= order; ++k)
        for (std::size_t a = 0; a < s.chart->base_count(); ++a) {
            Series mine = f.component(a, k);
            if (!point.empty()) mine = evaluate_at(mine, point);
            out.line() << "z_" << k << "^" << name(s.chart, a) << " = " << to_string(jets[k][a]) << "\n";
            if (!(mine == jets[k][a])) {
                ++mismatches;
                out.violation("order " + std::to_string(k) + ", " + name(s.chart, a) + ": fexp gives " +
                              to_string(mine));
            }
        }
    out.key("order", order);
    out.key("mismatches", mismatches);
    return out.finish();
}

CommandResult cmd_linearize(const Session& s) {
    Out out("linearize");
    require_block(s.qp.has_value(), "qp", "linearize");
    require_block(s.point.has_value(), "point", "linearize");
    const FormalExpMap f = s.fexp ? *s.fexp : FormalExpMap::canonical(s.chart);
    const QPStructure qp = qp_structure(s.chart, *s.qp);
    const auto pkg = linearize_at_point(qp, f, *s.point);
    out.check("QP structure: omega, [Q,Q] = 0, L_Q omega = 0");
    out.violations(pkg.report);
    const auto cyc = check_cyclic(pkg);
    out.check("L_{Q_x} omega_x = 0 through w-degree " + std::to_string(pkg.order - 1) + ", arity by arity");
    out.violations(cyc);
    for (auto [arity, ok] : cyc.arities)
        if (!ok) out.line() << "arity " << arity << ": not cyclic\n";
    long cyclic_ok = 0;
    for (auto [arity, ok] : cyc.arities) cyclic_ok += ok;
    out.line() << cyclic_ok << " of " << cyc.arities.size() << " arities cyclic\n";
    out.line() << "brackets (arity, output, inputs, coefficient):\n";
    for (const auto& e : pkg.brackets) {
        out.line() << e.arity << " " << name(s.chart, e.output) << " (";
        for (std::size_t i = 0; i < e.inputs.size(); ++i)
            out.line() << (i ? "," : "") << name(s.chart, e.inputs[i]);
        out.line() << ") " << to_string(e.coeff) << "\n";
    }
    out.key("brackets", static_cast<long>(pkg.brackets.size()));
    out.key("curved", pkg.curved ? "true" : "false");
    return out.finish();
}

using Handler = CommandResult (*)(const Session&);

const std::map<std::string, Handler>& handlers() {
    static const std::map<std::string, Handler> h = {
        {"validate", cmd_validate},
        {"g-from-f", cmd_g_from_f},
        {"f-from-g", cmd_f_from_g},
        {"flatness", cmd_flatness},
        {"canonicalize", cmd_canonicalize},
        {"transfer", cmd_transfer},
        {"lift", cmd_lift},
        {"primitive", cmd_primitive},
        {"check-homotopy", cmd_check_homotopy},
        {"hpt", cmd_hpt},
        {"extract-connection", cmd_extract_connection},
        {"geodesic-oracle", cmd_geodesic_oracle},
        {"linearize", cmd_linearize},
    };
    return h;
}

CommandResult error_result(const std::string& cmd, int code, const std::string& status, const std::string& msg) {
    CommandResult r;
    r.exit_code = code;
    std::ostringstream os;
    os << "== " << cmd << "\nerror: " << msg << "\n--\ncommand=" << cmd << "\nstatus=" << status << "\n";
    r.report = os.str();
    return r;
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {
        "validate", "g-from-f",       "f-from-g", "flatness",           "canonicalize",    "transfer", "lift",
        "primitive", "check-homotopy", "hpt",      "extract-connection", "geodesic-oracle", "linearize"};
    return names;
}

CommandResult run_command(const std::string& cmd, const Session& session) {
    auto it = handlers().find(cmd);
    if (it == handlers().end()) return error_result(cmd, exit_input, "input_error", "unknown command '" + cmd + "'");
    try {
        return it->second(session);
    } catch (const InputError& e) {
        return error_result(cmd, exit_input, "input_error", e.what());
    } catch (const PreconditionError& e) {
        return error_result(cmd, exit_precondition, "precondition_failed", e.what());
    } catch (const InvariantError& e) {
        return error_result(cmd, exit_invariant, "invariant_failed", e.what());
    }
}

}  // namespace fexp
