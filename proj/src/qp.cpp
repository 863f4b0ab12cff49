#include "fexp/qp.hpp"

#include <algorithm>
#include <set>

namespace fexp {

namespace {

void check_omega_shape(const ChartPtr& chart, const RationalMatrix& omega) {
    const std::size_t n = chart->base_count();
    if (omega.size() != n) throw InputError("qp: omega must be " + std::to_string(n) + "x" + std::to_string(n));
    for (const auto& row : omega)
        if (row.size() != n) throw InputError("qp: omega must be " + std::to_string(n) + "x" + std::to_string(n));
}

Rational rational_det(RationalMatrix m) {
    const std::size_t n = m.size();
    Rational det = 1;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && m[piv][col] == 0) ++piv;
        if (piv == n) return 0;
        if (piv != col) {
            std::swap(m[piv], m[col]);
            det = -det;
        }
        det *= m[col][col];
        for (std::size_t r = col + 1; r < n; ++r) {
            if (m[r][col] == 0) continue;
            const Rational k = m[r][col] / m[col][col];
            for (std::size_t c = col; c < n; ++c) m[r][c] -= k * m[col][c];
        }
    }
    return det;
}

std::string gen_name(const Chart& c, std::size_t g) { return c.gen(g).name; }

}  // namespace

Series symplectic_form(const ChartPtr& chart, const RationalMatrix& omega) {
    check_omega_shape(chart, omega);
    Series out(chart);
    const std::size_t n = chart->base_count();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            if (omega[a][b] == 0) continue;
            Series t = Series::generator(chart, chart->form(a)) * Series::generator(chart, chart->form(b));
            t *= omega[a][b] / 2;
            out += t;
        }
    return out;
}

Derivation tangent_lift(const Derivation& q) {
    const ChartPtr& c = q.chart();
    Derivation out(c, q.zdeg());
    for (std::size_t a = 0; a < c->base_count(); ++a) {
        const Series& qa = q.image(c->base(a));
        out.set_image(c->base(a), qa);
        Series lift(c);
        for (std::size_t b = 0; b < c->base_count(); ++b)
            lift += Series::generator(c, c->form(b)) * partial(c->base(b), qa);
        out.set_image(c->form(a), lift);
    }
    return out;
}

Report validate_qp(const QPStructure& s) {
    Report rep;
    const ChartPtr& c = s.chart;
    check_omega_shape(c, s.omega);
    require_same_chart(c, s.Q.chart(), "validate_qp");
    if (c->trunc().form < 2) throw InputError("validate_qp: form order must be at least 2");
    if (s.Q.zdeg() != 1) rep.violations.push_back("Q has degree " + std::to_string(s.Q.zdeg()) + ", expected 1");
    for (std::size_t g = 0; g < c->size(); ++g) {
        const Series& img = s.Q.image(g);
        if (g >= c->base_count()) {
            if (!img.is_zero()) rep.violations.push_back("Q acts on non-base generator " + gen_name(*c, g));
        } else if (!img.depends_only_on_base()) {
            rep.violations.push_back("Q(" + gen_name(*c, g) + ") is not a function of the base coordinates");
        }
    }

    const std::size_t n = c->base_count();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            const int da = c->gen(c->base(a)).zdeg, db = c->gen(c->base(b)).zdeg;
            const Rational& w = s.omega[a][b];
            if (w != 0 && da + db != s.P)
                rep.violations.push_back("omega(" + gen_name(*c, a) + "," + gen_name(*c, b) + ") pairs degrees " +
                                         std::to_string(da) + "+" + std::to_string(db) + " != P=" +
                                         std::to_string(s.P));
            const int sign = ((da + 1) * (db + 1)) % 2 ? -1 : 1;
            if (a < b && w != sign * s.omega[b][a])
                rep.violations.push_back("omega(" + gen_name(*c, a) + "," + gen_name(*c, b) +
                                         ") breaks graded symmetry");
            if (a == b && sign < 0 && w != 0)
                rep.violations.push_back("omega(" + gen_name(*c, a) + "," + gen_name(*c, a) + ") must vanish");
        }
    if (rational_det(s.omega) == 0) rep.violations.push_back("omega is degenerate");

    const Derivation q2 = square(s.Q);
    for (std::size_t a = 0; a < n; ++a)
        if (!q2.image(a).is_zero())
            rep.violations.push_back("1/2[Q,Q](" + gen_name(*c, a) + ") = " + to_string(q2.image(a)));
    const Series lw = tangent_lift(s.Q).apply(symplectic_form(c, s.omega));
    if (!lw.is_zero()) rep.violations.push_back("L_Q omega = " + to_string(lw));
    rep.notes.push_back("checked omega degrees, graded symmetry, nondegeneracy, [Q,Q] = 0, L_Q omega = 0");
    return rep;
}

// ---------------------------------------------------------------- package

int LInftyPackage::w_degree(const Monomial& m) const {
    int d = 0;
    for (std::size_t a = 0; a < source->base_count(); ++a) d += m.exp(w(a));
    return d;
}

Series LInftyPackage::up_to_w(const Series& f, int k) const {
    Series out(f.chart(), f.trunc());
    for (const auto& [m, c] : f.terms())
        if (w_degree(m) <= k) out.add_term(m, c);
    return out;
}

Series LInftyPackage::w_part(const Series& f, int k) const {
    Series out(f.chart(), f.trunc());
    for (const auto& [m, c] : f.terms())
        if (w_degree(m) == k) out.add_term(m, c);
    return out;
}

Derivation LInftyPackage::vector_field() const {
    Derivation v(chart, 1);
    for (std::size_t a = 0; a < q.size(); ++a) v.set_image(w(a), q[a]);
    return v;
}

Series LInftyPackage::pairing() const {
    Series out(chart);
    const std::size_t n = q.size();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            if (omega[a][b] == 0) continue;
            Series t = Series::generator(chart, chart->form(w(a))) * Series::generator(chart, chart->form(w(b)));
            t *= omega[a][b] / 2;
            out += t;
        }
    return out;
}

LInftyPackage linearize_at_point(const QPStructure& s, const FormalExpMap& f, const BasePoint& x,
                                 bool require_valid) {
    const ChartPtr& c = s.chart;
    require_same_chart(c, f.chart, "linearize_at_point");
    const std::size_t n = c->base_count();
    if (x.size() != n) throw InputError("linearize: point must give " + std::to_string(n) + " coordinates");
    if (require_valid) {
        const Report qr = validate_qp(s);
        if (!qr.ok()) throw PreconditionError("linearize: invalid QP structure: " + qr.violations.front());
    }
    for (std::size_t a = 0; a < n; ++a) {
        const int d = c->gen(a).zdeg;
        if (d == 0) continue;
        if (!x[a]) throw PreconditionError("linearize: coordinate " + gen_name(*c, a) + " of degree " +
                                           std::to_string(d) + " cannot be symbolic");
        if (*x[a] != 0)
            throw PreconditionError("linearize: not a body point (" + gen_name(*c, a) + " has nonzero value)");
    }
    // Canonicalization checks F and brings it to z + eps, so the fiber map
    // at x is z -> x + eps.
    canonicalize(f);

    LInftyPackage pkg;
    pkg.source = c;
    pkg.point = x;
    pkg.order = f.order();
    pkg.omega = s.omega;
    std::vector<BaseSpec> specs;
    for (std::size_t a = 0; a < n; ++a)
        if (!x[a]) {
            pkg.params.push_back(a);
            specs.push_back({c->gen(c->base(a)).name, 0, c->gen(c->form(a)).name, "_p" + std::to_string(a)});
        }
    for (std::size_t a = 0; a < n; ++a) {
        const std::string& nm = c->gen(c->fiber(a)).name;
        specs.push_back({nm, c->gen(c->fiber(a)).zdeg, "d" + nm, "_w" + std::to_string(a)});
    }
    pkg.chart = Chart::make(std::move(specs), {0, 2});
    const ChartPtr& L = pkg.chart;

    std::vector<Series> images(c->size(), Series(L));
    std::size_t p = 0;
    for (std::size_t a = 0; a < n; ++a) {
        Series img = Series::generator(L, pkg.w(a));
        if (x[a]) img += Series::constant(L, *x[a]);
        else img += Series::generator(L, p++);
        images[c->base(a)] = img;
    }
    for (std::size_t a = 0; a < n; ++a) pkg.q.push_back(pkg.up_to_w(ring_morphism(images, s.Q.image(a)), pkg.order));

    // Brackets: l_n^a(b_1..b_n) = d_{b_1} ... d_{b_n} Q_x^a at w = 0.
    for (std::size_t a = 0; a < n; ++a) {
        std::set<std::vector<std::size_t>> tuples;
        for (const auto& [m, coef] : pkg.q[a].terms()) {
            std::vector<std::size_t> t;
            for (std::size_t b = 0; b < n; ++b)
                for (unsigned k = 0; k < m.exp(pkg.w(b)); ++k) t.push_back(b);
            tuples.insert(t);
        }
        for (const auto& t : tuples) {
            Series d = pkg.q[a];
            for (auto it = t.rbegin(); it != t.rend(); ++it) d = partial(pkg.w(*it), d);
            d = pkg.w_part(d, 0);
            if (d.is_zero()) continue;
            pkg.brackets.push_back({static_cast<int>(t.size()), a, t, d});
        }
    }
    std::sort(pkg.brackets.begin(), pkg.brackets.end(), [](const BracketEntry& l, const BracketEntry& r) {
        if (l.arity != r.arity) return l.arity < r.arity;
        if (l.output != r.output) return l.output < r.output;
        return l.inputs < r.inputs;
    });

    for (const auto& e : pkg.brackets) {
        if (e.arity == 0) pkg.curved = true;
        int in = 0;
        for (std::size_t b : e.inputs) in += c->gen(b).zdeg;
        if (in != c->gen(e.output).zdeg + 1)
            pkg.report.violations.push_back("l_" + std::to_string(e.arity) + " entry into " + gen_name(*c, e.output) +
                                            " has inconsistent degree");
    }
    if (pkg.curved) pkg.report.notes.push_back("curved: l_0 is nonzero");

    const Derivation q2 = square(pkg.vector_field());
    for (std::size_t a = 0; a < n; ++a) {
        const Series r = pkg.up_to_w(q2.image(pkg.w(a)), pkg.order - 1);
        if (!r.is_zero())
            pkg.report.violations.push_back("Q_x^2(" + L->gen(pkg.w(a)).name + ") = " + to_string(r));
    }
    pkg.report.notes.push_back("checked Q_x^2 = 0 through w-degree " + std::to_string(pkg.order - 1));
    return pkg;
}

CyclicReport check_cyclic(const LInftyPackage& pkg) {
    CyclicReport rep;
    const ChartPtr& L = pkg.chart;
    Derivation lift(L, 1);
    for (std::size_t a = 0; a < pkg.q.size(); ++a) {
        lift.set_image(pkg.w(a), pkg.q[a]);
        Series img(L);
        for (std::size_t b = 0; b < pkg.q.size(); ++b)
            img += Series::generator(L, L->form(pkg.w(b))) * partial(pkg.w(b), pkg.q[a]);
        lift.set_image(L->form(pkg.w(a)), img);
    }
    const Series lw = lift.apply(pkg.pairing());
    for (int arity = 1; arity <= pkg.order; ++arity) {
        const Series part = pkg.w_part(lw, arity - 1);
        rep.arities.emplace_back(arity, part.is_zero());
        if (!part.is_zero())
            rep.violations.push_back("arity " + std::to_string(arity) + ": L_Q omega part " + to_string(part));
    }
    return rep;
}

}  // namespace fexp
