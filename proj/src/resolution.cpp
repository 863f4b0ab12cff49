#include "fexp/resolution.hpp"

namespace fexp {

HomotopyData build_zeta(const GrothendieckConnection& g) {
    const ChartPtr& c = g.chart();
    const std::size_t n = c->base_count();
    HomotopyData h{Derivation(c, -1), piece(g.D, -1), Derivation::counting(c)};
    const SeriesMatrix z = unimodular_inverse(g.leading_matrix(), "leading connection matrix");
    for (std::size_t a = 0; a < n; ++a) {
        Series img(c);
        for (std::size_t b = 0; b < n; ++b) img += Series::generator(c, c->fiber(b)) * z(b, a);
        h.zeta.set_image(c->form(a), img);
    }
    const Derivation k = commutator(h.zeta, h.delta);
    for (std::size_t x = 0; x < c->size(); ++x)
        if (!(k.image(x) == h.eps_ht.image(x)))
            throw InvariantError("contraction identity fails on " + c->gen(x).name + ": " + to_string(k.image(x)));
    return h;
}

HomotopyData build_zeta(const FormalExpMap& f) {
    return build_zeta(grothendieck_from_fexp(f));
}

Series homotopy_H(const HomotopyData& h, const Series& f) {
    // zeta raises resolution degree, so work in the full chart window.
    const Truncation t = f.chart()->trunc();
    Series out(f.chart(), t);
    if (f.is_zero()) return out;
    const int top = f.max_degree(Grading::deg_ht);
    for (int w = 1; w <= top; ++w) {
        const Series fw = grade_project(f, Grading::deg_ht, w).with_trunc(t);
        if (fw.is_zero()) continue;
        Series z = h.zeta.apply(fw);
        z *= Rational(1, w);
        out += z;
    }
    return out;
}

Series cohomology_lift(const GrothendieckConnection& g, const HomotopyData& h, const Series& base_function) {
    const ChartPtr& c = g.chart();
    if (!base_function.depends_only_on_base())
        throw PreconditionError("cohomology_lift: input must be a function of the base coordinates");
    const int top = std::min(g.order, c->trunc().res - 1);  // last degree where D f is known
    const int form = c->trunc().form;
    Series f = base_function;
    for (int l = 0; l <= top; ++l) {
        const Series r = grade_project(g.D.apply(f), Grading::resdeg, l);
        if (r.is_zero()) continue;
        if (!h.delta.apply(r).is_zero())
            throw PreconditionError("cohomology_lift: obstruction at resolution degree " + std::to_string(l) +
                                    " is not delta-closed (connection not flat)");
        f -= homotopy_H(h, r);
    }
    const Series res = g.D.apply(f).truncated(top, form);
    if (!res.is_zero())
        throw PreconditionError("cohomology_lift: D f does not vanish: " + to_string(res));
    auto s0 = identity_images(c);
    for (std::size_t a = 0; a < c->base_count(); ++a) s0[c->fiber(a)] = Series(c);
    if (!(ring_morphism(s0, f) == base_function))
        throw InvariantError("cohomology_lift: zero-section restriction changed");
    return f;
}

Series find_primitive(const GrothendieckConnection& g, const HomotopyData& h, const Series& f) {
    const ChartPtr& c = g.chart();
    const int form = c->trunc().form;
    const int top = std::min(g.order, c->trunc().res) - 1;
    if (!f.is_zero() && f.min_degree(Grading::formdeg) == 0)
        throw PreconditionError("find_primitive: input has form-degree-0 terms");
    if (!g.D.apply(f).truncated(top, form).is_zero())
        throw PreconditionError("find_primitive: input is not D-closed");
    const Series target = f.truncated(top, form);
    Series p(c);
    Series rem = target;
    while (!rem.is_zero()) {
        const int n = rem.min_degree(Grading::resdeg);
        const Series lowest = grade_project(rem, Grading::resdeg, n);
        if (n > 0 && !h.delta.apply(lowest).truncated(top, form).is_zero())
            throw InvariantError("find_primitive: lowest component at resolution degree " + std::to_string(n) +
                                 " is not delta-closed");
        p += homotopy_H(h, lowest);
        const Series next = (target - g.D.apply(p)).truncated(top, form);
        if (!next.is_zero() && next.min_degree(Grading::resdeg) <= n)
            throw InvariantError("find_primitive: no progress at resolution degree " + std::to_string(n));
        rem = next;
    }
    return p;
}

}  // namespace fexp
