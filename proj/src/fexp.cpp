#include "fexp/fexp.hpp"

namespace fexp {

namespace {

const std::string& name_of(const Chart& chart, std::size_t g) { return chart.gen(g).name; }

bool only_classes(const Series& s, bool allow_form, bool allow_fiber) {
    const Chart& chart = *s.chart();
    for (const auto& [m, c] : s.terms())
        for (std::size_t g = 0; g < chart.size(); ++g) {
            if (!m.exp(g)) continue;
            const auto k = chart.gen(g).klass;
            if (k == GenClass::form && !allow_form) return false;
            if (k == GenClass::fiber && !allow_fiber) return false;
        }
    return true;
}

// Row vector times matrix: out^b = sum_a v^a M(a, b).
std::vector<Series> row_times(const std::vector<Series>& v, const SeriesMatrix& m) {
    const std::size_t n = m.size();
    std::vector<Series> out(n, Series(m.chart()));
    for (std::size_t b = 0; b < n; ++b)
        for (std::size_t a = 0; a < n; ++a)
            if (!v[a].is_zero() && !m(a, b).is_zero()) out[b] += v[a] * m(a, b);
    return out;
}

}  // namespace

// ------------------------------------------------------------ FormalExpMap

Series FormalExpMap::component(std::size_t a, int l) const {
    return grade_project(pullbacks.at(a), Grading::resdeg, l);
}

SeriesMatrix FormalExpMap::linear_matrix() const {
    const std::size_t n = chart->base_count();
    SeriesMatrix e(chart, n);
    for (std::size_t a = 0; a < n; ++a) {
        const Series e1 = component(a, 1);
        for (std::size_t b = 0; b < n; ++b) e(b, a) = partial(chart->fiber(b), e1);
    }
    return e;
}

FormalExpMap FormalExpMap::canonical(const ChartPtr& chart) {
    FormalExpMap f{chart, {}};
    for (std::size_t a = 0; a < chart->base_count(); ++a)
        f.pullbacks.push_back(Series::generator(chart, chart->base(a)) + Series::generator(chart, chart->fiber(a)));
    return f;
}

SeriesMatrix GrothendieckConnection::leading_matrix() const {
    const ChartPtr& c = chart();
    const std::size_t n = c->base_count();
    SeriesMatrix m(c, n);
    for (std::size_t b = 0; b < n; ++b) {
        const Series y0 = grade_project(D.image(c->fiber(b)), Grading::resdeg, 0);
        for (std::size_t cc = 0; cc < n; ++cc) m(cc, b) = partial(c->form(cc), y0);
    }
    return m;
}

FexpReport validate_fexp(const FormalExpMap& f) {
    FexpReport r;
    const Chart& chart = *f.chart;
    if (f.pullbacks.size() != chart.base_count()) {
        r.violations.push_back("expected " + std::to_string(chart.base_count()) + " pullbacks, got " +
                               std::to_string(f.pullbacks.size()));
        return r;
    }
    for (std::size_t a = 0; a < chart.base_count(); ++a) {
        const Series& p = f.pullbacks[a];
        const std::string& nm = name_of(chart, chart.base(a));
        if (!only_classes(p, false, true)) r.violations.push_back("pullback of " + nm + " involves form generators");
        if (!p.zdeg_homogeneous() || (p.zdeg() && *p.zdeg() != chart.gen(chart.base(a)).zdeg))
            r.violations.push_back("pullback of " + nm + " is not homogeneous of degree " +
                                   std::to_string(chart.gen(chart.base(a)).zdeg));
        const Series p0 = f.component(a, 0);
        if (!(p0 == Series::generator(f.chart, chart.base(a))))
            r.violations.push_back("zero-section pullback of " + nm + " is " + to_string(p0) + ", expected " + nm);
    }
    if (!r.ok()) return r;
    const SeriesMatrix e = f.linear_matrix();
    try {
        unimodular_inverse(e, "linear coefficient matrix");
    } catch (const PreconditionError& ex) {
        r.violations.push_back(ex.what());
    }
    r.proper = r.ok() && e.is_identity();
    return r;
}

void require_valid(const FormalExpMap& f) {
    auto r = validate_fexp(f);
    if (!r.ok()) throw PreconditionError("invalid formal exponential map: " + r.violations.front());
}

Report validate_grothendieck(const GrothendieckConnection& g) {
    Report r;
    const ChartPtr& c = g.chart();
    if (g.D.zdeg() != 1) r.violations.push_back("connection has degree " + std::to_string(g.D.zdeg()) + ", expected 1");
    for (std::size_t a = 0; a < c->base_count(); ++a) {
        if (!(g.D.image(c->base(a)) == Series::generator(c, c->form(a))))
            r.violations.push_back("D(" + name_of(*c, c->base(a)) + ") is not " + name_of(*c, c->form(a)));
        if (!g.D.image(c->form(a)).is_zero())
            r.violations.push_back("D(" + name_of(*c, c->form(a)) + ") is not zero");
        const Series& y = g.D.image(c->fiber(a));
        if (y.is_zero() || y.min_degree(Grading::formdeg) != 1 || y.max_degree(Grading::formdeg) != 1)
            r.violations.push_back("D(" + name_of(*c, c->fiber(a)) + ") is not of form degree 1");
    }
    if (!r.ok()) return r;
    try {
        unimodular_inverse(g.leading_matrix(), "leading connection matrix");
    } catch (const PreconditionError& ex) {
        r.violations.push_back(ex.what());
    }
    return r;
}

Derivation lift_of_de_rham(const ChartPtr& chart, const std::vector<Series>& eps_images) {
    Derivation d = Derivation::de_rham(chart);
    for (std::size_t a = 0; a < chart->base_count(); ++a) d.set_image(chart->fiber(a), eps_images[a]);
    return d;
}

// ------------------------------------------------------ fexp -> connection

GrothendieckConnection grothendieck_from_fexp(const FormalExpMap& f) {
    require_valid(f);
    const ChartPtr& c = f.chart;
    const std::size_t n = c->base_count();
    const int order = f.order();
    const int form = c->trunc().form;
    const SeriesMatrix k = unimodular_inverse(f.linear_matrix(), "linear coefficient matrix");

    // de[m][b][a] = d e_m^a / d eps^b
    std::vector<std::vector<std::vector<Series>>> de(order + 1);
    for (int m = 1; m <= order; ++m) {
        de[m].assign(n, std::vector<Series>(n));
        for (std::size_t a = 0; a < n; ++a) {
            const Series em = f.component(a, m);
            for (std::size_t b = 0; b < n; ++b) de[m][b][a] = partial(c->fiber(b), em);
        }
    }
    const Derivation d = Derivation::de_rham(c);
    // y[j][b]: resolution-degree-j part of D(eps^b).
    std::vector<std::vector<Series>> y;
    for (int l = 0; l <= order - 1; ++l) {
        std::vector<Series> rho(n, Series(c));
        for (std::size_t a = 0; a < n; ++a) {
            rho[a] = l == 0 ? Series::generator(c, c->form(a)) : d.apply(f.component(a, l));
            for (int j = 0; j < l; ++j)
                for (std::size_t b = 0; b < n; ++b)
                    if (l - j + 1 <= order) rho[a] += y[j][b] * de[l - j + 1][b][a];
            rho[a] = grade_project(rho[a], Grading::resdeg, l);
        }
        std::vector<Series> dy = row_times(rho, k);
        for (auto& s : dy) s = -s;
        y.push_back(std::move(dy));
    }
    std::vector<Series> images(n, Series(c));
    for (std::size_t b = 0; b < n; ++b)
        for (const auto& yj : y) images[b] += yj[b];
    GrothendieckConnection g{lift_of_de_rham(c, images), order - 1};

    for (std::size_t a = 0; a < n; ++a) {
        const Series res = g.D.apply(f.pullbacks[a]).truncated(order - 1, form);
        if (!res.is_zero())
            throw InvariantError("grothendieck_from_fexp: D does not annihilate the pullback of " +
                                 name_of(*c, c->base(a)) + ": " + to_string(res));
    }
    return g;
}

// ------------------------------------------------------ connection -> fexp

FormalExpMap fexp_from_grothendieck(const GrothendieckConnection& g) {
    auto r = validate_grothendieck(g);
    if (!r.ok()) throw PreconditionError("invalid Grothendieck connection: " + r.violations.front());
    const ChartPtr& c = g.chart();
    const std::size_t n = c->base_count();
    const int order = std::min(c->trunc().res, g.order + 1);
    const SeriesMatrix cm = g.leading_matrix();
    const SeriesMatrix cinv = unimodular_inverse(cm, "leading connection matrix");
    const SeriesMatrix e1m = -cinv;

    std::vector<std::vector<Series>> y(g.order + 1, std::vector<Series>(n));
    for (int j = 0; j <= g.order; ++j)
        for (std::size_t b = 0; b < n; ++b) y[j][b] = grade_project(g.D.image(c->fiber(b)), Grading::resdeg, j);

    // e[m][a], m >= 1
    std::vector<std::vector<Series>> e(order + 1, std::vector<Series>(n, Series(c)));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) e[1][a] += Series::generator(c, c->fiber(b)) * e1m(b, a);

    const Derivation d = Derivation::de_rham(c);
    for (int l = 1; l + 1 <= order; ++l) {
        SeriesMatrix t(c, n);
        std::vector<Series> rem(n, Series(c));
        for (std::size_t a = 0; a < n; ++a) {
            Series rr = d.apply(e[l][a]);
            for (int j = 1; j <= l && j <= g.order; ++j)
                for (std::size_t b = 0; b < n; ++b)
                    rr += y[j][b] * partial(c->fiber(b), e[l - j + 1][a]);
            rr = grade_project(rr, Grading::resdeg, l);
            rem[a] = rr;
            for (std::size_t cc = 0; cc < n; ++cc) t(cc, a) = -partial(c->form(cc), rr);
        }
        const SeriesMatrix grad = cinv * t;
        for (std::size_t a = 0; a < n; ++a) {
            Series s(c);
            for (std::size_t b = 0; b < n; ++b) s += Series::generator(c, c->fiber(b)) * grad(b, a);
            s *= Rational(1, l + 1);
            for (std::size_t b = 0; b < n; ++b)
                if (!(partial(c->fiber(b), s) == grad(b, a)))
                    throw PreconditionError("fexp_from_grothendieck: gradient at resolution degree " +
                                            std::to_string(l + 1) + " is not integrable (" +
                                            name_of(*c, c->base(a)) + ")");
            Series check = rem[a];
            for (std::size_t b = 0; b < n; ++b) check += y[0][b] * partial(c->fiber(b), s);
            if (!check.is_zero())
                throw PreconditionError("fexp_from_grothendieck: no pullback solves the equation at resolution degree " +
                                        std::to_string(l) + " for " + name_of(*c, c->base(a)));
            e[l + 1][a] = s;
        }
    }
    FormalExpMap f{c, {}};
    for (std::size_t a = 0; a < n; ++a) {
        Series p = Series::generator(c, c->base(a));
        for (int m = 1; m <= order; ++m) p += e[m][a];
        f.pullbacks.push_back(p);
    }
    return f;
}

// ----------------------------------------------------------------- flatness

std::vector<Residual> check_flatness(const GrothendieckConnection& g, int max_resdeg) {
    if (max_resdeg < 0) max_resdeg = g.order - 1;
    const ChartPtr& c = g.chart();
    std::vector<Residual> out;
    for (std::size_t x = 0; x < c->size(); ++x) {
        const Series sq = g.D.apply(g.D.image(x)).truncated(max_resdeg, c->trunc().form);
        for (int k = 0; k <= max_resdeg; ++k) {
            Series part = grade_project(sq, Grading::resdeg, k);
            if (!part.is_zero()) out.push_back({x, k - weight(*c, x, Grading::resdeg), k, std::move(part)});
        }
    }
    return out;
}

// ------------------------------------------------------------ canonicalize

std::vector<Series> FiberMorphism::images() const {
    std::vector<Series> im = identity_images(chart);
    for (std::size_t a = 0; a < chart->base_count(); ++a) im[chart->fiber(a)] = eps_images[a];
    return im;
}

FiberMorphism canonicalize(const FormalExpMap& f) {
    require_valid(f);
    const ChartPtr& c = f.chart;
    const std::size_t n = c->base_count();
    const int order = f.order();
    const SeriesMatrix k = unimodular_inverse(f.linear_matrix(), "linear coefficient matrix");

    FiberMorphism rho{c, std::vector<Series>(n, Series(c))};
    for (std::size_t cc = 0; cc < n; ++cc)
        for (std::size_t a = 0; a < n; ++a) rho.eps_images[cc] += Series::generator(c, c->fiber(a)) * k(a, cc);

    for (int m = 2; m <= order; ++m) {
        const auto im = rho.images();
        std::vector<Series> x(n);
        for (std::size_t a = 0; a < n; ++a)
            x[a] = grade_project(ring_morphism(im, f.pullbacks[a]), Grading::resdeg, m);
        const auto corr = row_times(x, k);
        for (std::size_t b = 0; b < n; ++b) rho.eps_images[b] -= corr[b];
    }
    const auto im = rho.images();
    for (std::size_t a = 0; a < n; ++a) {
        const Series got = ring_morphism(im, f.pullbacks[a]);
        const Series want = Series::generator(c, c->base(a)) + Series::generator(c, c->fiber(a));
        if (!(got == want))
            throw InvariantError("canonicalize: rho* fexp* " + name_of(*c, c->base(a)) + " = " + to_string(got));
    }
    return rho;
}

// ---------------------------------------------------------------- transfer

std::vector<Series> tangent_lift(const ChartPtr& chart, const std::vector<Series>& base_images) {
    const std::size_t n = chart->base_count();
    std::vector<Series> im(chart->size(), Series(chart));
    for (std::size_t a = 0; a < n; ++a) {
        im[chart->base(a)] = base_images[a];
        for (std::size_t b = 0; b < n; ++b) {
            const Series j = partial(chart->base(b), base_images[a]);
            if (j.is_zero()) continue;
            im[chart->form(a)] += Series::generator(chart, chart->form(b)) * j;
            im[chart->fiber(a)] += Series::generator(chart, chart->fiber(b)) * j;
        }
    }
    return im;
}

void check_diffeo(const ChartPtr& chart, const Diffeo& phi) {
    const std::size_t n = chart->base_count();
    if (phi.forward.size() != n || phi.inverse.size() != n)
        throw InputError("diffeomorphism: expected " + std::to_string(n) + " forward and inverse images");
    for (const auto* side : {&phi.forward, &phi.inverse})
        for (std::size_t a = 0; a < n; ++a)
            if (!(*side)[a].depends_only_on_base())
                throw InputError("diffeomorphism: image of " + name_of(*chart, chart->base(a)) +
                                 " involves non-base generators");
    auto fwd = identity_images(chart), inv = identity_images(chart);
    for (std::size_t a = 0; a < n; ++a) {
        fwd[chart->base(a)] = phi.forward[a];
        inv[chart->base(a)] = phi.inverse[a];
    }
    for (std::size_t a = 0; a < n; ++a) {
        const Series z = Series::generator(chart, chart->base(a));
        if (!(ring_morphism(fwd, phi.inverse[a]) == z) || !(ring_morphism(inv, phi.forward[a]) == z))
            throw PreconditionError("diffeomorphism: supplied inverse does not compose to the identity at " +
                                    name_of(*chart, chart->base(a)));
    }
}

FormalExpMap transfer_fexp(const FormalExpMap& f, const Diffeo& phi) {
    const ChartPtr& c = f.chart;
    check_diffeo(c, phi);
    const auto lift = tangent_lift(c, phi.forward);
    auto fimages = identity_images(c);
    for (std::size_t a = 0; a < c->base_count(); ++a) fimages[c->base(a)] = f.pullbacks[a];
    FormalExpMap out{c, {}};
    for (std::size_t a = 0; a < c->base_count(); ++a)
        out.pullbacks.push_back(ring_morphism(lift, ring_morphism(fimages, phi.inverse[a])));
    return out;
}

GrothendieckConnection transfer_connection(const GrothendieckConnection& g, const Diffeo& phi) {
    const ChartPtr& c = g.chart();
    check_diffeo(c, phi);
    const auto lift = tangent_lift(c, phi.forward);
    const auto lift_inv = tangent_lift(c, phi.inverse);
    std::vector<Series> images(c->size());
    for (std::size_t x = 0; x < c->size(); ++x)
        images[x] = ring_morphism(lift, g.D.apply(lift_inv[x])).truncated(g.order, c->trunc().form);
    return {Derivation(c, g.D.zdeg(), std::move(images)), g.order};
}

Transferred transfer_diffeo(const FormalExpMap& f, const GrothendieckConnection& g, const Diffeo& phi) {
    require_same_chart(f.chart, g.chart(), "transfer_diffeo");
    return {transfer_fexp(f, phi), transfer_connection(g, phi)};
}

FormalExpMap fexp_from_polynomial_exp(const ChartPtr& chart, const ChartPtr& exp_chart,
                                      const std::vector<Series>& exp_images) {
    const std::size_t n = chart->base_count();
    if (exp_chart->base_count() != 2 * n || exp_images.size() != n)
        throw InputError("exponential map: expected " + std::to_string(2 * n) + " exp-chart coordinates and " +
                         std::to_string(n) + " images");
    std::vector<Series> sub(exp_chart->size(), Series(chart));
    for (std::size_t a = 0; a < n; ++a) {
        if (exp_chart->gen(a).zdeg != chart->gen(a).zdeg || exp_chart->gen(n + a).zdeg != chart->gen(a).zdeg)
            throw InputError("exponential map: degree mismatch at " + name_of(*chart, a));
        sub[a] = Series::generator(chart, chart->base(a));
        sub[n + a] = Series::generator(chart, chart->fiber(a));
    }
    FormalExpMap f{chart, {}};
    for (std::size_t a = 0; a < n; ++a) {
        if (!exp_images[a].depends_only_on_base())
            throw InputError("exponential map: image of " + name_of(*chart, a) + " must be a polynomial in z and v");
        f.pullbacks.push_back(ring_morphism(sub, exp_images[a]));
    }
    require_valid(f);
    return f;
}

}  // namespace fexp
