#include "fexp/connection.hpp"

namespace fexp {

namespace {

std::size_t idx(std::size_t n, std::size_t c, std::size_t a, std::size_t b) { return (c * n + a) * n + b; }

int ab_sign(const Chart& chart, std::size_t a, std::size_t b) {
    return (chart.gen(a).zdeg * chart.gen(b).zdeg) % 2 ? -1 : 1;
}

}  // namespace

Connection::Connection(ChartPtr chart) : chart_(std::move(chart)) {
    const std::size_t n = chart_->base_count();
    coeffs_.assign(n * n * n, Series(chart_));
}

const Series& Connection::coeff(std::size_t c, std::size_t a, std::size_t b) const {
    return coeffs_[idx(chart_->base_count(), c, a, b)];
}

void Connection::set(std::size_t c, std::size_t a, std::size_t b, Series value) {
    require_same_chart(chart_, value.chart(), "connection coefficient");
    coeffs_[idx(chart_->base_count(), c, a, b)] = std::move(value);
}

void Connection::set_symmetric(std::size_t c, std::size_t a, std::size_t b, Series value) {
    Series partner = value;
    if (ab_sign(*chart_, a, b) < 0) partner = -partner;
    set(c, a, b, std::move(value));
    set(c, b, a, std::move(partner));
}

bool Connection::is_zero() const {
    for (const auto& s : coeffs_)
        if (!s.is_zero()) return false;
    return true;
}

bool operator==(const Connection& x, const Connection& y) {
    if (x.coeffs_.size() != y.coeffs_.size()) return false;
    for (std::size_t i = 0; i < x.coeffs_.size(); ++i)
        if (!(x.coeffs_[i] == y.coeffs_[i])) return false;
    return true;
}

Report validate_connection(const Connection& conn) {
    Report r;
    const Chart& ch = *conn.chart();
    const std::size_t n = ch.base_count();
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                const Series& v = conn.coeff(c, a, b);
                const std::string label = "A^" + ch.gen(c).name + "_{" + ch.gen(a).name + "," + ch.gen(b).name + "}";
                if (!v.depends_only_on_base()) r.violations.push_back(label + " is not a function of the base");
                const int want = ch.gen(c).zdeg - ch.gen(a).zdeg - ch.gen(b).zdeg;
                if (!v.zdeg_homogeneous() || (v.zdeg() && *v.zdeg() != want))
                    r.violations.push_back(label + " is not homogeneous of degree " + std::to_string(want));
                Series partner = conn.coeff(c, b, a);
                if (ab_sign(ch, a, b) < 0) partner = -partner;
                if (a < b && !(v == partner)) r.violations.push_back(label + " violates graded symmetry (torsion)");
            }
    return r;
}

Derivation nabla_superconnection(const Connection& conn) {
    auto r = validate_connection(conn);
    if (!r.ok()) throw PreconditionError("invalid connection: " + r.violations.front());
    const ChartPtr& ch = conn.chart();
    const std::size_t n = ch->base_count();
    std::vector<Series> eps(n, Series(ch));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c) {
                const Series& A = conn.coeff(a, c, b);
                if (A.is_zero()) continue;
                eps[a] -= Series::generator(ch, ch->form(b)) * Series::generator(ch, ch->fiber(c)) * A;
            }
    return lift_of_de_rham(ch, eps);
}

Derivation literal_hpt_step(const HomotopyData& h, const Derivation& s_k) {
    auto w = s_k.weight_shift(Grading::deg_ht);
    if (!w) {
        if (s_k.is_zero()) return Derivation(s_k.chart(), s_k.zdeg() - 1);
        throw InvariantError("hpt: S_k is not deg_HT-homogeneous");
    }
    Derivation out = commutator(h.zeta, s_k);
    out *= Rational(-1, *w);
    return out;
}

GrothendieckConnection hpt_complete(const Connection& conn, HptReport* report) {
    const ChartPtr& ch = conn.chart();
    const std::size_t n = ch->base_count();
    const int order = ch->trunc().res;
    const Derivation d0 = nabla_superconnection(conn);
    const GrothendieckConnection canonical{Derivation::de_rham(ch) + Derivation::delta(ch), order};
    const HomotopyData h = build_zeta(canonical);

    auto note = [&](std::string line) {
        if (report) report->lines.push_back(std::move(line));
    };

    // Bianchi: [delta, D_0] = 0 (torsion-free).
    if (!commutator(h.delta, d0).is_zero()) throw PreconditionError("hpt: [delta, D_0] != 0 (connection has torsion)");
    note("[delta, D_0] = 0");

    Derivation d = h.delta + d0;
    for (int k = 0; k <= order - 2; ++k) {
        const Derivation s = piece(square(d), k);
        const Derivation bianchi = commutator(h.delta, s);
        if (!bianchi.is_zero_through(order - 1))
            throw InvariantError("hpt: [delta, S_" + std::to_string(k) + "] != 0");
        auto w = s.weight_shift(Grading::deg_ht);
        if (w && *w != k + 2)
            throw InvariantError("hpt: S_" + std::to_string(k) + " has deg_HT weight " + std::to_string(*w));

        Derivation next(ch, 1);
        for (std::size_t a = 0; a < n; ++a) next.set_image(ch->fiber(a), -homotopy_H(h, s.image(ch->fiber(a))));
        const Derivation check = commutator(h.delta, next) + s;
        if (!check.is_zero_through(order - 1))
            throw InvariantError("hpt: [delta, D_" + std::to_string(k + 1) + "] + S_" + std::to_string(k) + " != 0");
        note("k=" + std::to_string(k) + ": [delta, S_k] = 0, [delta, D_{k+1}] = -S_k, S_k " +
             (s.is_zero() ? "zero" : "nonzero"));
        if (k == 0 && report) {
            report->literal_step = literal_hpt_step(h, s);
            report->step_one = next;
            report->literal_step_matches = report->literal_step == next;
            const Derivation lit_check = commutator(h.delta, report->literal_step) + s;
            note(std::string("k=0: -1/2 [zeta, D_0^2] ") + (report->literal_step_matches ? "equals" : "differs from") +
                 " D_1; it " + (lit_check.is_zero_through(order - 1) ? "solves" : "does not solve") +
                 " [delta, X] = -S_0 and has X(dz) " +
                 (report->literal_step.image(ch->form(0)).is_zero() ? "= 0" : "!= 0"));
        }
        d += next;
    }
    GrothendieckConnection g{d, order};
    auto flat = check_flatness(g);
    if (!flat.empty())
        throw InvariantError("hpt: completed connection is not flat at " + ch->gen(flat.front().generator).name);
    note("flat through resolution degree " + std::to_string(order - 1));
    return g;
}

Connection connection_from_grothendieck(const GrothendieckConnection& g) {
    const ChartPtr& ch = g.chart();
    const std::size_t n = ch->base_count();
    const Derivation d0 = piece(g.D, 0);
    Connection conn(ch);
    for (std::size_t a = 0; a < n; ++a) {
        const Series& img = d0.image(ch->fiber(a));
        for (std::size_t b = 0; b < n; ++b) {
            const Series db = partial(ch->form(b), img);
            for (std::size_t c = 0; c < n; ++c) conn.set(a, c, b, -partial(ch->fiber(c), db));
        }
    }
    if (!(nabla_superconnection(conn) == d0))
        throw InvariantError("connection_from_grothendieck: D_0 is not of connection form");
    return conn;
}

Connection connection_from_fexp(const FormalExpMap& f) {
    auto r = validate_fexp(f);
    if (!r.ok()) throw PreconditionError("invalid formal exponential map: " + r.violations.front());
    if (!r.proper) throw PreconditionError("connection_from_fexp: formal exponential map is not proper");
    return connection_from_grothendieck(grothendieck_from_fexp(f));
}

Series evaluate_at(const Series& f, const std::vector<Rational>& point) {
    const ChartPtr& ch = f.chart();
    auto im = identity_images(ch);
    for (std::size_t a = 0; a < ch->base_count(); ++a) im[ch->base(a)] = Series::constant(ch, point.at(a));
    return ring_morphism(im, f);
}

std::vector<std::vector<Series>> geodesic_taylor_oracle(const Connection& conn, int order,
                                                        const std::vector<Rational>& point) {
    const ChartPtr& ch = conn.chart();
    const std::size_t n = ch->base_count();
    for (std::size_t a = 0; a < n; ++a)
        if (ch->gen(a).zdeg != 0) throw PreconditionError("geodesic oracle: chart must be even of degree 0");
    if (!point.empty() && point.size() != n) throw InputError("geodesic oracle: point has wrong dimension");
    if (order > ch->trunc().res) throw InputError("geodesic oracle: order exceeds chart truncation");

    // z(t) = sum_k z_k t^k with z_k homogeneous of degree k in v; setting
    // t = 1, the t-degree of a product equals its v-degree minus the number
    // of velocity factors. z_{k+2} = -[A(z) zdot zdot]_k / ((k+2)(k+1)).
    std::vector<std::vector<Series>> zk(order + 1, std::vector<Series>(n, Series(ch)));
    for (std::size_t a = 0; a < n; ++a) {
        zk[0][a] = Series::generator(ch, ch->base(a));
        if (order >= 1) zk[1][a] = Series::generator(ch, ch->fiber(a));
    }
    for (int m = 0; m + 2 <= order; ++m) {
        std::vector<Series> z(n, Series(ch)), zdot(n, Series(ch));
        for (int k = 0; k <= m + 1; ++k)
            for (std::size_t a = 0; a < n; ++a) {
                z[a] += zk[k][a];
                if (k >= 1) zdot[a] += Rational(k) * zk[k][a];
            }
        auto sub = identity_images(ch);
        for (std::size_t a = 0; a < n; ++a) sub[ch->base(a)] = z[a];
        for (std::size_t a = 0; a < n; ++a) {
            Series acc(ch);
            for (std::size_t b = 0; b < n; ++b)
                for (std::size_t c = 0; c < n; ++c) {
                    const Series& A = conn.coeff(a, b, c);
                    if (A.is_zero()) continue;
                    acc += ring_morphism(sub, A) * zdot[b] * zdot[c];
                }
            Series next = grade_project(acc, Grading::resdeg, m + 2);
            next *= Rational(-1, (m + 2) * (m + 1));
            zk[m + 2][a] = next;
        }
    }
    if (!point.empty())
        for (auto& row : zk)
            for (auto& s : row) s = evaluate_at(s, point);
    return zk;
}

}  // namespace fexp
