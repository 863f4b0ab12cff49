#pragma once

#include <string>
#include <vector>

#include "fexp/derivation.hpp"
#include "fexp/matrix.hpp"
#include "fexp/series.hpp"

namespace fexp {

// Pullbacks fexp* z^a on the big chart, truncated at the chart's resolution
// order.
struct FormalExpMap {
    ChartPtr chart;
    std::vector<Series> pullbacks;  // one per base generator

    int order() const { return chart->trunc().res; }
    // Resolution-degree-l part e_l^a.
    Series component(std::size_t a, int l) const;
    // E(b, a) = d e_1^a / d eps^b.
    SeriesMatrix linear_matrix() const;

    static FormalExpMap canonical(const ChartPtr& chart);
};

// D = d + D(eps^b) d/d eps^b, with images trusted up to resolution degree
// `order`.
struct GrothendieckConnection {
    Derivation D;
    int order = 0;

    const ChartPtr& chart() const { return D.chart(); }
    // C(c, b) = d D_{-1}(eps^b) / d dz^c.
    SeriesMatrix leading_matrix() const;
};

struct Report {
    std::vector<std::string> violations;
    std::vector<std::string> notes;
    bool ok() const { return violations.empty(); }
};

struct FexpReport : Report {
    bool proper = false;
};

FexpReport validate_fexp(const FormalExpMap& f);
// Throws PreconditionError naming the first violation.
void require_valid(const FormalExpMap& f);
Report validate_grothendieck(const GrothendieckConnection& g);

GrothendieckConnection grothendieck_from_fexp(const FormalExpMap& f);
FormalExpMap fexp_from_grothendieck(const GrothendieckConnection& g);

// D d/d eps^a with D given by its eps images (formdeg 1 each).
Derivation lift_of_de_rham(const ChartPtr& chart, const std::vector<Series>& eps_images);

struct Residual {
    std::size_t generator = 0;
    int weight = 0;  // resolution-degree shift from generator to residual
    int resdeg = 0;
    Series value;
};

// Nonzero components of D(D(g)) for every generator g, split by
// resolution degree, up to residual resolution degree max_resdeg (default:
// the connection order minus one, the last fully determined degree).
std::vector<Residual> check_flatness(const GrothendieckConnection& g, int max_resdeg = -1);

// Fiber morphism fixing z and dz.
struct FiberMorphism {
    ChartPtr chart;
    std::vector<Series> eps_images;  // rho*(eps^a)
    std::vector<Series> images() const;
};

FiberMorphism canonicalize(const FormalExpMap& f);

// Polynomial diffeomorphism phi: phi* z^a = forward[a](z), with a supplied
// inverse (phi^{-1})* z^a = inverse[a](z).
struct Diffeo {
    std::vector<Series> forward;
    std::vector<Series> inverse;
};

// Ring morphism of the big chart induced by a base map Phi:
// z -> Phi(z), dz^a -> dz^b d_b Phi^a, eps^a -> eps^b d_b Phi^a.
std::vector<Series> tangent_lift(const ChartPtr& chart, const std::vector<Series>& base_images);

void check_diffeo(const ChartPtr& chart, const Diffeo& phi);

struct Transferred {
    FormalExpMap fexp;
    GrothendieckConnection connection;
};

Transferred transfer_diffeo(const FormalExpMap& f, const GrothendieckConnection& g, const Diffeo& phi);
FormalExpMap transfer_fexp(const FormalExpMap& f, const Diffeo& phi);
GrothendieckConnection transfer_connection(const GrothendieckConnection& g, const Diffeo& phi);

// Exponential-map analogue on a chart whose base generators are the
// original z's followed by one v per z (same degrees). v^a -> eps^a.
FormalExpMap fexp_from_polynomial_exp(const ChartPtr& chart, const ChartPtr& exp_chart,
                                      const std::vector<Series>& exp_images);

}  // namespace fexp
