#pragma once

#include <optional>
#include <vector>

#include "fexp/fexp.hpp"

namespace fexp {

using RationalMatrix = std::vector<std::vector<Rational>>;

// Graded symplectic data on the base generators together with a homological
// vector field Q (images on base generators only, polynomial in them).
struct QPStructure {
    ChartPtr chart;
    int P = 0;
    RationalMatrix omega;  // omega[a][b], Darboux (constant)
    Derivation Q;
};

// 1/2 dz^a omega_ab dz^b.
Series symplectic_form(const ChartPtr& chart, const RationalMatrix& omega);

// Q^a d_a + dz^b (d_b Q^a) d/d dz^a on the base and form generators.
Derivation tangent_lift(const Derivation& q);

// Degree/symmetry/nondegeneracy of omega, [Q,Q] = 0 and L_Q omega = 0.
Report validate_qp(const QPStructure& s);

// Values of the base coordinates; nullopt leaves a degree-0 coordinate
// symbolic.
using BasePoint = std::vector<std::optional<Rational>>;

struct BracketEntry {
    int arity = 0;
    std::size_t output = 0;
    std::vector<std::size_t> inputs;  // nondecreasing base indices
    Series coeff;                     // polynomial in the symbolic coordinates
};

// L-infinity algebra on the fiber at a body point. Lives on its own chart:
// base generators are the symbolic coordinates followed by one w^a per
// fiber generator (same name, same degree); form generators dw^a carry the
// pairing.
struct LInftyPackage {
    ChartPtr source;
    ChartPtr chart;
    std::vector<std::size_t> params;  // source base indices left symbolic
    BasePoint point;
    int order = 0;
    RationalMatrix omega;
    std::vector<Series> q;  // Q_x(w^a)
    std::vector<BracketEntry> brackets;
    bool curved = false;
    Report report;

    std::size_t w(std::size_t a) const { return params.size() + a; }
    int w_degree(const Monomial& m) const;
    Series up_to_w(const Series& f, int k) const;
    Series w_part(const Series& f, int k) const;
    Derivation vector_field() const;
    Series pairing() const;
};

// Pushes Q to the fiber at x through the (canonicalized) exponential map and
// reads off the brackets as iterated left derivatives at w = 0. With
// require_valid, a failing validate_qp raises PreconditionError.
LInftyPackage linearize_at_point(const QPStructure& s, const FormalExpMap& f, const BasePoint& x,
                                 bool require_valid = true);

struct CyclicReport : Report {
    // (arity, ok) for arities 1..order.
    std::vector<std::pair<int, bool>> arities;
};

// L_{Q_x} omega_x = 0 through w-degree order-1, arity by arity: the
// w-degree n-1 part only involves l_n.
CyclicReport check_cyclic(const LInftyPackage& pkg);

}  // namespace fexp
