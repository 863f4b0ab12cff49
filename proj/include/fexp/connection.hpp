#pragma once

#include <string>
#include <vector>

#include "fexp/fexp.hpp"
#include "fexp/resolution.hpp"

namespace fexp {

// Christoffel coefficients A^c_{ab} as polynomials in the base coordinates.
class Connection {
public:
    Connection() = default;
    explicit Connection(ChartPtr chart);

    const ChartPtr& chart() const { return chart_; }
    // A^c_{ab}
    const Series& coeff(std::size_t c, std::size_t a, std::size_t b) const;
    void set(std::size_t c, std::size_t a, std::size_t b, Series value);
    // Sets A^c_{ab} and its graded-symmetric partner A^c_{ba}.
    void set_symmetric(std::size_t c, std::size_t a, std::size_t b, Series value);
    bool is_zero() const;
    friend bool operator==(const Connection& x, const Connection& y);

private:
    ChartPtr chart_;
    std::vector<Series> coeffs_;
};

Report validate_connection(const Connection& conn);

// D_0: z -> dz, dz -> 0, eps^a -> -dz^b eps^c A^a_{cb}.
Derivation nabla_superconnection(const Connection& conn);

struct HptReport {
    std::vector<std::string> lines;
    // k = 0 comparison with -1/2 [zeta, D_0^2]
    bool literal_step_matches = false;
    Derivation literal_step;
    Derivation step_one;
};

// delta + D_0 completed to a flat connection by homological perturbation.
// Each correction D_{k+1} solves [delta, D_{k+1}] = -S_k while keeping
// D(z) = dz and D(dz) = 0; the identities are asserted at every step.
GrothendieckConnection hpt_complete(const Connection& conn, HptReport* report = nullptr);

// The -(1/w)[zeta, S_k] correction with w the deg_HT weight of S_k.
Derivation literal_hpt_step(const HomotopyData& h, const Derivation& s_k);

// Reads A from the weight-0 piece of grothendieck_from_fexp(F); F proper.
Connection connection_from_fexp(const FormalExpMap& f);
Connection connection_from_grothendieck(const GrothendieckConnection& g);

// Taylor coefficients of exp_x(v) for the geodesic spray of conn (even,
// degree-0 chart only). Fiber generators play the role of v; entry k of the
// result holds, per base coordinate, the part homogeneous of degree k in v.
// The point is kept symbolic (base generators) when `point` is empty.
std::vector<std::vector<Series>> geodesic_taylor_oracle(const Connection& conn, int order,
                                                        const std::vector<Rational>& point = {});

// Substitutes rational values for the base generators.
Series evaluate_at(const Series& f, const std::vector<Rational>& point);

}  // namespace fexp
