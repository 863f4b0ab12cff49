#pragma once

#include "fexp/derivation.hpp"
#include "fexp/fexp.hpp"

namespace fexp {

struct HomotopyData {
    Derivation zeta;     // dz^a -> eps^b Z(b, a), zero elsewhere
    Derivation delta;    // resolution-weight -1 piece of the connection
    Derivation eps_ht;   // dz d/d dz + eps d/d eps
};

// zeta is solved from the contraction identity [zeta, delta] = eps_HT,
// which is asserted on every generator.
HomotopyData build_zeta(const GrothendieckConnection& g);
HomotopyData build_zeta(const FormalExpMap& f);

// Sum over deg_HT components f_w, w > 0, of zeta(f_w) / w.
Series homotopy_H(const HomotopyData& h, const Series& f);

// The unique D-closed f with f = g on the zero section; g a function of z.
// Throws PreconditionError if the recursion leaves a residual (G not flat).
Series cohomology_lift(const GrothendieckConnection& g, const HomotopyData& h, const Series& base_function);

// p with D p = f through resolution degree g.order - 1 (the last degree
// determined by the connection). f must be D-closed with no form-degree-0
// terms.
Series find_primitive(const GrothendieckConnection& g, const HomotopyData& h, const Series& f);

}  // namespace fexp
