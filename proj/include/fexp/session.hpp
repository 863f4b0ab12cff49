#pragma once

#include <optional>
#include <string>

#include "fexp/connection.hpp"
#include "fexp/qp.hpp"

namespace fexp {

struct QPBlock {
    int P = 0;
    RationalMatrix omega;
    std::vector<Series> Q;  // one image per base generator
};

// In-memory session. Every block is optional except the chart.
struct Session {
    ChartPtr chart;
    std::optional<FormalExpMap> fexp;
    std::optional<GrothendieckConnection> grothendieck;
    std::optional<Connection> christoffel;
    std::optional<QPBlock> qp;
    std::optional<Diffeo> diffeo;
    std::optional<BasePoint> point;
    std::optional<Series> function;
    std::optional<Series> form;
    std::optional<FiberMorphism> fiber_morphism;
    std::optional<Series> result;
};

struct TruncationOverride {
    std::optional<int> order;
    std::optional<int> form_order;
};

// Parse errors carry line and column; semantic errors name the block.
// Both raise InputError.
Session parse_session(const std::string& text, const TruncationOverride& over = {});
// Canonical text: fixed block order, terms in monomial order, two-space
// indentation, trailing newline.
std::string serialize_session(const Session& s);

// Session on the same chart holding only the chart block.
Session chart_only(const Session& s);

QPStructure qp_structure(const ChartPtr& chart, const QPBlock& b);

}  // namespace fexp
