#include "fexp/chart.hpp"

#include <set>

namespace fexp {

const char* to_string(GenClass klass) {
    switch (klass) {
    case GenClass::base: return "base";
    case GenClass::form: return "form";
    case GenClass::fiber: return "fiber";
    }
    return "?";
}

namespace {

bool valid_name(const std::string& s) {
    if (s.empty()) return false;
    auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    if (!alpha(s[0])) return false;
    for (char c : s)
        if (!alpha(c) && !(c >= '0' && c <= '9')) return false;
    return true;
}

}  // namespace

std::shared_ptr<const Chart> Chart::make(std::vector<BaseSpec> base, Truncation trunc) {
    if (trunc.res < 0 || trunc.form < 0) throw InputError("chart: negative truncation order");
    auto chart = std::make_shared<Chart>();
    chart->n_ = base.size();
    chart->trunc_ = trunc;
    chart->gens_.resize(3 * base.size());
    std::set<std::string> seen;
    for (std::size_t a = 0; a < base.size(); ++a) {
        const auto& b = base[a];
        const std::string* names[3] = {&b.name, &b.form_name, &b.fiber_name};
        for (const std::string* nm : names) {
            if (!valid_name(*nm)) throw InputError("chart: invalid generator name '" + *nm + "'");
            if (!seen.insert(*nm).second) throw InputError("chart: duplicate generator name '" + *nm + "'");
        }
        chart->gens_[a] = {b.name, b.zdeg, GenClass::base, a};
        chart->gens_[base.size() + a] = {b.form_name, b.zdeg + 1, GenClass::form, a};
        chart->gens_[2 * base.size() + a] = {b.fiber_name, b.zdeg, GenClass::fiber, a};
    }
    return chart;
}

std::shared_ptr<const Chart> Chart::make_simple(const std::vector<std::pair<std::string, int>>& base,
                                                Truncation trunc) {
    std::vector<BaseSpec> specs;
    for (const auto& [name, deg] : base) specs.push_back({name, deg, "d" + name, "e_" + name});
    return make(std::move(specs), trunc);
}

std::optional<std::size_t> Chart::find(const std::string& name) const {
    for (std::size_t i = 0; i < gens_.size(); ++i)
        if (gens_[i].name == name) return i;
    return std::nullopt;
}

std::size_t Chart::require(const std::string& name) const {
    auto i = find(name);
    if (!i) throw InputError("unknown generator '" + name + "'");
    return *i;
}

std::shared_ptr<const Chart> Chart::with_trunc(Truncation trunc) const {
    auto chart = std::make_shared<Chart>(*this);
    chart->trunc_ = trunc;
    return chart;
}

std::size_t Chart::body_dim() const {
    std::size_t d = 0;
    // Body coordinates are the degree-0 base generators; degree-0 graded
    // coordinates are indistinguishable locally and counted here too.
    for (std::size_t a = 0; a < n_; ++a) d += gens_[a].zdeg == 0;
    return d;
}

std::size_t Chart::even_dim() const {
    std::size_t m = 0;
    for (std::size_t a = 0; a < n_; ++a) m += gens_[a].zdeg != 0 && !gens_[a].odd();
    return m;
}

std::size_t Chart::odd_dim() const {
    std::size_t k = 0;
    for (std::size_t a = 0; a < n_; ++a) k += gens_[a].odd();
    return k;
}

bool Chart::same_layout(const Chart& other) const {
    if (n_ != other.n_) return false;
    for (std::size_t i = 0; i < gens_.size(); ++i)
        if (gens_[i].name != other.gens_[i].name || gens_[i].zdeg != other.gens_[i].zdeg) return false;
    return true;
}

void require_same_chart(const ChartPtr& a, const ChartPtr& b, const char* where) {
    if (a == b) return;
    if (!a || !b || !a->same_layout(*b)) throw InputError(std::string(where) + ": chart mismatch");
}

}  // namespace fexp
