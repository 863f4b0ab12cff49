#include "fexp/derivation.hpp"

#include <sstream>

#include "fexp/kernels.hpp"

namespace fexp {

int weight(const Chart& chart, std::size_t g, Grading which) {
    const Generator& gen = chart.gen(g);
    switch (which) {
    case Grading::resdeg: return gen.resdeg();
    case Grading::formdeg: return gen.formdeg();
    case Grading::deg_ht: return gen.resdeg() + gen.formdeg();
    }
    return 0;
}

Derivation::Derivation(ChartPtr chart, int zdeg) : chart_(std::move(chart)), zdeg_(zdeg) {
    images_.assign(chart_->size(), Series(chart_));
}

Derivation::Derivation(ChartPtr chart, int zdeg, std::vector<Series> images)
    : chart_(std::move(chart)), zdeg_(zdeg), images_(std::move(images)) {
    if (images_.size() != chart_->size())
        throw InputError("derivation: expected " + std::to_string(chart_->size()) + " images");
    for (std::size_t g = 0; g < images_.size(); ++g) {
        if (!images_[g].chart()) images_[g] = Series(chart_);
        check_image(g, images_[g]);
    }
}

void Derivation::check_image(std::size_t g, const Series& s) const {
    require_same_chart(chart_, s.chart(), "derivation image");
    if (!s.zdeg_homogeneous())
        throw PreconditionError("derivation: image of '" + chart_->gen(g).name + "' is not degree-homogeneous");
    auto d = s.zdeg();
    if (d && *d != chart_->gen(g).zdeg + zdeg_)
        throw PreconditionError("derivation: image of '" + chart_->gen(g).name + "' has degree " +
                                std::to_string(*d) + ", expected " +
                                std::to_string(chart_->gen(g).zdeg + zdeg_));
}

void Derivation::set_image(std::size_t g, Series s) {
    if (!s.chart()) s = Series(chart_);
    check_image(g, s);
    images_[g] = std::move(s);
}

Derivation Derivation::de_rham(const ChartPtr& chart) {
    Derivation d(chart, 1);
    for (std::size_t a = 0; a < chart->base_count(); ++a)
        d.images_[chart->base(a)] = Series::generator(chart, chart->form(a));
    return d;
}

Derivation Derivation::delta(const ChartPtr& chart) {
    Derivation d(chart, 1);
    for (std::size_t a = 0; a < chart->base_count(); ++a)
        d.images_[chart->fiber(a)] = -Series::generator(chart, chart->form(a));
    return d;
}

Derivation Derivation::counting(const ChartPtr& chart) {
    Derivation d(chart, 0);
    for (std::size_t a = 0; a < chart->base_count(); ++a) {
        d.images_[chart->form(a)] = Series::generator(chart, chart->form(a));
        d.images_[chart->fiber(a)] = Series::generator(chart, chart->fiber(a));
    }
    return d;
}

bool Derivation::is_zero() const {
    for (const auto& s : images_)
        if (!s.is_zero()) return false;
    return true;
}

bool Derivation::is_zero_through(int resdeg) const {
    for (const auto& s : images_)
        for (const auto& [m, c] : s.terms())
            if (m.resdeg() <= resdeg) return false;
    return true;
}

Series Derivation::apply(const Series& f) const {
    require_same_chart(chart_, f.chart(), "derivation apply");
    return kernels::apply_dispatch(*this, f);
}

Derivation& Derivation::operator+=(const Derivation& o) {
    require_same_chart(chart_, o.chart_, "derivation sum");
    if (zdeg_ != o.zdeg_ && !o.is_zero()) {
        if (!is_zero()) throw InputError("derivation sum: degree mismatch");
        zdeg_ = o.zdeg_;
    }
    for (std::size_t g = 0; g < images_.size(); ++g) images_[g] += o.images_[g];
    return *this;
}

Derivation& Derivation::operator-=(const Derivation& o) {
    return *this += -o;
}

Derivation& Derivation::operator*=(const Rational& c) {
    for (auto& s : images_) s *= c;
    return *this;
}

Derivation Derivation::operator-() const {
    Derivation out = *this;
    for (auto& s : out.images_) s = -s;
    return out;
}

bool operator==(const Derivation& a, const Derivation& b) {
    if (a.images_.size() != b.images_.size()) return false;
    for (std::size_t g = 0; g < a.images_.size(); ++g)
        if (!(a.images_[g] == b.images_[g])) return false;
    return a.is_zero() || a.zdeg_ == b.zdeg_;
}

std::optional<int> Derivation::weight_shift(Grading which) const {
    std::optional<int> shift;
    for (std::size_t g = 0; g < images_.size(); ++g) {
        const int wg = weight(*chart_, g, which);
        for (const auto& [m, c] : images_[g].terms()) {
            const int s = weight(m, which) - wg;
            if (!shift) shift = s;
            else if (*shift != s) return std::nullopt;
        }
    }
    return shift;
}

Derivation commutator(const Derivation& v, const Derivation& w) {
    require_same_chart(v.chart(), w.chart(), "commutator");
    const int sign = (v.odd() && w.odd()) ? -1 : 1;
    std::vector<Series> images(v.chart()->size());
    for (std::size_t g = 0; g < images.size(); ++g) {
        Series s = v.apply(w.image(g));
        Series t = w.apply(v.image(g));
        images[g] = sign < 0 ? s + t : s - t;
    }
    return Derivation(v.chart(), v.zdeg() + w.zdeg(), std::move(images));
}

Derivation square(const Derivation& v) {
    Derivation c = commutator(v, v);
    c *= Rational(1, 2);
    return c;
}

std::map<int, Derivation> decompose(const Derivation& v, Grading which) {
    std::map<int, Derivation> pieces;
    const Chart& chart = *v.chart();
    for (std::size_t g = 0; g < chart.size(); ++g) {
        const int wg = weight(chart, g, which);
        for (const auto& [m, c] : v.image(g).terms()) {
            const int k = weight(m, which) - wg;
            auto it = pieces.find(k);
            if (it == pieces.end()) it = pieces.emplace(k, Derivation(v.chart(), v.zdeg())).first;
            Series s = it->second.image(g);
            s.add_term(m, c);
            it->second.set_image(g, std::move(s));
        }
    }
    return pieces;
}

Derivation recompose(const std::map<int, Derivation>& pieces) {
    if (pieces.empty()) throw InputError("recompose: no pieces");
    Derivation out(pieces.begin()->second.chart(), pieces.begin()->second.zdeg());
    for (const auto& [k, p] : pieces) out += p;
    return out;
}

Derivation piece(const Derivation& v, int k, Grading which) {
    auto pieces = decompose(v, which);
    auto it = pieces.find(k);
    return it == pieces.end() ? Derivation(v.chart(), v.zdeg()) : it->second;
}

std::string to_string(const Derivation& v) {
    std::ostringstream os;
    os << "deg " << v.zdeg() << "\n";
    for (std::size_t g = 0; g < v.images().size(); ++g)
        os << v.chart()->gen(g).name << " -> " << to_string(v.image(g)) << "\n";
    return os.str();
}

}  // namespace fexp
