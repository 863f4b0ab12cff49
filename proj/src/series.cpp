#include "fexp/series.hpp"

#include <algorithm>
#include <cctype>
#include <climits>
#include <sstream>

#include "fexp/kernels.hpp"

namespace fexp {

Rational make_rational(long num, long den) {
    if (den == 0) throw InputError("rational with zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

std::string to_string(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational parse_rational(const std::string& text) {
    auto slash = text.find('/');
    auto int_ok = [](const std::string& s, bool allow_sign) {
        std::size_t i = 0;
        if (allow_sign && !s.empty() && (s[0] == '-' || s[0] == '+')) i = 1;
        if (i >= s.size()) return false;
        for (; i < s.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
        return true;
    };
    std::string num = text.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : text.substr(slash + 1);
    if (!int_ok(num, true) || !int_ok(den, false)) throw InputError("malformed rational '" + text + "'");
    if (!num.empty() && num[0] == '+') num.erase(0, 1);
    mpz_class n(num), d(den);
    if (d == 0) throw InputError("rational '" + text + "' has zero denominator");
    Rational q(n, d);
    q.canonicalize();
    return q;
}

// ---------------------------------------------------------------- Monomial

Monomial::Monomial(const Chart& chart, std::vector<std::uint8_t> exps) : exps_(std::move(exps)) {
    const std::size_t n = chart.base_count();
    for (std::size_t i = 0; i < exps_.size(); ++i) {
        total_ += exps_[i];
        if (i >= 2 * n) res_ += exps_[i];
        else if (i >= n) form_ += exps_[i];
    }
}

Monomial Monomial::one(const Chart& chart) {
    return Monomial(chart, std::vector<std::uint8_t>(chart.size(), 0));
}

Monomial Monomial::generator(const Chart& chart, std::size_t g, unsigned power) {
    std::vector<std::uint8_t> e(chart.size(), 0);
    e[g] = static_cast<std::uint8_t>(power);
    return Monomial(chart, std::move(e));
}

int Monomial::zdeg(const Chart& chart) const {
    int d = 0;
    for (std::size_t i = 0; i < exps_.size(); ++i) d += exps_[i] * chart.gen(i).zdeg;
    return d;
}

bool MonomialOrder::operator()(const Monomial& a, const Monomial& b) const {
    if (a.resdeg() != b.resdeg()) return a.resdeg() < b.resdeg();
    if (a.formdeg() != b.formdeg()) return a.formdeg() < b.formdeg();
    if (a.total() != b.total()) return a.total() < b.total();
    return std::lexicographical_compare(b.exps().begin(), b.exps().end(), a.exps().begin(), a.exps().end());
}

int koszul_sign(const Chart& chart, const Monomial& m1, const Monomial& m2) {
    // For each odd generator h of m2, count odd generators of m1 that sort
    // after h; each such pair is one transposition.
    int swaps = 0;
    int later_odd_in_m1 = 0;
    for (std::size_t i = chart.size(); i-- > 0;) {
        if (!chart.gen(i).odd()) continue;
        if (m2.exp(i)) swaps += later_odd_in_m1;
        if (m1.exp(i)) ++later_odd_in_m1;
    }
    return (swaps % 2) ? -1 : 1;
}

std::optional<std::pair<Monomial, int>> multiply(const Chart& chart, const Monomial& m1,
                                                 const Monomial& m2, const Truncation& trunc) {
    if (m1.resdeg() + m2.resdeg() > trunc.res) return std::nullopt;
    if (m1.formdeg() + m2.formdeg() > trunc.form) return std::nullopt;
    const std::size_t n = chart.size();
    std::vector<std::uint8_t> e(n);
    int swaps = 0;
    int later_odd_in_m1 = 0;
    for (std::size_t i = n; i-- > 0;) {
        const unsigned a = m1.exp(i), b = m2.exp(i);
        if (chart.gen(i).odd()) {
            if (a && b) return std::nullopt;
            if (b) swaps += later_odd_in_m1;
            if (a) ++later_odd_in_m1;
        }
        if (a + b > 255) throw InvariantError("monomial exponent overflow");
        e[i] = static_cast<std::uint8_t>(a + b);
    }
    return std::make_pair(Monomial(chart, std::move(e)), (swaps % 2) ? -1 : 1);
}

int weight(const Monomial& m, Grading which) {
    switch (which) {
    case Grading::resdeg: return m.resdeg();
    case Grading::formdeg: return m.formdeg();
    case Grading::deg_ht: return m.resdeg() + m.formdeg();
    }
    return 0;
}

// ------------------------------------------------------------------ Series

Series::Series(ChartPtr chart) : chart_(std::move(chart)), trunc_(chart_->trunc()) {}

Series::Series(ChartPtr chart, Truncation trunc) : chart_(std::move(chart)), trunc_(trunc) {}

Series Series::constant(ChartPtr chart, const Rational& c) {
    Series s(std::move(chart));
    s.add_term(Monomial::one(*s.chart_), c);
    return s;
}

Series Series::generator(ChartPtr chart, std::size_t g) {
    Series s(std::move(chart));
    s.add_term(Monomial::generator(*s.chart_, g), 1);
    return s;
}

Series Series::generator(ChartPtr chart, const std::string& name) {
    const std::size_t g = chart->require(name);
    return generator(std::move(chart), g);
}

Series Series::monomial(ChartPtr chart, Monomial m, const Rational& c) {
    Series s(std::move(chart));
    s.add_term(m, c);
    return s;
}

void Series::add_term(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    if (m.resdeg() > trunc_.res || m.formdeg() > trunc_.form) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Series& Series::operator+=(const Series& other) {
    if (!chart_) {
        *this = other;
        return *this;
    }
    if (other.chart_) require_same_chart(chart_, other.chart_, "series addition");
    for (const auto& [m, c] : other.terms_) add_term(m, c);
    return *this;
}

Series& Series::operator-=(const Series& other) {
    if (!chart_) {
        *this = -other;
        return *this;
    }
    if (other.chart_) require_same_chart(chart_, other.chart_, "series subtraction");
    for (const auto& [m, c] : other.terms_) add_term(m, -c);
    return *this;
}

Series& Series::operator*=(const Rational& c) {
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [m, v] : terms_) v *= c;
    return *this;
}

Series Series::operator-() const {
    Series s = *this;
    for (auto& [m, v] : s.terms_) v = -v;
    return s;
}

Series operator*(const Series& a, const Series& b) {
    require_same_chart(a.chart_, b.chart_, "series product");
    if (a.size() * b.size() >= kernels::parallel_threshold && kernels::max_threads() > 1)
        return kernels::mul_parallel(a, b);
    return kernels::mul_serial(a, b);
}

bool operator==(const Series& a, const Series& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    auto it = b.terms_.begin();
    for (const auto& [m, c] : a.terms_) {
        if (!(it->first == m) || it->second != c) return false;
        ++it;
    }
    return true;
}

std::optional<int> Series::zdeg() const {
    if (terms_.empty()) return std::nullopt;
    return terms_.begin()->first.zdeg(*chart_);
}

bool Series::zdeg_homogeneous() const {
    if (terms_.empty()) return true;
    const int d = terms_.begin()->first.zdeg(*chart_);
    for (const auto& [m, c] : terms_)
        if (m.zdeg(*chart_) != d) return false;
    return true;
}

int Series::max_degree(Grading which) const {
    int k = INT_MIN;
    for (const auto& [m, c] : terms_) k = std::max(k, weight(m, which));
    return k;
}

int Series::min_degree(Grading which) const {
    int k = INT_MAX;
    for (const auto& [m, c] : terms_) k = std::min(k, weight(m, which));
    return k;
}

bool Series::depends_only_on_base() const {
    for (const auto& [m, c] : terms_)
        if (!m.base_only()) return false;
    return true;
}

Series Series::truncated(int res, int form) const {
    Series s(chart_, Truncation{std::min(res, trunc_.res), std::min(form, trunc_.form)});
    for (const auto& [m, c] : terms_)
        if (m.resdeg() <= res && m.formdeg() <= form) s.terms_.emplace_hint(s.terms_.end(), m, c);
    return s;
}

Series Series::with_trunc(Truncation t) const {
    Series s(chart_, t);
    for (const auto& [m, c] : terms_) s.add_term(m, c);
    return s;
}

Series Series::up_to(Grading which, int k) const {
    Series s(chart_, trunc_);
    for (const auto& [m, c] : terms_)
        if (weight(m, which) <= k) s.terms_.emplace_hint(s.terms_.end(), m, c);
    return s;
}

Rational Series::constant_term() const {
    return coeff(Monomial::one(*chart_));
}

Rational Series::coeff(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
}

Series grade_project(const Series& f, Grading which, int k) {
    Series s(f.chart(), f.trunc());
    for (const auto& [m, c] : f.terms())
        if (weight(m, which) == k) s.add_term(m, c);
    return s;
}

Series partial(std::size_t g, const Series& f) {
    const Chart& chart = *f.chart();
    const bool odd = chart.gen(g).odd();
    Series out(f.chart(), f.trunc());
    for (const auto& [m, c] : f.terms()) {
        const unsigned k = m.exp(g);
        if (k == 0) continue;
        int sign = 1;
        if (odd) {
            int before = 0;
            for (std::size_t i = 0; i < g; ++i)
                if (chart.gen(i).odd()) before += m.exp(i);
            if (before % 2) sign = -1;
        }
        std::vector<std::uint8_t> e = m.exps();
        e[g] = static_cast<std::uint8_t>(k - 1);
        out.add_term(Monomial(chart, std::move(e)), c * static_cast<long>(k) * sign);
    }
    return out;
}

std::vector<Series> identity_images(const ChartPtr& chart) {
    std::vector<Series> images;
    images.reserve(chart->size());
    for (std::size_t g = 0; g < chart->size(); ++g) images.push_back(Series::generator(chart, g));
    return images;
}

void validate_morphism_images(const Chart& source, const std::vector<Series>& images) {
    if (images.size() != source.size())
        throw InputError("ring morphism: expected " + std::to_string(source.size()) + " images, got " +
                         std::to_string(images.size()));
    for (std::size_t g = 0; g < images.size(); ++g) {
        const Series& img = images[g];
        if (!img.chart()) throw InputError("ring morphism: image of '" + source.gen(g).name + "' has no chart");
        if (!img.zdeg_homogeneous())
            throw PreconditionError("ring morphism: image of '" + source.gen(g).name + "' is not degree-homogeneous");
        auto d = img.zdeg();
        if (d && *d != source.gen(g).zdeg)
            throw PreconditionError("ring morphism: image of '" + source.gen(g).name + "' has degree " +
                                    std::to_string(*d) + ", expected " + std::to_string(source.gen(g).zdeg));
        if (source.gen(g).odd() && !(img * img).is_zero())
            throw PreconditionError("ring morphism: square of odd image of '" + source.gen(g).name +
                                    "' survives truncation");
    }
}

Series ring_morphism(const std::vector<Series>& images, const Series& f) {
    const Chart& source = *f.chart();
    validate_morphism_images(source, images);
    const ChartPtr& target = images.front().chart();
    Truncation trunc = images.front().trunc();
    for (const auto& img : images) {
        require_same_chart(target, img.chart(), "ring morphism images");
        trunc.res = std::min(trunc.res, img.trunc().res);
        trunc.form = std::min(trunc.form, img.trunc().form);
    }
    // powers[g][k] = images[g]^k, built lazily.
    std::vector<std::vector<Series>> powers(source.size());
    auto power = [&](std::size_t g, unsigned k) -> const Series& {
        auto& p = powers[g];
        if (p.empty()) p.push_back(Series::constant(target, 1).with_trunc(trunc));
        while (p.size() <= k) p.push_back(p.back() * images[g].with_trunc(trunc));
        return p[k];
    };
    Series out(target, trunc);
    for (const auto& [m, c] : f.terms()) {
        Series term = Series::constant(target, c).with_trunc(trunc);
        for (std::size_t g = 0; g < source.size() && !term.is_zero(); ++g)
            if (m.exp(g)) term = term * power(g, m.exp(g));
        out += term;
    }
    return out;
}

// ------------------------------------------------------------ text format

std::string to_string(const Series& f) {
    if (f.is_zero()) return "0";
    const Chart& chart = *f.chart();
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : f.terms()) {
        Rational mag = abs(c);
        if (first) {
            if (c < 0) os << "-";
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        first = false;
        bool need_star = false;
        if (mag != 1 || m.is_one()) {
            os << to_string(mag);
            need_star = true;
        }
        for (std::size_t g = 0; g < chart.size(); ++g) {
            const unsigned k = m.exp(g);
            if (!k) continue;
            if (need_star) os << "*";
            os << chart.gen(g).name;
            if (k > 1) os << "^" << k;
            need_star = true;
        }
    }
    return os.str();
}

namespace {

class SeriesParser {
public:
    SeriesParser(const ChartPtr& chart, const std::string& text) : chart_(chart), text_(text) {}

    Series parse() {
        Series out(chart_, Truncation{INT_MAX / 4, INT_MAX / 4});
        skip_ws();
        if (pos_ >= text_.size()) fail("empty series");
        bool first = true;
        while (true) {
            skip_ws();
            int sign = 1;
            if (peek() == '+' || peek() == '-') {
                sign = get() == '-' ? -1 : 1;
            } else if (!first) {
                fail("expected '+' or '-'");
            }
            first = false;
            Series term = parse_term();
            if (sign < 0) term = -term;
            out += term;
            skip_ws();
            if (pos_ >= text_.size()) break;
        }
        return out.with_trunc(chart_->trunc());
    }

private:
    Series parse_term() {
        Series term = Series::constant(chart_, 1).with_trunc(Truncation{INT_MAX / 4, INT_MAX / 4});
        while (true) {
            skip_ws();
            term = term * parse_factor();
            skip_ws();
            if (peek() != '*') break;
            get();
        }
        return term;
    }

    Series parse_factor() {
        const Truncation wide{INT_MAX / 4, INT_MAX / 4};
        skip_ws();
        char c = peek();
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string num = digits();
            if (peek() == '/') {
                get();
                std::string den = digits();
                if (den.empty()) fail("expected denominator");
                num += "/" + den;
            }
            return Series::constant(chart_, parse_rational(num)).with_trunc(wide);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            const std::string name = text_.substr(start, pos_ - start);
            auto g = chart_->find(name);
            if (!g) {
                pos_ = start;
                fail("unknown generator '" + name + "'");
            }
            unsigned k = 1;
            skip_ws();
            if (peek() == '^') {
                get();
                skip_ws();
                std::string e = digits();
                if (e.empty()) fail("expected exponent");
                k = static_cast<unsigned>(std::stoul(e));
            }
            Series base = Series::generator(chart_, *g).with_trunc(wide);
            Series out = Series::constant(chart_, 1).with_trunc(wide);
            for (unsigned i = 0; i < k; ++i) out = out * base;
            return out;
        }
        fail("expected coefficient or generator");
        return {};
    }

    std::string digits() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        return text_.substr(start, pos_ - start);
    }
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    char get() { return text_[pos_++]; }
    [[noreturn]] void fail(const std::string& what) const {
        throw InputError("series parse error at column " + std::to_string(pos_ + 1) + ": " + what + " in '" +
                         text_ + "'");
    }

    const ChartPtr& chart_;
    const std::string& text_;
    std::size_t pos_ = 0;
};

}  // namespace

Series parse_series(const ChartPtr& chart, const std::string& text) {
    return SeriesParser(chart, text).parse();
}

}  // namespace fexp
