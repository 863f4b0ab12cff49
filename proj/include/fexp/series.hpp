#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "fexp/chart.hpp"

namespace fexp {

using Rational = mpq_class;

Rational make_rational(long num, long den = 1);
std::string to_string(const Rational& q);
// Accepts "p", "-p", "p/q". Rejects zero denominators.
Rational parse_rational(const std::string& text);

// A product of generators in canonical (global generator) order. Exponents
// are stored densely; odd generators carry exponent 0 or 1.
class Monomial {
public:
    Monomial() = default;
    Monomial(const Chart& chart, std::vector<std::uint8_t> exps);
    static Monomial one(const Chart& chart);
    static Monomial generator(const Chart& chart, std::size_t g, unsigned power = 1);

    const std::vector<std::uint8_t>& exps() const { return exps_; }
    unsigned exp(std::size_t g) const { return exps_[g]; }
    int resdeg() const { return res_; }
    int formdeg() const { return form_; }
    int total() const { return total_; }
    int zdeg(const Chart& chart) const;
    bool is_one() const { return total_ == 0; }
    // True when the monomial involves base generators only.
    bool base_only() const { return res_ == 0 && form_ == 0; }

    friend bool operator==(const Monomial& a, const Monomial& b) { return a.exps_ == b.exps_; }

private:
    std::vector<std::uint8_t> exps_;
    int res_ = 0;
    int form_ = 0;
    int total_ = 0;
};

// Output order: resolution degree, form degree, total degree, then
// reverse-lexicographic on exponents so that z1 precedes z2.
struct MonomialOrder {
    bool operator()(const Monomial& a, const Monomial& b) const;
};

using TermMap = std::map<Monomial, Rational, MonomialOrder>;

// Sign accumulated by sorting m1*m2 into canonical order: -1 per swap of two
// odd generators.
int koszul_sign(const Chart& chart, const Monomial& m1, const Monomial& m2);

// Canonical product of two monomials with its sign, or nullopt when an odd
// generator would be squared or the truncation is exceeded.
std::optional<std::pair<Monomial, int>> multiply(const Chart& chart, const Monomial& m1,
                                                 const Monomial& m2, const Truncation& trunc);

enum class Grading { resdeg, formdeg, deg_ht };

// Truncated graded-commutative polynomial with exact rational coefficients.
class Series {
public:
    Series() = default;
    explicit Series(ChartPtr chart);
    Series(ChartPtr chart, Truncation trunc);

    static Series constant(ChartPtr chart, const Rational& c);
    static Series generator(ChartPtr chart, std::size_t g);
    static Series generator(ChartPtr chart, const std::string& name);
    static Series monomial(ChartPtr chart, Monomial m, const Rational& c);

    const ChartPtr& chart() const { return chart_; }
    const Truncation& trunc() const { return trunc_; }
    const TermMap& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    // Adds c*m, dropping the term if it leaves the truncation window.
    void add_term(const Monomial& m, const Rational& c);

    Series& operator+=(const Series& other);
    Series& operator-=(const Series& other);
    Series& operator*=(const Rational& c);
    friend Series operator+(Series a, const Series& b) { return a += b; }
    friend Series operator-(Series a, const Series& b) { return a -= b; }
    friend Series operator*(const Rational& c, Series a) { return a *= c; }
    Series operator-() const;

    // Graded-commutative product (parallel kernel above a size threshold).
    friend Series operator*(const Series& a, const Series& b);

    // Structural equality of term sets (truncation metadata is ignored).
    friend bool operator==(const Series& a, const Series& b);

    // Z-degree if homogeneous (zero series: nullopt with homogeneous()==true).
    std::optional<int> zdeg() const;
    bool zdeg_homogeneous() const;
    int max_degree(Grading which) const;
    int min_degree(Grading which) const;
    bool depends_only_on_base() const;

    Series truncated(int res, int form) const;
    Series truncated(Truncation t) const { return truncated(t.res, t.form); }
    Series with_trunc(Truncation t) const;
    // Keep terms with grading weight <= k.
    Series up_to(Grading which, int k) const;

    // Value of the constant monomial.
    Rational constant_term() const;
    Rational coeff(const Monomial& m) const;

private:
    ChartPtr chart_;
    Truncation trunc_;
    TermMap terms_;
};

// The homogeneous component of f of weight k in the given grading.
Series grade_project(const Series& f, Grading which, int k);
int weight(const Monomial& m, Grading which);

// Left partial derivative with respect to generator g.
Series partial(std::size_t g, const Series& f);

// Unique degree-preserving ring morphism sending source generator i to
// images[i] (all images on one target chart), applied to f.
Series ring_morphism(const std::vector<Series>& images, const Series& f);
// Checks the image list is admissible for a morphism from `source`.
void validate_morphism_images(const Chart& source, const std::vector<Series>& images);
std::vector<Series> identity_images(const ChartPtr& chart);

std::string to_string(const Series& f);
// Parses the text form `c * g^k * ... + ...`; factor order is arbitrary and
// is reduced with Koszul signs.
Series parse_series(const ChartPtr& chart, const std::string& text);

}  // namespace fexp
