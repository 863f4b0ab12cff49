#pragma once

#include <map>
#include <vector>

#include "fexp/series.hpp"

namespace fexp {

// Left derivation of the big chart, stored by its values on generators.
class Derivation {
public:
    Derivation() = default;
    // The zero derivation of the given degree.
    Derivation(ChartPtr chart, int zdeg);
    // Images must be homogeneous of degree deg(g) + zdeg (zero is allowed).
    Derivation(ChartPtr chart, int zdeg, std::vector<Series> images);

    // d: z -> dz, dz -> 0, eps -> 0.
    static Derivation de_rham(const ChartPtr& chart);
    // delta = -dz^a d/d eps^a.
    static Derivation delta(const ChartPtr& chart);
    // eps_HT = dz^a d/d dz^a + eps^a d/d eps^a.
    static Derivation counting(const ChartPtr& chart);

    const ChartPtr& chart() const { return chart_; }
    int zdeg() const { return zdeg_; }
    bool odd() const { return (zdeg_ % 2) != 0; }
    const Series& image(std::size_t g) const { return images_[g]; }
    const std::vector<Series>& images() const { return images_; }
    void set_image(std::size_t g, Series s);
    bool is_zero() const;
    // All images vanish through the given resolution degree.
    bool is_zero_through(int resdeg) const;

    // Sum over generators of image(g) * partial(g, f).
    Series apply(const Series& f) const;

    Derivation& operator+=(const Derivation& o);
    Derivation& operator-=(const Derivation& o);
    Derivation& operator*=(const Rational& c);
    friend Derivation operator+(Derivation a, const Derivation& b) { return a += b; }
    friend Derivation operator-(Derivation a, const Derivation& b) { return a -= b; }
    friend Derivation operator*(const Rational& c, Derivation a) { return a *= c; }
    Derivation operator-() const;
    friend bool operator==(const Derivation& a, const Derivation& b);

    // Change in grading weight from a generator to its image, when the same
    // for every nonzero image.
    std::optional<int> weight_shift(Grading which) const;

private:
    void check_image(std::size_t g, const Series& s) const;

    ChartPtr chart_;
    int zdeg_ = 0;
    std::vector<Series> images_;
};

// Graded commutator [V, W] = V W - (-1)^{|V||W|} W V.
Derivation commutator(const Derivation& v, const Derivation& w);

// Half of [V, V]; for odd V this is V composed with itself.
Derivation square(const Derivation& v);

// Pieces V_k whose images shift the given grading by exactly k.
std::map<int, Derivation> decompose(const Derivation& v, Grading which = Grading::resdeg);
Derivation recompose(const std::map<int, Derivation>& pieces);

// Weight-k piece (zero derivation if absent).
Derivation piece(const Derivation& v, int k, Grading which = Grading::resdeg);

std::string to_string(const Derivation& v);

int weight(const Chart& chart, std::size_t g, Grading which);

}  // namespace fexp
