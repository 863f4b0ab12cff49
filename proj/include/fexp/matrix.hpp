#pragma once

#include <vector>

#include "fexp/series.hpp"

namespace fexp {

// Square matrix of series, entry (r, c). Products multiply entries in order
// M(r,k) * N(k,c) and never commute them.
class SeriesMatrix {
public:
    SeriesMatrix() = default;
    SeriesMatrix(ChartPtr chart, std::size_t n);
    static SeriesMatrix identity(ChartPtr chart, std::size_t n);

    std::size_t size() const { return n_; }
    const ChartPtr& chart() const { return chart_; }
    Series& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
    const Series& operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }

    friend SeriesMatrix operator*(const SeriesMatrix& a, const SeriesMatrix& b);
    friend SeriesMatrix operator+(const SeriesMatrix& a, const SeriesMatrix& b);
    friend SeriesMatrix operator-(const SeriesMatrix& a, const SeriesMatrix& b);
    SeriesMatrix operator-() const;
    friend bool operator==(const SeriesMatrix& a, const SeriesMatrix& b);
    bool is_identity() const;
    bool is_zero() const;

private:
    ChartPtr chart_;
    std::size_t n_ = 0;
    std::vector<Series> data_;
};

// Part of s built from degree-0 base generators only.
Series reduced_part(const Series& s);

// Determinant of a matrix with commuting entries (Laplace expansion).
Series commutative_det(const SeriesMatrix& m);

// Two-sided inverse of a unimodular matrix: the reduced part must have a
// nonzero constant determinant and the remainder must be nilpotent.
// Throws PreconditionError otherwise.
SeriesMatrix unimodular_inverse(const SeriesMatrix& m, const std::string& what = "matrix");

}  // namespace fexp
