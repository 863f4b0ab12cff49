#include "fexp/matrix.hpp"

namespace fexp {

SeriesMatrix::SeriesMatrix(ChartPtr chart, std::size_t n) : chart_(std::move(chart)), n_(n) {
    data_.assign(n * n, Series(chart_));
}

SeriesMatrix SeriesMatrix::identity(ChartPtr chart, std::size_t n) {
    SeriesMatrix m(chart, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Series::constant(chart, 1);
    return m;
}

SeriesMatrix operator*(const SeriesMatrix& a, const SeriesMatrix& b) {
    SeriesMatrix out(a.chart_, a.n_);
    for (std::size_t r = 0; r < a.n_; ++r)
        for (std::size_t c = 0; c < a.n_; ++c)
            for (std::size_t k = 0; k < a.n_; ++k)
                if (!a(r, k).is_zero() && !b(k, c).is_zero()) out(r, c) += a(r, k) * b(k, c);
    return out;
}

SeriesMatrix operator+(const SeriesMatrix& a, const SeriesMatrix& b) {
    SeriesMatrix out = a;
    for (std::size_t i = 0; i < out.data_.size(); ++i) out.data_[i] += b.data_[i];
    return out;
}

SeriesMatrix operator-(const SeriesMatrix& a, const SeriesMatrix& b) {
    SeriesMatrix out = a;
    for (std::size_t i = 0; i < out.data_.size(); ++i) out.data_[i] -= b.data_[i];
    return out;
}

SeriesMatrix SeriesMatrix::operator-() const {
    SeriesMatrix out = *this;
    for (auto& s : out.data_) s = -s;
    return out;
}

bool operator==(const SeriesMatrix& a, const SeriesMatrix& b) {
    if (a.n_ != b.n_) return false;
    for (std::size_t i = 0; i < a.data_.size(); ++i)
        if (!(a.data_[i] == b.data_[i])) return false;
    return true;
}

bool SeriesMatrix::is_identity() const {
    return *this == identity(chart_, n_);
}

bool SeriesMatrix::is_zero() const {
    for (const auto& s : data_)
        if (!s.is_zero()) return false;
    return true;
}

Series reduced_part(const Series& s) {
    const Chart& chart = *s.chart();
    Series out(s.chart(), s.trunc());
    for (const auto& [m, c] : s.terms()) {
        bool keep = true;
        for (std::size_t g = 0; g < chart.size() && keep; ++g)
            if (m.exp(g) && (chart.gen(g).klass != GenClass::base || chart.gen(g).zdeg != 0)) keep = false;
        if (keep) out.add_term(m, c);
    }
    return out;
}

namespace {

Series det_rec(const SeriesMatrix& m, std::vector<std::size_t>& rows, std::vector<std::size_t>& cols) {
    const ChartPtr& chart = m.chart();
    if (rows.empty()) return Series::constant(chart, 1);
    const std::size_t r = rows.front();
    Series out(chart);
    std::vector<std::size_t> sub_rows(rows.begin() + 1, rows.end());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        const Series& e = m(r, cols[j]);
        if (e.is_zero()) continue;
        std::vector<std::size_t> sub_cols = cols;
        sub_cols.erase(sub_cols.begin() + static_cast<std::ptrdiff_t>(j));
        Series minor = det_rec(m, sub_rows, sub_cols);
        if (j % 2) out -= e * minor;
        else out += e * minor;
    }
    return out;
}

}  // namespace

Series commutative_det(const SeriesMatrix& m) {
    std::vector<std::size_t> rows(m.size()), cols(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) rows[i] = cols[i] = i;
    return det_rec(m, rows, cols);
}

SeriesMatrix unimodular_inverse(const SeriesMatrix& m, const std::string& what) {
    const std::size_t n = m.size();
    const ChartPtr& chart = m.chart();
    SeriesMatrix m0(chart, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) m0(r, c) = reduced_part(m(r, c));

    const Series det = commutative_det(m0);
    if (det.is_zero() || !det.depends_only_on_base() || det.max_degree(Grading::resdeg) != 0 ||
        det.size() != 1 || !det.terms().begin()->first.is_one())
        throw PreconditionError(what + " is not unimodular (reduced determinant " + to_string(det) + ")");
    const Rational inv_det = 1 / det.constant_term();

    // Adjugate of the reduced part: its entries commute.
    SeriesMatrix m0_inv(chart, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            std::vector<std::size_t> rows, cols;
            for (std::size_t i = 0; i < n; ++i) {
                if (i != c) rows.push_back(i);
                if (i != r) cols.push_back(i);
            }
            Series cof = det_rec(m0, rows, cols);
            cof *= ((r + c) % 2 ? -inv_det : inv_det);
            m0_inv(r, c) = cof;
        }

    // m = m0 (1 + x) with x = m0^{-1} (m - m0) nilpotent; the inverse is
    // sum_k (-x)^k m0^{-1}.
    const SeriesMatrix neg_x = -(m0_inv * (m - m0));
    SeriesMatrix term = SeriesMatrix::identity(chart, n);
    SeriesMatrix sum = term;
    constexpr int max_terms = 64;
    int k = 0;
    for (; k < max_terms; ++k) {
        term = term * neg_x;
        if (term.is_zero()) break;
        sum = sum + term;
    }
    if (k == max_terms)
        throw PreconditionError(what + " is not unimodular (nilpotent part does not terminate)");
    SeriesMatrix inv = sum * m0_inv;
    if (!(inv * m).is_identity() || !(m * inv).is_identity())
        throw InvariantError(what + ": computed inverse is not two-sided");
    return inv;
}

}  // namespace fexp
