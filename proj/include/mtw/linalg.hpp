#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mtw/rational.hpp"

namespace mtw {

// Dense exact-rational matrix, row major. Small sizes only (J <= ~20, N <= ~200).
class QMat {
  public:
    QMat() = default;
    QMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Rat& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const Rat& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    std::vector<Rat> row(std::size_t i) const {
        return std::vector<Rat>(a_.begin() + i * cols_, a_.begin() + (i + 1) * cols_);
    }
    std::vector<Rat> col(std::size_t j) const {
        std::vector<Rat> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    QMat transposed() const {
        QMat t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    static QMat from_rows(const std::vector<std::vector<Rat>>& rows) {
        if (rows.empty()) return QMat(0, 0);
        QMat m(rows.size(), rows[0].size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != m.cols()) throw std::invalid_argument("ragged rows");
            for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
        }
        return m;
    }

    bool operator==(const QMat& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Rat> a_;
};

inline std::vector<Rat> mat_vec(const QMat& m, const std::vector<Rat>& x) {
    if (x.size() != m.cols()) throw std::invalid_argument("mat_vec: size mismatch");
    std::vector<Rat> y(m.rows(), Rat(0));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (m(i, j) != 0 && x[j] != 0) y[i] += m(i, j) * x[j];
    return y;
}

inline std::size_t rank_of(QMat m) {
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        std::size_t piv = r;
        while (piv < m.rows() && m(piv, c) == 0) ++piv;
        if (piv == m.rows()) continue;
        for (std::size_t j = c; j < m.cols(); ++j) std::swap(m(r, j), m(piv, j));
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == r || m(i, c) == 0) continue;
            Rat f = m(i, c) / m(r, c);
            for (std::size_t j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
        }
        ++r;
    }
    return r;
}

// Solve A x = b exactly. Returns nullopt when inconsistent; when underdetermined
// returns one solution (free variables set to zero, pivoting deterministic).
inline std::optional<std::vector<Rat>> solve_linear(QMat a, std::vector<Rat> b) {
    if (b.size() != a.rows()) throw std::invalid_argument("solve_linear: size mismatch");
    const std::size_t n = a.cols();
    std::vector<std::ptrdiff_t> pivot_col_of_row(a.rows(), -1);
    std::size_t r = 0;
    for (std::size_t c = 0; c < n && r < a.rows(); ++c) {
        std::size_t piv = r;
        while (piv < a.rows() && a(piv, c) == 0) ++piv;
        if (piv == a.rows()) continue;
        for (std::size_t j = 0; j < n; ++j) std::swap(a(r, j), a(piv, j));
        std::swap(b[r], b[piv]);
        for (std::size_t i = 0; i < a.rows(); ++i) {
            if (i == r || a(i, c) == 0) continue;
            Rat f = a(i, c) / a(r, c);
            for (std::size_t j = c; j < n; ++j) a(i, j) -= f * a(r, j);
            b[i] -= f * b[r];
        }
        pivot_col_of_row[r] = std::ptrdiff_t(c);
        ++r;
    }
    for (std::size_t i = r; i < a.rows(); ++i)
        if (b[i] != 0) return std::nullopt;
    std::vector<Rat> x(n, Rat(0));
    for (std::size_t i = 0; i < r; ++i) x[std::size_t(pivot_col_of_row[i])] = b[i] / a(i, std::size_t(pivot_col_of_row[i]));
    return x;
}

// Coefficients c with c^T * rowsI = target, when target lies in the row span.
inline std::optional<std::vector<Rat>> express_in_row_span(const QMat& rows_basis,
                                                           const std::vector<Rat>& target) {
    return solve_linear(rows_basis.transposed(), target);
}

inline Rat det(QMat m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("det: square required");
    Rat d = 1;
    const std::size_t n = m.rows();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && m(piv, c) == 0) ++piv;
        if (piv == n) return Rat(0);
        if (piv != c) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(c, j), m(piv, j));
            d = -d;
        }
        d *= m(c, c);
        for (std::size_t i = c + 1; i < n; ++i) {
            if (m(i, c) == 0) continue;
            Rat f = m(i, c) / m(c, c);
            for (std::size_t j = c; j < n; ++j) m(i, j) -= f * m(c, j);
        }
    }
    return d;
}

}  // namespace mtw
