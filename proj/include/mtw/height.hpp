#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <vector>

#include "mtw/linalg.hpp"
#include "mtw/polytope.hpp"
#include "mtw/variety.hpp"

namespace mtw {

// Height matrix A1 (J x N, flat variable order), block matrix data, rank and
// the log-power exponent c2 = J - R.
struct HeightSystem {
    QMat A1;  // J x N, nonnegative integers
    QMat A2;  // J x k
    std::size_t J = 0, N = 0;
    int R = 0;
    int c2 = 0;

    // Full (A1 A2) block.
    QMat A12() const {
        QMat m(J, N + A2.cols());
        for (std::size_t i = 0; i < J; ++i) {
            for (std::size_t j = 0; j < N; ++j) m(i, j) = A1(i, j);
            for (std::size_t j = 0; j < A2.cols(); ++j) m(i, N + j) = A2(i, j);
        }
        return m;
    }

    // Bottom row (A3 A4) = (1,...,1, 0,...,0,-1).
    std::vector<Rat> A34() const {
        std::vector<Rat> r(N + A2.cols(), Rat(0));
        for (std::size_t j = 0; j < N; ++j) r[j] = 1;
        r[N + A2.cols() - 1] = -1;
        return r;
    }
};

// Columns of A1 = vertices of Q = p^{-1}(-K) ∩ R^J_{>=0}; all integral.
// Column order: lexicographically sorted exponent vectors (deterministic).
inline QMat derive_height_matrix(const VarietySpec& spec) {
    auto bad = validate_spec(spec);
    if (!bad.empty()) throw std::invalid_argument("derive_height_matrix: invalid spec: " + bad.front());
    const std::size_t J = spec.var_count();
    HPolytope q = HPolytope::make(J);
    q.nonneg.assign(J, true);
    QMat deg = spec.degree_matrix();
    for (int r = 0; r < spec.rank_pic; ++r) {
        std::vector<Rat> row(J);
        for (std::size_t j = 0; j < J; ++j) row[j] = deg(std::size_t(r), j);
        q.add_eq(row, Rat(spec.anticanonical[std::size_t(r)]));
    }
    VertexSet vs;
    try {
        vs = vertices(q);
    } catch (const std::domain_error&) {
        throw std::domain_error("derive_height_matrix: Q is unbounded (invalid Cox datum)");
    }
    if (vs.v.empty()) throw std::domain_error("derive_height_matrix: Q is empty");
    for (const auto& v : vs.v)
        for (const auto& x : v)
            if (!is_integer(x) || x < 0)
                throw std::domain_error("derive_height_matrix: non-integral vertex of Q");
    std::vector<std::vector<Rat>> cols = vs.v;
    std::sort(cols.begin(), cols.end());

    if (spec.height_matrix) {
        std::set<std::vector<Rat>> derived(cols.begin(), cols.end());
        std::set<std::vector<Rat>> stored;
        for (const auto& c : *spec.height_matrix) {
            std::vector<Rat> cc(c.size());
            for (std::size_t i = 0; i < c.size(); ++i) cc[i] = Rat(c[i]);
            stored.insert(cc);
        }
        if (derived != stored)
            throw std::domain_error("derive_height_matrix: stored height_matrix disagrees with derived vertices");
        // keep the stored ordering
        QMat a1(J, spec.height_matrix->size());
        for (std::size_t c = 0; c < spec.height_matrix->size(); ++c)
            for (std::size_t i = 0; i < J; ++i) a1(i, c) = Rat((*spec.height_matrix)[c][i]);
        return a1;
    }
    QMat a1(J, cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c)
        for (std::size_t i = 0; i < J; ++i) a1(i, c) = cols[c][i];
    return a1;
}

inline HeightSystem assemble_block_matrix(const VarietySpec& spec, const QMat& a1) {
    HeightSystem hs;
    hs.A1 = a1;
    hs.J = spec.var_count();
    hs.N = a1.cols();
    const int k = spec.k();
    // columns of A2: h_i - h_k for i<k, then h_k - (1,...,1)
    auto hvec = [&](int i) {
        std::vector<Rat> v(hs.J, Rat(0));
        for (int j = 1; j <= int(spec.group_size(i)); ++j)
            v[spec.flat_index({i, j})] = Rat(spec.var({i, j}).h);
        return v;
    };
    hs.A2 = QMat(hs.J, std::size_t(k));
    auto hk = hvec(k);
    for (int i = 1; i < k; ++i) {
        auto hi = hvec(i);
        for (std::size_t r = 0; r < hs.J; ++r) hs.A2(r, std::size_t(i - 1)) = hi[r] - hk[r];
    }
    for (std::size_t r = 0; r < hs.J; ++r) hs.A2(r, std::size_t(k - 1)) = hk[r] - 1;

    int rank_a1 = int(rank_of(hs.A1));
    // full matrix with bottom row (A3 A4)
    QMat a12 = hs.A12();
    QMat full(hs.J + 1, a12.cols());
    for (std::size_t i = 0; i < hs.J; ++i)
        for (std::size_t j = 0; j < a12.cols(); ++j) full(i, j) = a12(i, j);
    auto a34 = hs.A34();
    for (std::size_t j = 0; j < a12.cols(); ++j) full(hs.J, j) = a34[j];
    int rank_full = int(rank_of(full));
    if (rank_full != rank_a1)
        throw std::domain_error("rank condition violated: rank(A) != rank(A1)");
    if (rank_a1 != int(hs.J) - spec.rank_pic + 1)
        throw std::domain_error("rank condition violated: rank(A1) != J - rank_pic + 1");
    hs.R = rank_a1;
    hs.c2 = int(hs.J) - hs.R;
    return hs;
}

// Selected maximal independent row set of (A1 A2) with coefficient data:
//   B (J-R x R):        each non-basis row as a combination of basis rows,
//   b (R):              (A3 A4) as a combination of basis rows.
struct RowBasis {
    std::vector<VarIndex> I;                 // basis rows, flat order positions
    std::vector<std::size_t> basis_flat;     // flat indices of I
    std::vector<std::size_t> rest_flat;      // flat indices of the complement
    QMat B;                                  // (J-R) x R
    std::vector<Rat> b;                      // length R
    bool simplifying = true;                 // monomial 1 of Phi* is t11 alone, h=1
    std::optional<VarIndex> unit_chart_var;  // rho_1 with a unit height exponent
};

// Deterministic basis choice. Admissible sets I (|I| = R) must have independent
// rows of (A1 A2) and meet the single-variable monomial condition for group 1
// (exactly the row (1,1), whose exponent is 1 in type T). Among those, prefer
// sets admitting a height column with exponent 1 at some rho1 in I and support
// inside complement(I) ∪ {rho1}; this normalizes the c*/c_infinity split to the
// chart the constants are quoted in. Ties: lexicographically smallest I.
inline RowBasis select_row_basis(const HeightSystem& hs, const VarietySpec& spec) {
    const std::size_t J = hs.J, R = std::size_t(hs.R);
    auto order = spec.var_order();
    QMat a12 = hs.A12();
    std::size_t i11 = spec.flat_index({1, 1});
    std::size_t i12 = spec.group_size(1) >= 2 ? spec.flat_index({1, 2}) : std::size_t(-1);
    if (spec.var({1, 1}).h != 1)
        throw std::domain_error("select_row_basis: variable (1,1) must have exponent 1");

    auto unit_chart = [&](const std::vector<std::size_t>& I) -> std::optional<std::size_t> {
        std::vector<bool> in_i(J, false);
        for (auto i : I) in_i[i] = true;
        for (auto rho1 : I)
            for (std::size_t nu = 0; nu < hs.N; ++nu) {
                if (hs.A1(rho1, nu) != 1) continue;
                bool ok = true;
                for (auto i : I)
                    if (i != rho1 && hs.A1(i, nu) != 0) { ok = false; break; }
                if (ok) return rho1;
            }
        return std::nullopt;
    };

    std::vector<std::size_t> best, best_any;
    std::optional<std::size_t> best_rho1;
    std::vector<std::size_t> comb;
    std::function<bool(std::size_t, bool)> rec = [&](std::size_t start, bool want_chart) -> bool {
        if (comb.size() == R) {
            bool has11 = std::find(comb.begin(), comb.end(), i11) != comb.end();
            bool has12 = std::find(comb.begin(), comb.end(), i12) != comb.end();
            if (!has11 || has12) return false;
            std::vector<std::vector<Rat>> rows;
            for (auto i : comb) rows.push_back(a12.row(i));
            if (rank_of(QMat::from_rows(rows)) != R) return false;
            if (!want_chart) return true;
            auto rho1 = unit_chart(comb);
            if (rho1) {
                best_rho1 = rho1;
                return true;
            }
            return false;
        }
        for (std::size_t i = start; i + (R - comb.size()) <= J; ++i) {
            comb.push_back(i);
            if (rec(i + 1, want_chart)) return true;
            comb.pop_back();
        }
        return false;
    };
    bool have_chart = rec(0, true);
    if (have_chart) best = comb;
    comb.clear();
    if (!have_chart) {
        if (!rec(0, false)) throw std::domain_error("select_row_basis: no admissible row basis");
        best = comb;
    }

    RowBasis rb;
    rb.basis_flat = best;
    for (auto i : best) rb.I.push_back(order[i]);
    for (std::size_t i = 0; i < J; ++i)
        if (std::find(best.begin(), best.end(), i) == best.end()) rb.rest_flat.push_back(i);
    rb.simplifying = true;  // (1,1)-solitary condition enforced during the search
    if (best_rho1) rb.unit_chart_var = order[*best_rho1];

    std::vector<std::vector<Rat>> rows;
    for (auto i : best) rows.push_back(a12.row(i));
    QMat basis_rows = QMat::from_rows(rows);
    rb.B = QMat(J - R, R);
    for (std::size_t t = 0; t < rb.rest_flat.size(); ++t) {
        auto c = express_in_row_span(basis_rows, a12.row(rb.rest_flat[t]));
        if (!c) throw std::logic_error("select_row_basis: dependent row not in basis span");
        for (std::size_t l = 0; l < R; ++l) rb.B(t, l) = (*c)[l];
    }
    auto cb = express_in_row_span(basis_rows, hs.A34());
    if (!cb) throw std::logic_error("select_row_basis: (A3 A4) not in basis span");
    rb.b = *cb;
    return rb;
}

// H_0(x) = max_nu prod |x_ij|^{alpha^nu_ij}; exact, requires all coordinates nonzero.
inline Int height_of_point(const HeightSystem& hs, const std::vector<Int>& x) {
    if (x.size() != hs.J) throw std::invalid_argument("height_of_point: wrong length");
    for (const auto& xi : x)
        if (xi == 0) throw std::invalid_argument("height_of_point: zero coordinate");
    Int best = 0;
    for (std::size_t nu = 0; nu < hs.N; ++nu) {
        Int m = 1;
        for (std::size_t i = 0; i < hs.J; ++i) {
            long e = long(to_int(hs.A1(i, nu)).convert_to<long>());
            if (e == 0) continue;
            m *= ipow(abs(x[i]), unsigned(e));
        }
        if (m > best) best = m;
    }
    return best;
}

}  // namespace mtw
