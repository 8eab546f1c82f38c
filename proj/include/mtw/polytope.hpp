#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "mtw/linalg.hpp"
#include "mtw/rational.hpp"

namespace mtw {

// Rational H-polyhedron: { x : A x <= b, E x = e, x_j >= 0 for flagged j }.
struct HPolytope {
    QMat A;
    std::vector<Rat> b;
    QMat E;
    std::vector<Rat> e;
    std::vector<bool> nonneg;

    std::size_t dim() const { return nonneg.size(); }

    static HPolytope make(std::size_t n) {
        HPolytope p;
        p.A = QMat(0, n);
        p.E = QMat(0, n);
        p.nonneg.assign(n, false);
        return p;
    }

    void add_le(const std::vector<Rat>& row, const Rat& rhs) {
        QMat na(A.rows() + 1, dim());
        for (std::size_t i = 0; i < A.rows(); ++i)
            for (std::size_t j = 0; j < dim(); ++j) na(i, j) = A(i, j);
        for (std::size_t j = 0; j < dim(); ++j) na(A.rows(), j) = row[j];
        A = std::move(na);
        b.push_back(rhs);
    }

    void add_eq(const std::vector<Rat>& row, const Rat& rhs) {
        QMat ne(E.rows() + 1, dim());
        for (std::size_t i = 0; i < E.rows(); ++i)
            for (std::size_t j = 0; j < dim(); ++j) ne(i, j) = E(i, j);
        for (std::size_t j = 0; j < dim(); ++j) ne(E.rows(), j) = row[j];
        E = std::move(ne);
        e.push_back(rhs);
    }

    bool contains(const std::vector<Rat>& x) const {
        for (std::size_t j = 0; j < dim(); ++j)
            if (nonneg[j] && x[j] < 0) return false;
        auto ax = mat_vec(A, x);
        for (std::size_t i = 0; i < A.rows(); ++i)
            if (ax[i] > b[i]) return false;
        auto ex = mat_vec(E, x);
        for (std::size_t i = 0; i < E.rows(); ++i)
            if (ex[i] != e[i]) return false;
        return true;
    }
};

enum class LpSense { Max, Min, Feasibility };
enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Rat value;
    std::vector<Rat> x;    // witness point (Optimal)
    std::vector<Rat> ray;  // unbounded direction (Unbounded)
};

namespace detail {

// Dense exact simplex on equality standard form:
//   max c.y  s.t.  T y = rhs, y >= 0,  rhs >= 0 on entry.
// Bland's rule; deterministic.
class SimplexTableau {
  public:
    SimplexTableau(QMat t, std::vector<Rat> rhs) : t_(std::move(t)), rhs_(std::move(rhs)) {
        m_ = t_.rows();
        n_ = t_.cols();
        basis_.assign(m_, std::size_t(-1));
    }

    std::size_t m() const { return m_; }
    std::size_t n() const { return n_; }
    std::vector<std::size_t>& basis() { return basis_; }

    void pivot(std::size_t r, std::size_t c) {
        Rat inv = 1 / t_(r, c);
        for (std::size_t j = 0; j < n_; ++j) t_(r, j) *= inv;
        rhs_[r] *= inv;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r || t_(i, c) == 0) continue;
            Rat f = t_(i, c);
            for (std::size_t j = 0; j < n_; ++j)
                if (t_(r, j) != 0) t_(i, j) -= f * t_(r, j);
            rhs_[i] -= f * rhs_[r];
        }
        basis_[r] = c;
    }

    // Runs simplex for objective c (maximization). Returns false when unbounded,
    // filling entering column index. Assumes a valid starting basis.
    bool run(const std::vector<Rat>& c, const std::vector<bool>& allowed, std::size_t* unb_col) {
        for (;;) {
            // reduced costs: z_j - c_j = (c_B B^-1 A_j) - c_j; tableau is already B^-1 A.
            std::ptrdiff_t enter = -1;
            for (std::size_t j = 0; j < n_; ++j) {
                if (!allowed[j]) continue;
                bool basic = false;
                for (std::size_t i = 0; i < m_; ++i)
                    if (basis_[i] == j) { basic = true; break; }
                if (basic) continue;
                Rat red = -c[j];
                for (std::size_t i = 0; i < m_; ++i)
                    if (t_(i, j) != 0 && c[basis_[i]] != 0) red += c[basis_[i]] * t_(i, j);
                if (red < 0) { enter = std::ptrdiff_t(j); break; }  // Bland: lowest index
            }
            if (enter < 0) return true;
            std::ptrdiff_t leave = -1;
            Rat best;
            for (std::size_t i = 0; i < m_; ++i) {
                if (t_(i, std::size_t(enter)) <= 0) continue;
                Rat ratio = rhs_[i] / t_(i, std::size_t(enter));
                if (leave < 0 || ratio < best ||
                    (ratio == best && basis_[i] < basis_[std::size_t(leave)])) {
                    best = ratio;
                    leave = std::ptrdiff_t(i);
                }
            }
            if (leave < 0) {
                if (unb_col) *unb_col = std::size_t(enter);
                return false;
            }
            pivot(std::size_t(leave), std::size_t(enter));
        }
    }

    Rat objective(const std::vector<Rat>& c) const {
        Rat v = 0;
        for (std::size_t i = 0; i < m_; ++i)
            if (c[basis_[i]] != 0) v += c[basis_[i]] * rhs_[i];
        return v;
    }

    const Rat& rhs(std::size_t i) const { return rhs_[i]; }
    const Rat& at(std::size_t i, std::size_t j) const { return t_(i, j); }

  private:
    QMat t_;
    std::vector<Rat> rhs_;
    std::vector<std::size_t> basis_;
    std::size_t m_ = 0, n_ = 0;
};

}  // namespace detail

// Exact rational LP over an HPolytope. Deterministic (Bland).
inline LpResult lp_solve(const HPolytope& p, std::vector<Rat> objective,
                         LpSense sense = LpSense::Max) {
    const std::size_t n = p.dim();
    if (objective.empty() && sense == LpSense::Feasibility) objective.assign(n, Rat(0));
    if (objective.size() != n) throw std::invalid_argument("lp_solve: objective size mismatch");
    if (p.b.size() != p.A.rows() || p.e.size() != p.E.rows())
        throw std::invalid_argument("lp_solve: inconsistent polytope");
    if (sense == LpSense::Min)
        for (auto& c : objective) c = -c;

    // Column layout: for coordinate j, one column (nonneg) or a split pair (free).
    std::vector<std::size_t> pos_col(n), neg_col(n, std::size_t(-1));
    std::size_t nv = 0;
    for (std::size_t j = 0; j < n; ++j) {
        pos_col[j] = nv++;
        if (!p.nonneg[j]) neg_col[j] = nv++;
    }
    const std::size_t m_ineq = p.A.rows(), m_eq = p.E.rows(), m = m_ineq + m_eq;
    const std::size_t slack0 = nv;
    const std::size_t art0 = nv + m_ineq;
    const std::size_t ncols = art0 + m;  // artificials for every row (unused ones stay non-basic)

    QMat t(m, ncols);
    std::vector<Rat> rhs(m);
    auto fill_row = [&](std::size_t r, const QMat& src, std::size_t i, const Rat& bi) {
        for (std::size_t j = 0; j < n; ++j) {
            if (src(i, j) == 0) continue;
            t(r, pos_col[j]) = src(i, j);
            if (neg_col[j] != std::size_t(-1)) t(r, neg_col[j]) = -src(i, j);
        }
        rhs[r] = bi;
    };
    for (std::size_t i = 0; i < m_ineq; ++i) {
        fill_row(i, p.A, i, p.b[i]);
        t(i, slack0 + i) = 1;
    }
    for (std::size_t i = 0; i < m_eq; ++i) fill_row(m_ineq + i, p.E, i, p.e[i]);
    for (std::size_t r = 0; r < m; ++r) {
        if (rhs[r] < 0) {
            for (std::size_t j = 0; j < ncols; ++j)
                if (t(r, j) != 0) t(r, j) = -t(r, j);
            rhs[r] = -rhs[r];
        }
        t(r, art0 + r) = 1;
    }

    detail::SimplexTableau tab(std::move(t), std::move(rhs));
    std::vector<bool> allow_all(ncols, true);

    // Phase 1: basis = artificials; minimize their sum.
    for (std::size_t r = 0; r < m; ++r) tab.basis()[r] = art0 + r;
    std::vector<Rat> c1(ncols, Rat(0));
    for (std::size_t r = 0; r < m; ++r) c1[art0 + r] = -1;
    tab.run(c1, allow_all, nullptr);
    if (tab.objective(c1) != 0) return {LpStatus::Infeasible, Rat(0), {}, {}};
    // Drive any lingering artificial out of the basis (degenerate rows).
    for (std::size_t r = 0; r < m; ++r) {
        if (tab.basis()[r] < art0) continue;
        bool pivoted = false;
        for (std::size_t j = 0; j < art0 && !pivoted; ++j)
            if (tab.at(r, j) != 0) {
                tab.pivot(r, j);
                pivoted = true;
            }
        // If the row is entirely zero over real columns it is redundant; the
        // artificial stays basic at level zero, which is harmless if barred.
    }
    std::vector<bool> allow(ncols, true);
    for (std::size_t r = 0; r < m; ++r) allow[art0 + r] = false;

    // Phase 2.
    std::vector<Rat> c2(ncols, Rat(0));
    for (std::size_t j = 0; j < n; ++j) {
        c2[pos_col[j]] = objective[j];
        if (neg_col[j] != std::size_t(-1)) c2[neg_col[j]] = -objective[j];
    }
    std::size_t unb_col = 0;
    bool ok = tab.run(c2, allow, &unb_col);

    auto extract_point = [&]() {
        std::vector<Rat> x(n, Rat(0));
        for (std::size_t r = 0; r < tab.m(); ++r) {
            std::size_t bcol = tab.basis()[r];
            for (std::size_t j = 0; j < n; ++j) {
                if (bcol == pos_col[j]) x[j] += tab.rhs(r);
                if (bcol == neg_col[j]) x[j] -= tab.rhs(r);
            }
        }
        return x;
    };

    if (!ok) {
        // Unbounded: ray from entering column.
        std::vector<Rat> ray(n, Rat(0));
        for (std::size_t j = 0; j < n; ++j) {
            if (unb_col == pos_col[j]) ray[j] += 1;
            if (unb_col == neg_col[j]) ray[j] -= 1;
        }
        for (std::size_t r = 0; r < tab.m(); ++r) {
            std::size_t bcol = tab.basis()[r];
            if (tab.at(r, unb_col) == 0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (bcol == pos_col[j]) ray[j] -= tab.at(r, unb_col);
                if (bcol == neg_col[j]) ray[j] += tab.at(r, unb_col);
            }
        }
        LpResult res;
        res.status = LpStatus::Unbounded;
        res.x = extract_point();
        res.ray = std::move(ray);
        if (sense == LpSense::Min)
            for (auto& v : res.ray) v = v;  // direction sign already matches objective ascent
        return res;
    }

    LpResult res;
    res.status = LpStatus::Optimal;
    res.x = extract_point();
    res.value = 0;
    for (std::size_t j = 0; j < n; ++j) res.value += objective[j] * res.x[j];
    if (sense == LpSense::Min) res.value = -res.value;
    return res;
}

// Affine dimension of P: -1 when empty, else dim of the affine hull (exact).
inline int affine_dim(const HPolytope& p) {
    const std::size_t n = p.dim();
    auto feas = lp_solve(p, std::vector<Rat>(n, Rat(0)), LpSense::Feasibility);
    if (feas.status == LpStatus::Infeasible) return -1;
    if (n == 0) return 0;
    std::vector<std::vector<Rat>> pts{feas.x};

    for (;;) {
        // Orthogonal complement of span{pts[i]-pts[0]}: nullspace via elimination.
        QMat d(pts.size() - 1, n);
        for (std::size_t i = 1; i < pts.size(); ++i)
            for (std::size_t j = 0; j < n; ++j) d(i - 1, j) = pts[i][j] - pts[0][j];
        // Row-reduce d; find pivot columns.
        QMat red = d;
        std::vector<std::ptrdiff_t> pivot_of_col(n, -1);
        std::size_t r = 0;
        for (std::size_t c = 0; c < n && r < red.rows(); ++c) {
            std::size_t piv = r;
            while (piv < red.rows() && red(piv, c) == 0) ++piv;
            if (piv == red.rows()) continue;
            for (std::size_t j = 0; j < n; ++j) std::swap(red(r, j), red(piv, j));
            for (std::size_t i = 0; i < red.rows(); ++i) {
                if (i == r || red(i, c) == 0) continue;
                Rat f = red(i, c) / red(r, c);
                for (std::size_t j = c; j < n; ++j) red(i, j) -= f * red(r, j);
            }
            pivot_of_col[c] = std::ptrdiff_t(r);
            ++r;
        }
        bool grew = false;
        for (std::size_t c = 0; c < n && !grew; ++c) {
            if (pivot_of_col[c] >= 0) continue;
            // Complement direction for free column c.
            std::vector<Rat> phi(n, Rat(0));
            phi[c] = 1;
            // Make phi orthogonal to row space: solve for pivot-column entries.
            // Simpler exact route: phi = e_c minus projection is overkill; instead use
            // the nullspace vector of d^T ... but we need phi with d*phi ... we need
            // phi ⟂ all (pts[i]-pts[0]); take nullspace basis vector of d:
            // standard: x_c = 1, x_pivots solved from red * x = 0.
            for (std::size_t cc = 0; cc < n; ++cc) {
                if (pivot_of_col[cc] < 0 || red(std::size_t(pivot_of_col[cc]), cc) == 0) continue;
                Rat v = -red(std::size_t(pivot_of_col[cc]), c) / red(std::size_t(pivot_of_col[cc]), cc);
                phi[cc] = v;
            }
            Rat base = 0;
            for (std::size_t j = 0; j < n; ++j) base += phi[j] * pts[0][j];
            auto hi = lp_solve(p, phi, LpSense::Max);
            if (hi.status == LpStatus::Unbounded || (hi.status == LpStatus::Optimal && hi.value > base)) {
                pts.push_back(hi.x);
                grew = true;
                break;
            }
            auto lo = lp_solve(p, phi, LpSense::Min);
            if (lo.status == LpStatus::Unbounded || (lo.status == LpStatus::Optimal && lo.value < base)) {
                pts.push_back(lo.x);
                grew = true;
                break;
            }
        }
        if (!grew) return int(pts.size()) - 1;
    }
}

struct VertexSet {
    std::vector<std::vector<Rat>> v;
};

// Exact vertex enumeration (bounded polytopes). Enumerates independent tight-row
// subsets with incremental rank pruning.
inline VertexSet vertices(const HPolytope& p) {
    const std::size_t n = p.dim();
    // boundedness check
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<Rat> c(n, Rat(0));
        c[j] = 1;
        if (lp_solve(p, c, LpSense::Max).status == LpStatus::Unbounded ||
            lp_solve(p, c, LpSense::Min).status == LpStatus::Unbounded)
            throw std::domain_error("vertices: polytope is unbounded");
    }
    // Inequality rows: A rows plus nonnegativity rows (-x_j <= 0).
    std::vector<std::vector<Rat>> rows;
    std::vector<Rat> rhs;
    for (std::size_t i = 0; i < p.A.rows(); ++i) {
        rows.push_back(p.A.row(i));
        rhs.push_back(p.b[i]);
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (!p.nonneg[j]) continue;
        std::vector<Rat> r(n, Rat(0));
        r[j] = -1;
        rows.push_back(r);
        rhs.push_back(Rat(0));
    }
    std::size_t eq_rank = rank_of(p.E);
    if (eq_rank > n) throw std::logic_error("vertices: bad equality system");
    std::size_t need = n - eq_rank;

    std::set<std::vector<Rat>> found;
    std::vector<std::size_t> chosen;
    // recursive enumeration with rank pruning
    std::vector<std::vector<Rat>> stack_rows;
    for (std::size_t i = 0; i < p.E.rows(); ++i) stack_rows.push_back(p.E.row(i));

    auto current_rank = [&]() {
        return rank_of(QMat::from_rows(stack_rows));
    };

    std::function<void(std::size_t)> rec = [&](std::size_t start) {
        if (chosen.size() == need) {
            QMat sys(p.E.rows() + need, n);
            std::vector<Rat> srhs(p.E.rows() + need);
            for (std::size_t i = 0; i < p.E.rows(); ++i) {
                for (std::size_t j = 0; j < n; ++j) sys(i, j) = p.E(i, j);
                srhs[i] = p.e[i];
            }
            for (std::size_t k = 0; k < need; ++k) {
                for (std::size_t j = 0; j < n; ++j) sys(p.E.rows() + k, j) = rows[chosen[k]][j];
                srhs[p.E.rows() + k] = rhs[chosen[k]];
            }
            if (rank_of(sys) < n) return;
            auto x = solve_linear(sys, srhs);
            if (!x) return;
            if (p.contains(*x)) found.insert(*x);
            return;
        }
        for (std::size_t i = start; i + (need - chosen.size()) <= rows.size(); ++i) {
            stack_rows.push_back(rows[i]);
            // accept row i only when it increases the rank of the tight system
            if (current_rank() == eq_rank + chosen.size() + 1) {
                chosen.push_back(i);
                rec(i + 1);
                chosen.pop_back();
            }
            stack_rows.pop_back();
        }
    };
    rec(0);

    VertexSet vs;
    vs.v.assign(found.begin(), found.end());
    return vs;
}

namespace detail {

inline int affine_dim_of_points(const std::vector<std::vector<Rat>>& v) {
    if (v.empty()) return -1;
    QMat d(v.size() - 1, v[0].size());
    for (std::size_t i = 1; i < v.size(); ++i)
        for (std::size_t j = 0; j < v[0].size(); ++j) d(i - 1, j) = v[i][j] - v[0][j];
    return int(rank_of(d));
}

// Recursive triangulation of conv(verts) of affine dimension `dim` inside R^n.
// Emits simplices as (dim+1)-tuples of vertex indices into `verts`.
inline void triangulate_rec(const std::vector<std::vector<Rat>>& verts,
                            std::vector<std::size_t> active, int dim,
                            std::vector<std::vector<std::size_t>>& out) {
    if (int(active.size()) == dim + 1) {
        out.push_back(active);
        return;
    }
    // Find facets: supporting hyperplanes of the point set within its affine hull.
    // Enumerate (dim)-subsets spanning a (dim-1)-affine hull and test support.
    // To keep this tractable we use the double-description-free classic: pick the
    // lexicographically smallest active vertex as apex; every facet not containing
    // the apex is triangulated recursively.
    std::size_t apex = active[0];
    for (auto i : active)
        if (verts[i] < verts[apex]) apex = i;

    const std::size_t n = verts[0].size();
    std::set<std::vector<std::size_t>> facets;
    // candidate normals from (dim-1)-dimensional affine subsets: use pairs of
    // points to build hyperplanes via rank computations over all subsets of size dim.
    std::vector<std::size_t> idx(active.begin(), active.end());
    std::vector<std::size_t> comb;
    std::function<void(std::size_t)> pick = [&](std::size_t start) {
        if (comb.size() == std::size_t(dim)) {
            // hyperplane through these dim points within the hull (if they span dim-1)
            QMat m(dim - 1 >= 0 ? comb.size() - 1 : 0, n);
            for (std::size_t i = 1; i < comb.size(); ++i)
                for (std::size_t j = 0; j < n; ++j)
                    m(i - 1, j) = verts[comb[i]][j] - verts[comb[0]][j];
            if (int(rank_of(m)) != dim - 1) return;
            // find a linear functional separating: solve for phi with phi⋅(p_i-p_0)=0
            // and classify remaining active points by sign of phi⋅(x - p0).
            // Build nullspace-like functional within the affine hull: we test support
            // by checking whether all active points lie (weakly) on one side of the
            // affine hull of comb, measured inside aff(active).
            // Use rank trick: x on hyperplane iff rank unchanged after appending x-p0.
            std::vector<std::size_t> on;
            std::vector<std::vector<Rat>> base_rows;
            for (std::size_t i = 1; i < comb.size(); ++i) {
                std::vector<Rat> r(n);
                for (std::size_t j = 0; j < n; ++j) r[j] = verts[comb[i]][j] - verts[comb[0]][j];
                base_rows.push_back(r);
            }
            // A functional phi on R^n vanishing on base_rows and not on aff(active):
            // compute via solving on the subspace spanned by active points.
            // Determine sign pattern instead through determinants:
            // sign_i = orientation det of (base_rows, x_i - p0, complement basis fixed).
            // Simpler: project onto aff(active) coordinates first.
            // Build coordinates: basis B of aff(active) directions.
            std::vector<std::vector<Rat>> dirs;
            for (auto i : active) {
                if (i == active[0]) continue;
                std::vector<Rat> r(n);
                for (std::size_t j = 0; j < n; ++j) r[j] = verts[i][j] - verts[active[0]][j];
                dirs.push_back(r);
            }
            // orthogonal-free approach: choose coordinate subset where projection of
            // dirs has full rank `dim`; work in those coordinates.
            QMat dm = QMat::from_rows(dirs);
            std::vector<std::size_t> coords;
            {
                QMat red = dm;
                std::size_t r = 0;
                for (std::size_t c = 0; c < n && r < red.rows(); ++c) {
                    std::size_t piv = r;
                    while (piv < red.rows() && red(piv, c) == 0) ++piv;
                    if (piv == red.rows()) continue;
                    for (std::size_t j = 0; j < n; ++j) std::swap(red(r, j), red(piv, j));
                    for (std::size_t i2 = 0; i2 < red.rows(); ++i2) {
                        if (i2 == r || red(i2, c) == 0) continue;
                        Rat f = red(i2, c) / red(r, c);
                        for (std::size_t j = c; j < n; ++j) red(i2, j) -= f * red(r, j);
                    }
                    coords.push_back(c);
                    ++r;
                }
            }
            if (int(coords.size()) != dim) return;
            auto proj = [&](std::size_t vi) {
                std::vector<Rat> q(coords.size());
                for (std::size_t k = 0; k < coords.size(); ++k) q[k] = verts[vi][coords[k]];
                return q;
            };
            // plane through proj(comb[*]) in R^dim: normal via det expansion
            // normal n with n·(proj(x)-proj(comb0)) sign test; compute n by solving.
            QMat pm(std::size_t(dim) - 1, std::size_t(dim));
            auto q0 = proj(comb[0]);
            for (std::size_t i = 1; i < comb.size(); ++i) {
                auto qi = proj(comb[i]);
                for (int j = 0; j < dim; ++j) pm(i - 1, std::size_t(j)) = qi[std::size_t(j)] - q0[std::size_t(j)];
            }
            // nullspace vector of pm (dim-1 x dim): 1-dimensional
            std::vector<Rat> normal(std::size_t(dim), Rat(0));
            {
                QMat red = pm;
                std::vector<std::ptrdiff_t> pivcol(std::size_t(dim), -1);
                std::size_t r = 0;
                for (std::size_t c = 0; c < std::size_t(dim) && r < red.rows(); ++c) {
                    std::size_t piv = r;
                    while (piv < red.rows() && red(piv, c) == 0) ++piv;
                    if (piv == red.rows()) continue;
                    for (std::size_t j = 0; j < std::size_t(dim); ++j) std::swap(red(r, j), red(piv, j));
                    for (std::size_t i2 = 0; i2 < red.rows(); ++i2) {
                        if (i2 == r || red(i2, c) == 0) continue;
                        Rat f = red(i2, c) / red(r, c);
                        for (std::size_t j = c; j < std::size_t(dim); ++j) red(i2, j) -= f * red(r, j);
                    }
                    pivcol[c] = std::ptrdiff_t(r);
                    ++r;
                }
                std::size_t freec = std::size_t(dim);
                for (std::size_t c = 0; c < std::size_t(dim); ++c)
                    if (pivcol[c] < 0) { freec = c; break; }
                if (freec == std::size_t(dim)) return;
                normal[freec] = 1;
                for (std::size_t c = 0; c < std::size_t(dim); ++c)
                    if (pivcol[c] >= 0 && red(std::size_t(pivcol[c]), c) != 0)
                        normal[c] = -red(std::size_t(pivcol[c]), freec) / red(std::size_t(pivcol[c]), c);
            }
            int pos = 0, neg = 0;
            std::vector<std::size_t> tight;
            for (auto i : active) {
                auto qi = proj(i);
                Rat s = 0;
                for (int j = 0; j < dim; ++j) s += normal[std::size_t(j)] * (qi[std::size_t(j)] - q0[std::size_t(j)]);
                if (s > 0) ++pos;
                else if (s < 0) ++neg;
                else tight.push_back(i);
            }
            if (pos > 0 && neg > 0) return;  // not supporting
            std::sort(tight.begin(), tight.end());
            if (int(tight.size()) < dim) return;
            facets.insert(tight);
            return;
        }
        for (std::size_t i = start; i < idx.size(); ++i) {
            comb.push_back(idx[i]);
            pick(i + 1);
            comb.pop_back();
        }
    };
    pick(0);

    for (const auto& f : facets) {
        if (std::find(f.begin(), f.end(), apex) != f.end()) continue;
        std::vector<std::vector<std::size_t>> sub;
        // facet affine dim is dim-1: it contains a spanning comb by construction
        triangulate_rec(verts, f, dim - 1, sub);
        for (auto& s : sub) {
            s.push_back(apex);
            out.push_back(s);
        }
    }
}

}  // namespace detail

// Exact Lebesgue volume of P in its ambient coordinates. Requires bounded P.
// Returns 0 when dim(P) < ambient dimension. Ambient dimension 0 => volume 1
// when feasible (point-mass convention), 0 otherwise.
inline Rat volume(const HPolytope& p) {
    const std::size_t n = p.dim();
    if (n == 0) {
        auto f = lp_solve(p, {}, LpSense::Feasibility);
        return f.status == LpStatus::Optimal ? Rat(1) : Rat(0);
    }
    auto vs = vertices(p);  // throws when unbounded
    if (vs.v.empty()) return Rat(0);
    if (detail::affine_dim_of_points(vs.v) < int(n)) return Rat(0);
    std::vector<std::size_t> all(vs.v.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    std::vector<std::vector<std::size_t>> simplices;
    detail::triangulate_rec(vs.v, all, int(n), simplices);
    Rat total = 0;
    Int nfact = 1;
    for (std::size_t k = 2; k <= n; ++k) nfact *= Int(k);
    for (const auto& s : simplices) {
        QMat m(n, n);
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i - 1, j) = vs.v[s[i]][j] - vs.v[s[0]][j];
        Rat d = det(m);
        if (d < 0) d = -d;
        total += d / Rat(nfact);
    }
    return total;
}

}  // namespace mtw
