#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "mtw/densities.hpp"
#include "mtw/height.hpp"
#include "mtw/hypotheses.hpp"
#include "mtw/montecarlo.hpp"
#include "mtw/polytope.hpp"

namespace mtw {

// c* = vol{ r in [0,inf)^{J-R} : b_l - sum_i r_i B_{il} >= 0 for all l }, exact.
inline Rat c_star(const HeightSystem& hs, const RowBasis& rb) {
    const std::size_t d = rb.rest_flat.size();  // J - R
    const std::size_t R = std::size_t(hs.R);
    if (d == 0) {
        for (const auto& bl : rb.b)
            if (bl < 0) return Rat(0);
        return Rat(1);
    }
    HPolytope p = HPolytope::make(d);
    p.nonneg.assign(d, true);
    for (std::size_t l = 0; l < R; ++l) {
        std::vector<Rat> row(d);
        for (std::size_t i = 0; i < d; ++i) row[i] = rb.B(i, l);
        p.add_le(row, rb.b[l]);
    }
    try {
        return volume(p);
    } catch (const std::domain_error&) {
        throw std::domain_error("c_star: region is unbounded (invalid basis/hypotheses)");
    }
}

struct ConstantsReport {
    std::string spec_name;
    Rat cstar;
    EulerProduct cfin;
    MCResult cinf;
    int rank_pic = 0;
    int c2 = 0;
    double peyre = 0;
    double relative_error = 0;  // MC + Euler tail, combined
    std::vector<VarIndex> basis;
};

// Assembles 2^{-rank Pic} * c* * c_fin * c_inf with propagated error bars.
inline ConstantsReport peyre_constant(const VarietySpec& spec, long prime_cutoff = 100,
                                      int l_cap = 6, MCConfig mc = {}) {
    ConstantsReport rep;
    rep.spec_name = spec.name;
    rep.rank_pic = spec.rank_pic;
    auto a1 = derive_height_matrix(spec);
    auto hs = assemble_block_matrix(spec, a1);
    rep.c2 = hs.c2;
    auto rb = select_row_basis(hs, spec);
    rep.basis = rb.I;
    rep.cstar = c_star(hs, rb);
    rep.cfin = c_fin(spec, prime_cutoff, l_cap);
    rep.cinf = c_infinity(spec, hs, rb, mc);
    double scale = std::pow(2.0, -double(spec.rank_pic));
    rep.peyre = scale * to_double(rep.cstar) * rep.cfin.value * rep.cinf.value;
    double rel_mc = rep.cinf.value != 0 ? rep.cinf.stderr_est / std::abs(rep.cinf.value) : 0.0;
    rep.relative_error = rel_mc + rep.cfin.tail_relative;
    return rep;
}

// A second admissible row basis, for the (c* x c_inf) invariance check: the
// lexicographically smallest independent basis with the solitary-(1,1) property
// that differs from `avoid`.
inline std::optional<RowBasis> alternate_row_basis(const HeightSystem& hs, const VarietySpec& spec,
                                                   const RowBasis& avoid) {
    const std::size_t J = hs.J, R = std::size_t(hs.R);
    QMat a12 = hs.A12();
    std::size_t i11 = spec.flat_index({1, 1});
    std::size_t i12 = spec.group_size(1) >= 2 ? spec.flat_index({1, 2}) : std::size_t(-1);
    std::vector<std::size_t> comb;
    std::optional<std::vector<std::size_t>> found;
    std::function<bool(std::size_t)> rec = [&](std::size_t start) -> bool {
        if (comb.size() == R) {
            if (std::find(comb.begin(), comb.end(), i11) == comb.end()) return false;
            if (std::find(comb.begin(), comb.end(), i12) != comb.end()) return false;
            if (comb == avoid.basis_flat) return false;
            std::vector<std::vector<Rat>> rows;
            for (auto i : comb) rows.push_back(a12.row(i));
            if (rank_of(QMat::from_rows(rows)) != R) return false;
            found = comb;
            return true;
        }
        for (std::size_t i = start; i + (R - comb.size()) <= J; ++i) {
            comb.push_back(i);
            if (rec(i + 1)) return true;
            comb.pop_back();
        }
        return false;
    };
    if (!rec(0)) return std::nullopt;

    RowBasis rb;
    rb.basis_flat = *found;
    auto order = spec.var_order();
    for (auto i : *found) rb.I.push_back(order[i]);
    for (std::size_t i = 0; i < J; ++i)
        if (std::find(found->begin(), found->end(), i) == found->end()) rb.rest_flat.push_back(i);
    std::vector<std::vector<Rat>> rows;
    for (auto i : *found) rows.push_back(a12.row(i));
    QMat basis_rows = QMat::from_rows(rows);
    rb.B = QMat(J - R, R);
    for (std::size_t t = 0; t < rb.rest_flat.size(); ++t) {
        auto c = express_in_row_span(basis_rows, a12.row(rb.rest_flat[t]));
        if (!c) return std::nullopt;
        for (std::size_t l = 0; l < R; ++l) rb.B(t, l) = (*c)[l];
    }
    auto cb = express_in_row_span(basis_rows, hs.A34());
    if (!cb) return std::nullopt;
    rb.b = *cb;
    rb.simplifying = true;
    return rb;
}

}  // namespace mtw
