#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mtw/height.hpp"
#include "mtw/polytope.hpp"
#include "mtw/variety.hpp"

namespace mtw {

// Parameters entering the finite checks: zeta, lambda, mu, nu, beta, tau vectors.
struct AnalyticParams {
    std::vector<Rat> zeta;   // (zeta_1..zeta_k), zeta_i > 0, sum 1, h_ij zeta_i < 1
    Rat lambda;              // 1 / (700 (sum h_ij)^2)
    Rat mu;                  // 1 - 1/h_{3,J3} (sorted chain), in [0,1)
    int nu = 0;              // largest j with h_{3j} = 1 after sorting (0 if none)
    std::vector<Rat> beta;   // (beta_1..beta_k)
    std::vector<Rat> tau1;   // (1 - h_ij zeta''_i)_ij, flat order
    std::vector<Rat> tau2;   // per-fixture table or user override, flat order
};

inline std::vector<Rat> one_minus_h_zeta(const VarietySpec& spec, const std::vector<Rat>& zeta) {
    std::vector<Rat> t(spec.var_count(), Rat(1));
    for (int i = 1; i <= spec.k(); ++i)
        for (int j = 1; j <= int(spec.group_size(i)); ++j)
            t[spec.flat_index({i, j})] = 1 - Rat(spec.var({i, j}).h) * zeta[std::size_t(i - 1)];
    return t;
}

// Default parameter choices for type-T specs (k = 3, h_1 = h_2 = (1,1)).
inline AnalyticParams default_params(const VarietySpec& spec) {
    if (!spec.is_type_t())
        throw std::domain_error("default_params: spec is not of type T (2x2 determinant + monomial)");
    AnalyticParams p;
    p.zeta = {Rat(1, 3), Rat(1, 3), Rat(1, 3)};
    long hsum = 0;
    for (int i = 1; i <= spec.k(); ++i)
        for (const auto& v : spec.groups[std::size_t(i)]) hsum += v.h;
    p.lambda = Rat(1, 700 * hsum * hsum);
    auto h3 = spec.h_chain(3);
    std::sort(h3.begin(), h3.end());
    long h3max = h3.back();
    p.mu = 1 - Rat(1, h3max);
    p.nu = 0;
    for (std::size_t j = 0; j < h3.size(); ++j)
        if (h3[j] == 1) p.nu = int(j) + 1;
    long hmax = spec.max_h();
    p.beta = {Rat(1, 2) - Rat(1, 5 * hmax), Rat(1, 2) - Rat(1, 5 * hmax), Rat(2, 5 * hmax)};
    // tau1 per the zeta'' rule: (1/3,1/3,1/3) when max h3 = 1, else (1/2,1/2,0).
    std::vector<Rat> zpp = h3max == 1 ? std::vector<Rat>{Rat(1, 3), Rat(1, 3), Rat(1, 3)}
                                      : std::vector<Rat>{Rat(1, 2), Rat(1, 2), Rat(0)};
    p.tau1 = one_minus_h_zeta(spec, zpp);
    // tau2 default table: group-0 entries 1; groups 1,2 entries 2/3 when all h = 1
    // (then tau2 = (1-h/3)); otherwise 1/2 on groups 1,2 and on unit-exponent
    // group-3 entries filling the sorted-chain budget, 3/4 when nu >= 3, 1 beyond.
    const std::size_t J = spec.var_count();
    p.tau2.assign(J, Rat(1));
    if (h3max == 1) {
        for (int i = 1; i <= 3; ++i)
            for (int j = 1; j <= int(spec.group_size(i)); ++j)
                p.tau2[spec.flat_index({i, j})] = Rat(2, 3);
    } else {
        for (int i = 1; i <= 2; ++i)
            for (int j = 1; j <= int(spec.group_size(i)); ++j)
                p.tau2[spec.flat_index({i, j})] = Rat(1, 2);
        // group 3, in the spec's stored order; unit-exponent variables first get
        // tau = 1/2 (nu <= 2) or 3/4 (nu = 4 case of the sixfold), others 1.
        std::vector<int> unit_pos;
        for (int j = 1; j <= int(spec.group_size(3)); ++j)
            if (spec.var({3, j}).h == 1) unit_pos.push_back(j);
        Rat val = unit_pos.size() >= 3 ? Rat(3, 4) : Rat(1, 2);
        for (int j : unit_pos) p.tau2[spec.flat_index({3, j})] = val;
    }
    return p;
}

inline void validate_params(const VarietySpec& spec, const AnalyticParams& p) {
    Rat s = 0;
    for (const auto& z : p.zeta) {
        if (z <= 0) throw std::domain_error("zeta must be positive");
        s += z;
    }
    if (s != 1) throw std::domain_error("zeta must sum to 1");
    for (int i = 1; i <= spec.k(); ++i)
        for (const auto& v : spec.groups[std::size_t(i)])
            if (Rat(v.h) * p.zeta[std::size_t(i - 1)] >= 1)
                throw std::domain_error("zeta violates h_ij zeta_i < 1");
}

// ---- polytopes of the linear program checks ----

// P = { psi >= 0 : A1^T psi <= 1 }.
inline HPolytope polytope_P(const HeightSystem& hs) {
    HPolytope p = HPolytope::make(hs.J);
    p.nonneg.assign(hs.J, true);
    for (std::size_t nu = 0; nu < hs.N; ++nu) {
        std::vector<Rat> row(hs.J);
        for (std::size_t i = 0; i < hs.J; ++i) row[i] = hs.A1(i, nu);
        p.add_le(row, Rat(1));
    }
    return p;
}

inline HPolytope polytope_P_ij(const HeightSystem& hs, const VarietySpec& spec, VarIndex ij) {
    HPolytope p = polytope_P(hs);
    std::vector<Rat> row(hs.J, Rat(0));
    row[spec.flat_index(ij)] = 1;
    p.add_eq(row, Rat(0));
    return p;
}

// P(lambda, pi): psi in P with ordered block sums
//   sum_j psi_{pi(1),j} h <= ... <= sum_j psi_{pi(k),j} h and first <= (1-lambda) last.
inline HPolytope polytope_P_lambda(const HeightSystem& hs, const VarietySpec& spec,
                                   const Rat& lambda, const std::vector<int>& pi) {
    HPolytope p = polytope_P(hs);
    auto block = [&](int i) {
        std::vector<Rat> row(hs.J, Rat(0));
        for (int j = 1; j <= int(spec.group_size(i)); ++j)
            row[spec.flat_index({i, j})] = Rat(spec.var({i, j}).h);
        return row;
    };
    for (std::size_t t = 0; t + 1 < pi.size(); ++t) {
        auto lo = block(pi[t]), hi = block(pi[t + 1]);
        std::vector<Rat> row(hs.J);
        for (std::size_t c = 0; c < hs.J; ++c) row[c] = lo[c] - hi[c];
        p.add_le(row, Rat(0));
    }
    auto first = block(pi.front()), last = block(pi.back());
    std::vector<Rat> row(hs.J);
    for (std::size_t c = 0; c < hs.J; ++c) row[c] = first[c] - (1 - lambda) * last[c];
    p.add_le(row, Rat(0));
    return p;
}

inline HPolytope with_hyperplane(HPolytope p, const std::vector<Rat>& tau) {
    p.add_eq(tau, Rat(1));
    return p;
}

// ---- individual checks ----

struct C1Result {
    bool pass = true;
    std::vector<Rat> margins;  // per coprimality set: sum - 1, must be > 0
};

inline C1Result check_C1(const std::vector<Rat>& eta, const VarietySpec& spec) {
    C1Result r;
    for (const auto& set : spec.coprimality) {
        Rat s = 0;
        for (const auto& vi : set) s += eta[spec.flat_index(vi)];
        r.margins.push_back(s - 1);
        if (s - 1 <= 0) r.pass = false;
    }
    return r;
}

struct C2Result {
    bool pass = false;
    Rat optimum;
};

inline C2Result check_C2(const std::vector<Rat>& tau, const HeightSystem& hs) {
    auto p = polytope_P(hs);
    auto res = lp_solve(p, tau, LpSense::Max);
    C2Result r;
    if (res.status != LpStatus::Optimal) return r;  // unbounded => fail with certificate absent
    r.optimum = res.value;
    r.pass = res.value == 1;
    return r;
}

struct C3Result {
    bool pass = true;
    int dim_P = -1;
    std::map<std::string, int> dim_P_ij;                // keyed "(i,j)"
    std::map<std::string, int> dim_P_lambda;            // keyed by permutation "abc"
};

inline std::vector<std::vector<int>> permutations_k(int k) {
    std::vector<int> base(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) base[std::size_t(i)] = i + 1;
    std::vector<std::vector<int>> out;
    do out.push_back(base);
    while (std::next_permutation(base.begin(), base.end()));
    return out;
}

inline C3Result check_C3(const std::vector<Rat>& tau, const Rat& lambda, const HeightSystem& hs,
                         const VarietySpec& spec) {
    C3Result r;
    r.dim_P = affine_dim(with_hyperplane(polytope_P(hs), tau));
    if (r.dim_P > hs.c2) r.pass = false;
    for (const auto& ij : spec.var_order()) {
        int d = affine_dim(with_hyperplane(polytope_P_ij(hs, spec, ij), tau));
        r.dim_P_ij[ij.str()] = d;
        if (d > hs.c2 - 1) r.pass = false;
    }
    for (const auto& pi : permutations_k(spec.k())) {
        std::string key;
        for (int v : pi) key += std::to_string(v);
        int d = affine_dim(with_hyperplane(polytope_P_lambda(hs, spec, lambda, pi), tau));
        r.dim_P_lambda[key] = d;
        if (d > hs.c2 - 1) r.pass = false;
    }
    return r;
}

struct SigmaResult {
    bool pass = false;
    std::vector<Rat> sigma;       // strictly positive witness when pass
    Rat min_coordinate;           // achieved max-min coordinate
};

// Solve (A1; A3) sigma = (1 - h_ij zeta_i, 1)^T with sigma > 0 by maximizing the
// minimum coordinate. zeta_0 enters only formally (h_0j = 0).
inline SigmaResult check_sigma_positive(const HeightSystem& hs, const VarietySpec& spec,
                                        const std::vector<Rat>& zeta) {
    const std::size_t N = hs.N;
    // variables: sigma_1..sigma_N, t;  maximize t subject to sigma_nu - t >= 0,
    // equality rows, and t <= 1 to keep the LP bounded.
    HPolytope p = HPolytope::make(N + 1);
    for (std::size_t j = 0; j < N; ++j) p.nonneg[j] = true;
    p.nonneg[N] = true;
    auto tau = one_minus_h_zeta(spec, zeta);
    for (std::size_t i = 0; i < hs.J; ++i) {
        std::vector<Rat> row(N + 1, Rat(0));
        for (std::size_t nu = 0; nu < N; ++nu) row[nu] = hs.A1(i, nu);
        p.add_eq(row, tau[i]);
    }
    {
        std::vector<Rat> row(N + 1, Rat(1));
        row[N] = 0;
        p.add_eq(row, Rat(1));
    }
    for (std::size_t nu = 0; nu < N; ++nu) {
        std::vector<Rat> row(N + 1, Rat(0));
        row[nu] = -1;
        row[N] = 1;
        p.add_le(row, Rat(0));  // t <= sigma_nu
    }
    {
        std::vector<Rat> row(N + 1, Rat(0));
        row[N] = 1;
        p.add_le(row, Rat(1));
    }
    std::vector<Rat> obj(N + 1, Rat(0));
    obj[N] = 1;
    auto res = lp_solve(p, obj, LpSense::Max);
    SigmaResult out;
    if (res.status != LpStatus::Optimal) return out;
    out.min_coordinate = res.value;
    if (res.value > 0) {
        out.pass = true;
        out.sigma.assign(res.x.begin(), res.x.begin() + std::ptrdiff_t(N));
    }
    return out;
}

// (fail): max h = 1, or no S_rho is a 2-element subset of groups {1,2}.
inline bool check_fail_condition(const VarietySpec& spec) {
    if (spec.max_h() == 1) return true;
    for (const auto& set : spec.coprimality) {
        if (set.size() != 2) continue;
        bool all12 = true;
        for (const auto& vi : set)
            if (vi.i != 1 && vi.i != 2) all12 = false;
        if (all12) return false;
    }
    return true;
}

struct BetaJResult {
    bool pass = true;
    Rat delta4;  // min over rho of (sum (1 - beta_i h_ij)) - 1, must be > 0
};

inline BetaJResult check_beta_and_J(const VarietySpec& spec, const AnalyticParams& p) {
    BetaJResult r;
    bool first = true;
    for (int i = 1; i <= spec.k(); ++i)
        for (const auto& v : spec.groups[std::size_t(i)])
            if (p.beta[std::size_t(i - 1)] * Rat(v.h) > 1) r.pass = false;
    for (const auto& set : spec.coprimality) {
        Rat s = 0;
        for (const auto& vi : set) {
            Rat bh = vi.i == 0 ? Rat(0) : p.beta[std::size_t(vi.i - 1)] * Rat(spec.var(vi).h);
            s += 1 - bh;
        }
        Rat margin = s - 1;
        if (first || margin < r.delta4) r.delta4 = margin;
        first = false;
        if (margin <= 0) r.pass = false;
    }
    if (first) r.delta4 = 1;  // no coprimality conditions: vacuous
    for (int i = 1; i <= spec.k(); ++i)
        if (p.zeta[std::size_t(i - 1)] >= Rat(1, 2) && spec.group_size(i) < 2) r.pass = false;
    return r;
}

// Aggregated verdict over every finite check required by the main theorem.
struct HypothesisReport {
    bool valid_spec = true;
    std::vector<std::string> validation;
    bool rank_1c = false;
    SigmaResult sigma;
    C1Result c1_tau1;
    bool fail_condition = false;
    BetaJResult beta_j;
    // per tau vector: C2 and C3
    struct TauChecks {
        std::string label;
        C2Result c2;
        C3Result c3;
    };
    std::vector<TauChecks> taus;
    bool verdict = false;
};

inline HypothesisReport full_report(const VarietySpec& spec,
                                    std::optional<std::vector<Rat>> tau2_override = std::nullopt) {
    HypothesisReport rep;
    rep.validation = validate_spec(spec);
    rep.valid_spec = rep.validation.empty();
    if (!rep.valid_spec) return rep;

    auto a1 = derive_height_matrix(spec);
    HeightSystem hs;
    try {
        hs = assemble_block_matrix(spec, a1);
        rep.rank_1c = true;
    } catch (const std::domain_error&) {
        rep.rank_1c = false;
        return rep;
    }
    auto params = default_params(spec);
    if (tau2_override) params.tau2 = *tau2_override;
    validate_params(spec, params);

    rep.sigma = check_sigma_positive(hs, spec, params.zeta);
    rep.c1_tau1 = check_C1(params.tau1, spec);
    rep.fail_condition = check_fail_condition(spec);
    rep.beta_j = check_beta_and_J(spec, params);

    auto tau_a = one_minus_h_zeta(spec, params.zeta);
    for (const auto& [label, tau] :
         std::vector<std::pair<std::string, std::vector<Rat>>>{{"1-h/3", tau_a}, {"tau2", params.tau2}}) {
        HypothesisReport::TauChecks tc;
        tc.label = label;
        tc.c2 = check_C2(tau, hs);
        tc.c3 = check_C3(tau, params.lambda, hs, spec);
        rep.taus.push_back(std::move(tc));
    }
    rep.verdict = rep.rank_1c && rep.sigma.pass && rep.fail_condition && rep.beta_j.pass;
    for (const auto& tc : rep.taus) rep.verdict = rep.verdict && tc.c2.pass && tc.c3.pass;
    return rep;
}

}  // namespace mtw
