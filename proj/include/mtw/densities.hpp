#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mtw/rational.hpp"
#include "mtw/variety.hpp"

namespace mtw {

inline std::vector<long> primes_up_to(long n) {
    std::vector<bool> is(std::size_t(std::max(n + 1, 2L)), true);
    std::vector<long> ps;
    for (long i = 2; i <= n; ++i) {
        if (!is[std::size_t(i)]) continue;
        ps.push_back(i);
        for (long j = i * i; j <= n; j += i) is[std::size_t(j)] = false;
    }
    return ps;
}

namespace detail {

inline Int phi_prime_power(long p, int l) {
    if (l == 0) return 1;
    return ipow(Int(p), unsigned(l)) - ipow(Int(p), unsigned(l - 1));
}

// #{ (x_1..x_m) mod p^e : prod x_j^{g_j} == 0 mod p^e }, exact.
inline Int count_zero_products(long p, int e, const std::vector<long>& g, std::size_t j = 0,
                               long need = -1) {
    if (need < 0) need = e;
    if (e == 0) return 1;
    if (need <= 0) return ipow(Int(p), unsigned(e * int(g.size() - j)));
    if (j == g.size()) return 0;
    Int s = 0;
    for (int v = 0; v <= e; ++v) {
        Int cnt = v < e ? phi_prime_power(p, e - v) : Int(1);
        s += cnt * count_zero_products(p, e, g, j + 1, need - g[j] * v);
    }
    return s;
}

// E(p^m, a; chain) for a coprime to p; exact rational. Requires the chain to
// contain an exponent-1 entry (all torsor chains here do).
inline Rat gauss_E_unit(long p, int m, std::vector<long> chain) {
    if (m == 0) return Rat(1);
    std::sort(chain.begin(), chain.end());
    if (chain.front() != 1)
        throw std::domain_error("local density: torsor chain without a unit exponent is unsupported");
    std::vector<long> rest(chain.begin() + 1, chain.end());
    if (rest.empty()) return Rat(0);
    return Rat(count_zero_products(p, m, rest), ipow(Int(p), unsigned(m * int(rest.size()))));
}

}  // namespace detail

// Local density of the torsor equation with p-coprimality conditions; exact.
struct LocalDensity {
    long p = 0;
    int stabilization_level = -1;  // L*: levels beyond it contribute zero
    bool geometric_tail = false;   // true when the tail was summed as an exact geometric series
    Rat c_p;
    std::vector<Rat> partial;                       // c_p(L), L = 0..levels computed
    std::vector<std::pair<std::uint64_t, Rat>> alpha_terms;  // (mask, signed prefactor)
};

// Per-alpha normalized level increment:
//   W_alpha(p^l) = phi(p^l) * prod_i E_i(p^{max(l-d_i,0)}, unit; h_i)
// where d_i shifts come from the p-marked variables of S(alpha) and from v_p(b_i).
inline LocalDensity local_density(const VarietySpec& spec, long p, int l_cap = 6) {
    if (p < 2) throw std::invalid_argument("local_density: p must be prime");
    const int k = spec.k();
    std::vector<std::vector<long>> chains;
    for (int i = 1; i <= k; ++i) chains.push_back(spec.h_chain(i));
    std::vector<int> bval(std::size_t(k), 0);
    for (int i = 0; i < k; ++i) {
        long b = std::abs(spec.coefficients[std::size_t(i)]);
        while (b % p == 0) {
            b /= p;
            ++bval[std::size_t(i)];
        }
    }
    const std::size_t r = spec.coprimality.size();
    if (r > 20) throw std::domain_error("local_density: too many coprimality conditions");

    LocalDensity out;
    out.p = p;
    struct AlphaData {
        Rat pref;
        std::vector<long> dshift;
    };
    std::vector<AlphaData> alphas;
    for (std::uint64_t mask = 0; mask < (1ull << r); ++mask) {
        std::set<VarIndex> marked;
        int bits = 0;
        for (std::size_t t = 0; t < r; ++t)
            if (mask >> t & 1ull) {
                ++bits;
                for (const auto& vi : spec.coprimality[t]) marked.insert(vi);
            }
        Rat pref = Rat(bits % 2 == 0 ? 1 : -1, ipow(Int(p), unsigned(marked.size())));
        std::vector<long> d(std::size_t(k), 0);
        for (const auto& vi : marked)
            if (vi.i >= 1) d[std::size_t(vi.i - 1)] += spec.var(vi).h;
        for (int i = 0; i < k; ++i) d[std::size_t(i)] += bval[std::size_t(i)];
        alphas.push_back({pref, d});
        out.alpha_terms.push_back({mask, pref});
    }

    std::vector<Rat> deltas;
    Rat cp = 0;
    for (int l = 0; l <= l_cap; ++l) {
        Rat dw = 0;
        for (const auto& a : alphas) {
            Rat w = Rat(detail::phi_prime_power(p, l));
            for (int i = 0; i < k; ++i)
                w *= detail::gauss_E_unit(p, std::max(l - int(a.dshift[std::size_t(i)]), 0),
                                          chains[std::size_t(i)]);
            dw += a.pref * w;
        }
        cp += dw;
        deltas.push_back(dw);
        out.partial.push_back(cp);
    }
    // stationarity: smallest L with zero increments afterwards (need >= 2 zero levels)
    int lstar = -1;
    for (int l = 0; l + 2 <= l_cap; ++l) {
        bool allz = true;
        for (int t = l + 1; t <= l_cap; ++t)
            if (deltas[std::size_t(t)] != 0) allz = false;
        if (allz) {
            lstar = l;
            break;
        }
    }
    if (lstar >= 0) {
        out.stabilization_level = lstar;
        out.c_p = out.partial[std::size_t(lstar)];
        return out;
    }
    // exact geometric tail (arises only without coprimality conditions)
    if (l_cap >= 3) {
        const Rat& w1 = deltas[std::size_t(l_cap - 2)];
        const Rat& w2 = deltas[std::size_t(l_cap - 1)];
        const Rat& w3 = deltas[std::size_t(l_cap)];
        if (w1 != 0 && w2 != 0 && w2 / w1 == w3 / w2) {
            Rat q = w2 / w1;
            if (abs(q) < 1) {
                out.geometric_tail = true;
                out.stabilization_level = l_cap;
                out.c_p = cp + w3 * q / (1 - q);
                return out;
            }
        }
    }
    throw std::domain_error("local_density: no stabilization by L_cap=" + std::to_string(l_cap) +
                            " for p=" + std::to_string(p) + " (raise the cap)");
}

struct EulerProduct {
    double value = 1.0;
    std::vector<LocalDensity> factors;
    double tail_relative = 0.0;  // estimated |log tail| from the a/p^2 fit, reported not applied
};

inline EulerProduct c_fin(const VarietySpec& spec, long prime_cutoff, int l_cap = 6) {
    EulerProduct ep;
    auto ps = primes_up_to(prime_cutoff);
    std::vector<double> fit_p, fit_v;
    for (long p : ps) {
        auto ld = local_density(spec, p, l_cap);
        if (ld.c_p <= 0) throw std::domain_error("c_fin: nonpositive local density at p=" + std::to_string(p));
        ep.value *= to_double(ld.c_p);
        if (10 * p >= prime_cutoff) {  // last decade of primes drives the tail fit
            fit_p.push_back(double(p));
            fit_v.push_back(std::log(to_double(ld.c_p)) * double(p) * double(p));
        }
        ep.factors.push_back(std::move(ld));
    }
    if (!fit_p.empty() && prime_cutoff >= 3) {
        double a = 0;
        for (double v : fit_v) a += v;
        a /= double(fit_v.size());
        // sum_{p > P} a/p^2 ~ a / (P log P)
        double tail = std::abs(a) / (double(prime_cutoff) * std::log(double(prime_cutoff)));
        ep.tail_relative = tail;
    }
    return ep;
}

}  // namespace mtw
