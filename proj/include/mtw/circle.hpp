#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include "mtw/densities.hpp"
#include "mtw/quadrature.hpp"
#include "mtw/variety.hpp"

namespace mtw {

struct ChainSpec {
    std::vector<long> h;  // exponents, all >= 1
    long b = 1;           // coefficient
};

using cplx = std::complex<double>;

namespace detail {

inline long gcd_long(long a, long b) {
    a = std::abs(a);
    b = std::abs(b);
    while (b) {
        long t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// counts of values of x^h mod q, x = 1..q
inline std::vector<std::uint64_t> power_counts(long q, long h) {
    std::vector<std::uint64_t> c(std::size_t(q), 0);
    for (long x = 1; x <= q; ++x) {
        long v = 1 % q;
        for (long t = 0; t < h; ++t) v = long((__int128)v * x % q);
        ++c[std::size_t(v % q)];
    }
    return c;
}

// multiplicative convolution of value-count vectors mod q
inline std::vector<std::uint64_t> mult_convolve(const std::vector<std::uint64_t>& a,
                                                const std::vector<std::uint64_t>& b, long q) {
    std::vector<std::uint64_t> c(std::size_t(q), 0);
    for (long v = 0; v < q; ++v) {
        if (!a[std::size_t(v)]) continue;
        for (long u = 0; u < q; ++u) {
            if (!b[std::size_t(u)]) continue;
            c[std::size_t(long((__int128)v * u % q))] += a[std::size_t(v)] * b[std::size_t(u)];
        }
    }
    return c;
}

inline std::vector<std::uint64_t> chain_value_counts(long q, const std::vector<long>& h) {
    auto c = power_counts(q, h[0]);
    for (std::size_t i = 1; i < h.size(); ++i) c = mult_convolve(c, power_counts(q, h[i]), q);
    return c;
}

inline long mobius(long n) {
    long m = 1;
    for (long p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        n /= p;
        if (n % p == 0) return 0;
        m = -m;
    }
    if (n > 1) m = -m;
    return m;
}

inline long euler_phi(long n) {
    long r = n;
    for (long p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        while (n % p == 0) n /= p;
        r -= r / p;
    }
    if (n > 1) r -= r / n;
    return r;
}

// Ramanujan sum c_q(m)
inline long ramanujan(long q, long m) {
    long g = gcd_long(q, m);
    long d = q / g;
    long mu = mobius(d);
    if (mu == 0) return 0;
    return mu * (euler_phi(q) / euler_phi(d));
}

}  // namespace detail

// E(q, a; h) = q^{-n} sum_x e(a x^h / q); exact counts, complex rounding only.
inline cplx gauss_sum(long q, long a, const ChainSpec& chain) {
    if (q < 1) throw std::invalid_argument("gauss_sum: q must be >= 1");
    if (q == 1) return cplx(1.0, 0.0);
    long g = detail::gcd_long(q, a);
    long q2 = q / g, a2 = (a / g) % q2;
    if (q2 == 1) return cplx(1.0, 0.0);
    if (a2 < 0) a2 += q2;
    // fast path: chain (1,...,1) pairs reduce, but keep the generic convolution
    auto counts = detail::chain_value_counts(q2, chain.h);
    cplx s(0, 0);
    for (long v = 0; v < q2; ++v) {
        if (!counts[std::size_t(v)]) continue;
        double ang = 2 * M_PI * double((__int128)a2 * v % q2) / double(q2);
        s += double(counts[std::size_t(v)]) * cplx(std::cos(ang), std::sin(ang));
    }
    return s / std::pow(double(q2), double(chain.h.size()));
}

// D(q, b, h) = sum over reduced residues a of E(q, ab; h); real-valued.
inline cplx gauss_average(long q, long b, const ChainSpec& chain) {
    if (q == 1) return cplx(1.0, 0.0);
    auto counts = detail::chain_value_counts(q, chain.h);
    double s = 0;
    for (long v = 0; v < q; ++v) {
        if (!counts[std::size_t(v)]) continue;
        s += double(counts[std::size_t(v)]) * double(detail::ramanujan(q, long((__int128)b * v % q)));
    }
    return cplx(s / std::pow(double(q), double(chain.h.size())), 0.0);
}

namespace detail {

inline bool chain_has_unit(const std::vector<long>& h) {
    return std::find(h.begin(), h.end(), 1L) != h.end();
}

// W(p^l) = sum over reduced a mod p^l of prod_i E_i(p^l, a b_i); exact when all
// chains contain a unit exponent, otherwise via value-count convolutions.
inline double prime_power_term(long p, int l, const std::vector<ChainSpec>& chains) {
    bool all_unit = true;
    for (const auto& c : chains)
        if (!chain_has_unit(c.h)) all_unit = false;
    if (all_unit) {
        Rat w = Rat(phi_prime_power(p, l));
        for (const auto& c : chains) {
            long b = std::abs(c.b);
            int v = 0;
            while (b % p == 0) {
                b /= p;
                ++v;
            }
            w *= gauss_E_unit(p, std::max(l - v, 0), c.h);
        }
        return to_double(w);
    }
    long q = 1;
    for (int t = 0; t < l; ++t) q *= p;
    // additive convolution of b_i-scaled value distributions, then Ramanujan.
    std::vector<std::uint64_t> add(std::size_t(q), 0);
    add[0] = 1;
    double norm = 1;
    for (const auto& c : chains) {
        auto cnt = chain_value_counts(q, c.h);
        std::vector<std::uint64_t> scaled(std::size_t(q), 0);
        long bm = ((c.b % q) + q) % q;
        for (long v = 0; v < q; ++v)
            if (cnt[std::size_t(v)]) scaled[std::size_t(long((__int128)bm * v % q))] += cnt[std::size_t(v)];
        std::vector<std::uint64_t> next(std::size_t(q), 0);
        for (long v = 0; v < q; ++v) {
            if (!add[std::size_t(v)]) continue;
            for (long u = 0; u < q; ++u) {
                if (!scaled[std::size_t(u)]) continue;
                next[std::size_t((v + u) % q)] += add[std::size_t(v)] * scaled[std::size_t(u)];
            }
        }
        add = std::move(next);
        norm *= std::pow(double(q), double(c.h.size()));
    }
    double s = 0;
    for (long w = 0; w < q; ++w)
        if (add[std::size_t(w)]) s += double(add[std::size_t(w)]) * double(ramanujan(q, w));
    return s / norm;
}

}  // namespace detail

struct SingularSeries {
    double value = 0;
    double tail_bound = 0;  // heuristic, from the fitted q^{-1-1/h} decay
    bool converged = true;
};

// E_b = sum_q sum*_a prod_i E_i(q, a b_i), assembled multiplicatively.
inline SingularSeries singular_series(const std::vector<ChainSpec>& chains, long q_cutoff) {
    long hmax = 1;
    for (const auto& c : chains)
        for (long h : c.h) hmax = std::max(hmax, h);
    // multiplicative table over q <= Q via smallest prime factor sieve
    std::vector<long> spf(std::size_t(q_cutoff + 1), 0);
    for (long i = 2; i <= q_cutoff; ++i) {
        if (spf[std::size_t(i)]) continue;
        for (long j = i; j <= q_cutoff; j += i)
            if (!spf[std::size_t(j)]) spf[std::size_t(j)] = i;
    }
    std::map<std::pair<long, int>, double> wpp;
    std::vector<double> w(std::size_t(q_cutoff + 1), 0.0);
    w[1] = 1.0;
    double total = 1.0, total_half = 1.0;
    for (long q = 2; q <= q_cutoff; ++q) {
        long p = spf[std::size_t(q)];
        long rest = q;
        int l = 0;
        while (rest % p == 0) {
            rest /= p;
            ++l;
        }
        auto key = std::make_pair(p, l);
        auto it = wpp.find(key);
        if (it == wpp.end()) it = wpp.emplace(key, detail::prime_power_term(p, l, chains)).first;
        w[std::size_t(q)] = w[std::size_t(rest)] * it->second;
        total += w[std::size_t(q)];
        if (q <= q_cutoff / 2) total_half += w[std::size_t(q)];
    }
    SingularSeries out;
    out.value = total;
    // heuristic tail ~ C q^{-1/hmax} with C fitted from the last octave's movement
    double move = std::abs(total - total_half);
    double ratio = std::pow(2.0, -1.0 / double(hmax));
    out.tail_bound = move * ratio / (1 - ratio);
    out.converged = !(move > 0.5 * std::abs(total_half) && q_cutoff >= 64);
    return out;
}

// ---- oscillatory box integrals ----

namespace detail {

// int_{Y/2}^{Y} cos/sin(2 pi beta y^h) dy with oscillation-aware panels
inline cplx osc_segment(double beta, double y0, double y1, long h, bool complex_part) {
    auto freq = [&](double y) { return std::abs(beta) * double(h) * std::pow(y, double(h - 1)); };
    cplx total(0, 0);
    double y = y0;
    int guard = 0;
    while (y < y1 && guard++ < 2000000) {
        double f = std::max(freq(std::max(y, y0)), 1e-12);
        double step = std::min({(y1 - y0) / 16, 0.25 / f, y1 - y});
        if (step <= 0) step = y1 - y;
        double a = y, b = std::min(y + step, y1);
        double re = gauss20([&](double t) { return std::cos(2 * M_PI * beta * std::pow(t, double(h))); }, a, b);
        double im = 0;
        if (complex_part)
            im = gauss20([&](double t) { return std::sin(2 * M_PI * beta * std::pow(t, double(h))); }, a, b);
        total += cplx(re, im);
        y = b;
    }
    return total;
}

}  // namespace detail

// I(beta, Y; h) = int over {Y_j/2 < |y_j| <= Y_j} of e(beta prod y^h); chains of
// length <= 3. Exact closed forms for exponent-1 layers, quadrature otherwise.
inline cplx osc_integral(double beta, const std::vector<double>& y, const std::vector<long>& h) {
    if (y.size() != h.size() || y.empty() || y.size() > 3)
        throw std::invalid_argument("osc_integral: chain length must be 1..3");
    if (beta == 0) {
        double v = 1;
        for (double yi : y) v *= yi;  // each axis: 2 * (Y - Y/2) = Y
        return cplx(v, 0);
    }
    if (y.size() == 2 && h[0] == 1 && h[1] == 1) {
        double c = M_PI * beta * y[0] * y[1];
        double v = (2 / (M_PI * beta)) *
                   (detail::sine_integral(2 * c) - 2 * detail::sine_integral(c) + detail::sine_integral(c / 2));
        return cplx(v, 0);
    }
    if (y.size() == 1) {
        long hh = h[0];
        if (hh == 1) {
            double v = (std::sin(2 * M_PI * beta * y[0]) - std::sin(M_PI * beta * y[0])) / (M_PI * beta);
            return cplx(v, 0);
        }
        bool even = hh % 2 == 0;
        cplx half = detail::osc_segment(beta, y[0] / 2, y[0], hh, even);
        return even ? 2.0 * half : cplx(2.0 * half.real(), 0.0);
    }
    // reduce over the last (largest-exponent) coordinate by quadrature
    std::size_t pivot = 0;
    for (std::size_t i = 1; i < h.size(); ++i)
        if (h[i] >= h[pivot]) pivot = i;
    std::vector<double> ry;
    std::vector<long> rh;
    for (std::size_t i = 0; i < h.size(); ++i)
        if (i != pivot) {
            ry.push_back(y[i]);
            rh.push_back(h[i]);
        }
    long hp = h[pivot];
    double rest_scale = 1;
    for (std::size_t i = 0; i < ry.size(); ++i) rest_scale *= std::pow(ry[i], double(rh[i]));
    auto inner_re = [&](double t) {
        return osc_integral(beta * std::pow(t, double(hp)), ry, rh).real();
    };
    auto inner_im = [&](double t) {
        return osc_integral(beta * std::pow(t, double(hp)), ry, rh).imag();
    };
    // panel quadrature over t in (Y/2, Y], oscillation scale |beta| h t^{h-1} * rest
    double y0 = y[pivot] / 2, y1 = y[pivot];
    cplx total(0, 0);
    double t = y0;
    int guard = 0;
    while (t < y1 && guard++ < 2000000) {
        double f = std::max(std::abs(beta) * double(hp) * std::pow(t, double(hp - 1)) * rest_scale, 1e-12);
        double step = std::min({(y1 - y0) / 16, 0.25 / f, y1 - t});
        double a = t, b = std::min(t + step, y1);
        total += cplx(detail::gauss20(inner_re, a, b), detail::gauss20(inner_im, a, b));
        t = b;
    }
    bool even = hp % 2 == 0;
    if (even) return 2.0 * total;
    // odd exponent: negative side contributes the conjugate
    return cplx(2.0 * total.real(), 0.0);
}

struct SingularIntegral {
    double value = 0;
    double tail_bound = 0;
    double cutoff = 0;  // beta truncation T = Q / Z0
};

// I_b(X) = <X_0> * int prod_i I_i(b_i beta) d beta, truncated at Q Z0^{-1}.
inline SingularIntegral singular_integral(const std::vector<ChainSpec>& chains,
                                          const std::vector<std::vector<double>>& boxes,
                                          double x0_volume, double q_trunc = 4096) {
    if (chains.size() < 2) throw std::invalid_argument("singular_integral: k >= 2 required");
    double z0 = 0;
    std::vector<double> zi;
    for (std::size_t i = 0; i < chains.size(); ++i) {
        double z = 1;
        for (std::size_t j = 0; j < chains[i].h.size(); ++j)
            z *= std::pow(boxes[i][j], double(chains[i].h[j]));
        zi.push_back(z);
        z0 = std::max(z0, z);
    }
    double T = q_trunc / z0;
    auto f = [&](double beta) {
        cplx prod(1, 0);
        for (std::size_t i = 0; i < chains.size(); ++i)
            prod *= osc_integral(double(chains[i].b) * beta, boxes[i], chains[i].h);
        return prod.real();  // the symmetrized integrand; imaginary parts cancel over +-beta
    };
    // integrate 2*int_0^T; oscillation scale z0 (panel ~ 1/(4 z0))
    double total = 0;
    double t = 0;
    while (t < T) {
        double step = std::min(0.25 / z0, T - t);
        total += detail::gauss20(f, t, t + step);
        t += step;
    }
    SingularIntegral out;
    out.value = 2 * total * x0_volume;
    out.cutoff = T;
    // E3-type majorant for the tail: prod <Y_i> / prod(1 + z_i |b_i| beta) integrated beyond T
    double far = 0;
    double prod_vol = 1;
    for (std::size_t i = 0; i < chains.size(); ++i) {
        double v = 1;
        for (double yj : boxes[i]) v *= yj;
        prod_vol *= v;
    }
    // crude numeric tail of the majorant
    double b0 = T;
    for (int step = 0; step < 64; ++step) {
        double b1 = b0 * 2;
        double mid = (b0 + b1) / 2, m = 1;
        for (std::size_t i = 0; i < chains.size(); ++i)
            m /= 1 + zi[i] * std::abs(double(chains[i].b)) * mid;
        far += m * (b1 - b0);
        b0 = b1;
        if (m * (b1 - b0) < 1e-18) break;
    }
    out.tail_bound = 2 * far * prod_vol * x0_volume;
    return out;
}

// ---- exact box counts ----

struct Box {
    std::vector<double> limits;  // X_ij in flat variable order, each >= 1
};

// Exact number of nonzero-integer solutions of the torsor equation with
// X_ij/2 < |x_ij| <= X_ij  (no height or gcd conditions).
inline Int box_count(const VarietySpec& spec, const Box& box) {
    if (!spec.is_type_t()) throw std::domain_error("box_count: type-T equation required");
    const auto order = spec.var_order();
    auto lim = [&](VarIndex vi) { return box.limits[spec.flat_index(vi)]; };
    auto lo = [&](double X) { return long(std::floor(X / 2)) + 1; };
    auto hi = [&](double X) { return long(std::floor(X)); };
    long b1 = spec.coefficients[0], b2 = spec.coefficients[1], b3 = spec.coefficients[2];

    // group 0: free factor, each variable contributes 2*(hi-lo+1) sign choices
    Int g0 = 1;
    for (int j = 1; j <= int(spec.group_size(0)); ++j) {
        long l = lo(lim({0, j})), h = hi(lim({0, j}));
        if (h < l) return 0;
        g0 *= Int(2) * Int(h - l + 1);
    }
    // group-3 sign multiplicities: with at least one odd exponent, each product
    // sign is hit by half of the 2^{J3} patterns; otherwise all are positive.
    int j3 = int(spec.group_size(3));
    bool any_odd = false;
    for (int j = 1; j <= j3; ++j)
        if (spec.var({3, j}).h % 2 == 1) any_odd = true;
    Int g3_half = ipow(Int(2), unsigned(j3 - 1));

    long l21 = lo(lim({2, 1})), h21 = hi(lim({2, 1}));
    long l22 = lo(lim({2, 2})), h22 = hi(lim({2, 2}));
    long l11 = lo(lim({1, 1})), h11 = hi(lim({1, 1}));
    long l12 = lo(lim({1, 2})), h12 = hi(lim({1, 2}));

    // enumerate |x3j| tuples
    std::vector<long> l3(static_cast<std::size_t>(j3)), h3(static_cast<std::size_t>(j3));
    for (int j = 1; j <= j3; ++j) {
        l3[std::size_t(j - 1)] = lo(lim({3, j}));
        h3[std::size_t(j - 1)] = hi(lim({3, j}));
        if (h3[std::size_t(j - 1)] < l3[std::size_t(j - 1)]) return 0;
    }
    Int total = 0;
    std::vector<long> cur(static_cast<std::size_t>(j3));
    std::function<void(int, Int)> rec3 = [&](int j, Int m3abs) {
        if (j == j3) {
            for (long a21 = l21; a21 <= h21; ++a21)
                for (long a22 = l22; a22 <= h22; ++a22) {
                    Int m2 = Int(a21) * a22;
                    for (int s2 = -1; s2 <= 1; s2 += 2)
                        for (int s3 = -1; s3 <= 1; s3 += 2) {
                            Int g3count = any_odd ? g3_half : (s3 == 1 ? ipow(Int(2), unsigned(j3)) : Int(0));
                            if (g3count == 0) continue;
                            Int rhs = -(Int(b2) * s2 * m2 + Int(b3) * s3 * m3abs);
                            if (rhs % b1 != 0) continue;
                            Int q = rhs / b1;
                            if (q == 0) continue;
                            Int qa = abs(q);
                            // ordered divisor pairs (x11, x12) with |x11| in range
                            long dmax = h11;
                            Int pairs = 0;
                            for (long d = l11; d <= dmax; ++d) {
                                if (qa % d != 0) continue;
                                Int e = qa / d;
                                if (e < l12 || e > h12) continue;
                                pairs += 2;  // sign of x11 free, x12 = q / x11
                            }
                            total += g0 * Int(2) * g3count * pairs;  // 2 = (x21,x22) sign patterns
                        }
                }
            return;
        }
        for (long v = l3[std::size_t(j)]; v <= h3[std::size_t(j)]; ++v) {
            cur[std::size_t(j)] = v;
            rec3(j + 1, m3abs * ipow(Int(v), unsigned(spec.var({3, j + 1}).h)));
        }
    };
    rec3(0, Int(1));
    return total;
}

struct H1Report {
    Int exact_count;
    double main_term = 0;       // E_b * I_b(X)
    double singular_series = 0;
    double singular_integral = 0;
    double relative_discrepancy = 0;
    bool in_regime = true;  // min X > 1
};

inline H1Report h1_discrepancy(const VarietySpec& spec, const Box& box, long q_cutoff = 100000) {
    H1Report rep;
    std::vector<ChainSpec> chains;
    std::vector<std::vector<double>> boxes;
    for (int i = 1; i <= spec.k(); ++i) {
        ChainSpec c;
        c.h = spec.h_chain(i);
        c.b = spec.coefficients[std::size_t(i - 1)];
        chains.push_back(c);
        std::vector<double> bx;
        for (int j = 1; j <= int(spec.group_size(i)); ++j)
            bx.push_back(box.limits[spec.flat_index({i, j})]);
        boxes.push_back(bx);
    }
    double x0vol = 1, minx = 1e300;
    for (int j = 1; j <= int(spec.group_size(0)); ++j)
        x0vol *= box.limits[spec.flat_index({0, j})];
    for (double x : box.limits) minx = std::min(minx, x);
    rep.in_regime = minx > 1;
    rep.exact_count = box_count(spec, box);
    auto ss = singular_series(chains, q_cutoff);
    auto si = singular_integral(chains, boxes, x0vol);
    rep.singular_series = ss.value;
    rep.singular_integral = si.value;
    rep.main_term = ss.value * si.value;
    double n = to_double(rep.exact_count);
    rep.relative_discrepancy = n == 0 ? 1.0 : std::abs(n - rep.main_term) / n;
    return rep;
}

}  // namespace mtw
