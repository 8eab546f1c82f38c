#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "mtw/height.hpp"
#include "mtw/threads.hpp"

namespace mtw {

struct MCConfig {
    std::uint64_t samples = 2'000'000;
    std::uint64_t seed = 1;
    unsigned shards = 16;          // independent seed streams; stderr from shard spread
    double log_scale = 4.0;        // compactification l = scale * s/(1-|s|)
    unsigned threads = 0;          // 0 = MTW_THREADS / hardware
};

struct MCResult {
    double value = 0;
    double stderr_est = 0;
    std::uint64_t samples = 0;
};

// Archimedean factor
//   c_inf = 2^{J-R} Int_{R^{R-1}} chi_I(phi(t'), t') dt',  phi(t') = -(m2 + m3),
// with chi_I the height conditions restricted to the basis rows I and t_{11}
// eliminated through the torsor relation (simplifying assumption).
//
// Estimator: sign-fold onto the positive orthant; exact fiber integration over
// one group-0 coordinate of I when present; remaining coordinates sampled by a
// jittered Latin hypercube in log coordinates compactified axis-wise by
// l = scale * s/(1-|s|). The rational u/(1-u^2) map mis-samples the log-scale
// tails of the indicator; the exponential map keeps per-sample weights bounded.
inline MCResult c_infinity(const VarietySpec& spec, const HeightSystem& hs, const RowBasis& rb,
                           const MCConfig& cfg) {
    if (!rb.simplifying)
        throw std::domain_error("c_infinity: simplifying assumption unavailable for this basis");
    const std::size_t R = std::size_t(hs.R), J = hs.J, N = hs.N;
    const std::size_t i11 = spec.flat_index({1, 1});

    // fiber: first group-0 basis row, if any
    std::ptrdiff_t fiber = -1;
    for (std::size_t t = 0; t < rb.basis_flat.size(); ++t)
        if (rb.I[t].i == 0) {
            fiber = std::ptrdiff_t(rb.basis_flat[t]);
            break;
        }
    std::vector<std::size_t> others;
    std::vector<VarIndex> others_vi;
    for (std::size_t t = 0; t < rb.basis_flat.size(); ++t) {
        std::size_t fl = rb.basis_flat[t];
        if (fl == i11 || std::ptrdiff_t(fl) == fiber) continue;
        others.push_back(fl);
        others_vi.push_back(rb.I[t]);
    }
    const std::size_t d = others.size();

    // columns restricted to I rows, as doubles
    std::vector<double> a11(N), afib(N, 0.0);
    std::vector<std::vector<double>> aoth(d, std::vector<double>(N));
    for (std::size_t nu = 0; nu < N; ++nu) {
        a11[nu] = to_double(hs.A1(i11, nu));
        if (fiber >= 0) afib[nu] = to_double(hs.A1(std::size_t(fiber), nu));
        for (std::size_t t = 0; t < d; ++t) aoth[t][nu] = to_double(hs.A1(others[t], nu));
    }
    std::vector<double> hexp(d);
    std::vector<int> grp(d);
    for (std::size_t t = 0; t < d; ++t) {
        grp[t] = others_vi[t].i;
        hexp[t] = double(spec.var(others_vi[t]).h);
    }
    // sign-pattern multiplicities for (sign m2, sign m3)
    long mult[2][2] = {{0, 0}, {0, 0}};  // [s2<0][s3<0]
    for (std::uint64_t pat = 0; pat < (1ull << d); ++pat) {
        int s2 = 1, s3 = 1;
        for (std::size_t t = 0; t < d; ++t) {
            if (!(pat >> t & 1ull)) continue;
            long h = long(hexp[t]);
            if (h % 2 == 0) continue;
            if (grp[t] == 2) s2 = -s2;
            if (grp[t] == 3) s3 = -s3;
        }
        ++mult[s2 < 0][s3 < 0];
    }

    const std::uint64_t per_shard = std::max<std::uint64_t>(1, cfg.samples / cfg.shards);
    std::vector<double> shard_mean(cfg.shards, 0.0);
    const double g = cfg.log_scale;

    parallel_shards(cfg.shards, [&](unsigned shard) {
        SplitMix64 rng(cfg.seed * 0x2545F4914F6CDD1Dull + shard + 1);
        // jittered Latin hypercube: per-axis random stratum permutation
        std::vector<std::vector<std::uint32_t>> perm(d, std::vector<std::uint32_t>(per_shard));
        for (std::size_t t = 0; t < d; ++t) {
            for (std::uint64_t i = 0; i < per_shard; ++i) perm[t][i] = std::uint32_t(i);
            for (std::uint64_t i = per_shard; i > 1; --i)
                std::swap(perm[t][i - 1], perm[t][rng.next() % i]);
        }
        double acc = 0;
        std::vector<double> ell(d), lt(d);
        for (std::uint64_t it = 0; it < per_shard; ++it) {
            double logjac = 0;
            for (std::size_t t = 0; t < d; ++t) {
                double u = (double(perm[t][it]) + rng.uniform()) / double(per_shard);
                double s = 2 * u - 1;
                double as = std::min(std::abs(s), 1.0 - 1e-14);
                double l = g * s / (1 - as);
                l = std::max(-300.0, std::min(300.0, l));
                ell[t] = l;
                logjac += std::log(2 * g) + l - 2 * std::log1p(-as);
            }
            double lm2 = 0, lm3 = 0;
            bool has2 = false, has3 = false;
            for (std::size_t t = 0; t < d; ++t) {
                if (grp[t] == 2) {
                    lm2 += hexp[t] * ell[t];
                    has2 = true;
                } else if (grp[t] == 3) {
                    lm3 += hexp[t] * ell[t];
                    has3 = true;
                }
            }
            if (!has2) lm2 = 0;  // empty product = 1
            if (!has3) lm3 = 0;
            for (int c2 = 0; c2 < 2; ++c2)
                for (int c3 = 0; c3 < 2; ++c3) {
                    long m = mult[c2][c3];
                    if (m == 0) continue;
                    bool same = c2 == c3;
                    // log |(+-)e^{lm2} + (+-)e^{lm3}|
                    double hi2 = std::max(lm2, lm3), lo2 = std::min(lm2, lm3);
                    double lt11;
                    if (same) {
                        lt11 = hi2 + std::log1p(std::exp(lo2 - hi2));
                    } else {
                        double dgap = lo2 - hi2;
                        if (dgap > -1e-14) continue;  // measure-zero cancellation
                        lt11 = hi2 + std::log1p(-std::exp(dgap));
                    }
                    bool ok = true;
                    double tlog = 1e300;
                    for (std::size_t nu = 0; nu < N && ok; ++nu) {
                        double v = a11[nu] * lt11;
                        for (std::size_t t = 0; t < d; ++t) v += aoth[t][nu] * ell[t];
                        if (fiber >= 0 && afib[nu] > 0)
                            tlog = std::min(tlog, -v / afib[nu]);
                        else if (v > 1e-12)
                            ok = false;
                    }
                    if (!ok) continue;
                    double lw = logjac;
                    if (fiber >= 0) lw += std::log(2.0) + std::min(tlog, 300.0);
                    if (lw < -700) continue;
                    acc += double(m) * std::exp(std::min(lw, 700.0));
                }
        }
        shard_mean[shard] = acc / double(per_shard);
    }, cfg.threads);

    double mean = std::accumulate(shard_mean.begin(), shard_mean.end(), 0.0) / double(cfg.shards);
    double var = 0;
    for (double m : shard_mean) var += (m - mean) * (m - mean);
    var /= cfg.shards > 1 ? double(cfg.shards - 1) : 1.0;
    double scale = std::pow(2.0, double(J - R));
    MCResult out;
    out.value = scale * mean;
    out.stderr_est = scale * std::sqrt(var / double(cfg.shards));
    out.samples = per_shard * cfg.shards;
    return out;
}

}  // namespace mtw
