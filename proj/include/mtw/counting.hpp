#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "mtw/height.hpp"
#include "mtw/polytope.hpp"
#include "mtw/variety.hpp"

namespace mtw {

// ---- per-variable bounds from the log-height polytope ----

// e_ij = max psi_ij over P = {psi >= 0, A1^T psi <= 1}; every counted solution
// satisfies |x_ij| <= B^{e_ij}.
inline std::vector<Rat> variable_exponent_bounds(const HeightSystem& hs) {
    HPolytope p = HPolytope::make(hs.J);
    p.nonneg.assign(hs.J, true);
    for (std::size_t nu = 0; nu < hs.N; ++nu) {
        std::vector<Rat> row(hs.J);
        for (std::size_t i = 0; i < hs.J; ++i) row[i] = hs.A1(i, nu);
        p.add_le(row, Rat(1));
    }
    std::vector<Rat> e(hs.J);
    for (std::size_t i = 0; i < hs.J; ++i) {
        std::vector<Rat> obj(hs.J, Rat(0));
        obj[i] = 1;
        auto r = lp_solve(p, obj, LpSense::Max);
        if (r.status != LpStatus::Optimal)
            throw std::domain_error("variable_exponent_bounds: P unbounded (zero row in A1?)");
        e[i] = r.value;
    }
    return e;
}

// max m >= 0 with m^q <= B^p for e = p/q (exact integer root).
inline long exponent_bound(long B, const Rat& e) {
    if (B < 1) return 0;
    Int p = rat_num(e), q = rat_den(e);
    if (p <= 0) return 1;
    Int target = ipow(Int(B), unsigned(p.convert_to<long>()));
    long lo = 1, hi = 2;
    auto fits = [&](long m) { return ipow(Int(m), unsigned(q.convert_to<long>())) <= target; };
    while (fits(hi)) hi *= 2;
    while (lo < hi) {
        long mid = lo + (hi - lo + 1) / 2;
        if (fits(mid)) lo = mid;
        else hi = mid - 1;
    }
    return lo;
}

namespace detail {

using u128 = unsigned __int128;

struct HeightGuard {
    // per column: current partial product, saturating at > limit
    std::vector<u128> partial;
    u128 limit;
};

// Counting engine shared by the three strategies.
class Counter {
  public:
    Counter(const VarietySpec& spec, const HeightSystem& hs, const std::vector<Rat>& expo)
        : spec_(spec), hs_(hs) {
        J_ = hs.J;
        N_ = hs.N;
        alpha_.assign(J_, std::vector<long>(N_));
        for (std::size_t i = 0; i < J_; ++i)
            for (std::size_t nu = 0; nu < N_; ++nu)
                alpha_[i][nu] = to_int(hs.A1(i, nu)).convert_to<long>();
        expo_ = expo;
        order_ = spec.var_order();
        i11_ = spec.flat_index({1, 1});
        i12_ = spec.flat_index({1, 2});
    }

    // gamma: per-variable positive multiplier (1 = plain); apply_gcd: enforce the
    // spec's gcd-1 conditions on x; fold: count only y21,y22>0 and multiply by 4;
    // divisor_mode: resolve (x11,x12) through divisor pairs of the forced product.
    Int count(long B, const std::vector<long>& gamma, bool apply_gcd, bool fold,
              bool divisor_mode) {
        if (B < 1) return 0;
        B_ = B;
        gamma_ = gamma;
        apply_gcd_ = apply_gcd;
        fold_ = fold;
        limit_ = u128(B);
        bounds_.assign(J_, 0);
        for (std::size_t i = 0; i < J_; ++i) {
            long bx = exponent_bound(B, expo_[i]);
            bounds_[i] = bx / gamma[i];
            if (bx < 1 || bounds_[i] < 1) return 0;  // gamma exceeds the height bound
        }
        // enumeration order: skip (1,2) always; skip (1,1) in divisor mode;
        // strongest-pruning rows first (descending min column entry, then sum).
        loops_.clear();
        for (std::size_t i = 0; i < J_; ++i) {
            if (i == i12_) continue;
            if (divisor_mode && i == i11_) continue;
            loops_.push_back(i);
        }
        std::stable_sort(loops_.begin(), loops_.end(), [&](std::size_t a, std::size_t b) {
            auto key = [&](std::size_t i) {
                long mn = alpha_[i][0], sm = 0;
                for (std::size_t nu = 0; nu < N_; ++nu) {
                    mn = std::min(mn, alpha_[i][nu]);
                    sm += alpha_[i][nu];
                }
                return std::make_pair(mn, sm);
            };
            return key(a) > key(b);
        });
        divisor_mode_ = divisor_mode;
        total_ = 0;
        val_.assign(J_, 0);
        partial_.assign(N_, u128(1));
        rec(0);
        return total_;
    }

  private:
    bool sign_positive_only(std::size_t flat) const {
        if (!fold_) return false;
        auto vi = order_[flat];
        return (vi.i == 2);  // fold fixes x21 > 0 and x22 > 0
    }

    long loop_cap(std::size_t flat) const {
        // residual cap from partial height products: gamma^alpha y^alpha * partial <= B
        long cap = bounds_[flat];
        for (std::size_t nu = 0; nu < N_; ++nu) {
            long a = alpha_[flat][nu];
            if (a == 0) continue;
            if (partial_[nu] > limit_) return 0;
            u128 room = limit_ / partial_[nu];
            // largest m with (gamma*m)^a <= room
            long g = gamma_[flat];
            long m = 0, lo = 1, hi = cap;
            while (lo <= hi) {
                long mid = lo + (hi - lo) / 2;
                u128 v = 1;
                bool ok = true;
                for (long t = 0; t < a && ok; ++t) {
                    v *= u128(g) * u128(mid);
                    if (v > room) ok = false;
                }
                if (ok) {
                    m = mid;
                    lo = mid + 1;
                } else
                    hi = mid - 1;
            }
            cap = std::min(cap, m);
            if (cap == 0) return 0;
        }
        return cap;
    }

    void push_val(std::size_t flat, long y) {
        val_[flat] = y;
        long a;
        for (std::size_t nu = 0; nu < N_; ++nu) {
            a = alpha_[flat][nu];
            if (a == 0) continue;
            u128 f = u128(gamma_[flat]) * u128(std::abs(y));
            for (long t = 0; t < a; ++t) {
                partial_[nu] = partial_[nu] * f;
                if (partial_[nu] > limit_) {
                    partial_[nu] = limit_ + 1;  // saturate
                    break;
                }
            }
        }
    }

    std::vector<u128> save_partial() const { return partial_; }
    void restore_partial(std::vector<u128> p) { partial_ = std::move(p); }

    void rec(std::size_t level) {
        if (level == loops_.size()) {
            finish();
            return;
        }
        std::size_t flat = loops_[level];
        long cap = loop_cap(flat);
        if (cap < 1) return;
        bool pos_only = sign_positive_only(flat);
        auto saved = save_partial();
        for (long m = 1; m <= cap; ++m) {
            for (int s = pos_only ? 1 : -1; s <= 1; s += 2) {
                push_val(flat, s * m);
                rec(level + 1);
                restore_partial(saved);
            }
        }
        val_[flat] = 0;
    }

    // at the leaf: all loop variables set; resolve (1,1),(1,2) or just (1,2)
    void finish() {
        // n = -(sum_{i>=2} b_i * monomial_i(gamma*y)) / b1 = x11*x12 product target
        Int rhs = 0;
        for (int i = 2; i <= spec_.k(); ++i) {
            Int m = 1;
            for (int j = 1; j <= int(spec_.group_size(i)); ++j) {
                std::size_t fl = spec_.flat_index({i, j});
                Int xv = Int(gamma_[fl]) * val_[fl];
                m *= ipow(xv, unsigned(spec_.var({i, j}).h));
            }
            rhs += Int(spec_.coefficients[std::size_t(i - 1)]) * m;
        }
        rhs = -rhs;
        long b1 = spec_.coefficients[0];

        if (divisor_mode_) {
            if (rhs % b1 != 0) return;
            Int q = rhs / b1;
            if (q == 0) return;
            Int gg = Int(gamma_[i11_]) * Int(gamma_[i12_]);
            if (q % gg != 0) return;
            Int qp = q / gg;
            Int qa = abs(qp);
            if (qa > Int(std::numeric_limits<long>::max())) return;  // outside height range anyway
            long qa_l = qa.convert_to<long>();
            bool qneg = qp < 0;
            for (long d = 1; d * d <= qa_l; ++d) {
                if (qa_l % d != 0) continue;
                long pair[2] = {d, qa_l / d};
                int variants = pair[0] == pair[1] ? 1 : 2;
                for (int t = 0; t < variants; ++t) {
                    long y11a = pair[t], y12a = pair[1 - t];
                    if (y11a > bounds_[i11_] || y12a > bounds_[i12_]) continue;
                    for (int s11 = -1; s11 <= 1; s11 += 2) {
                        long y11 = s11 * y11a;
                        long y12 = qneg == (y11 < 0) ? y12a : -y12a;  // sign(y11*y12) = sign(qp)
                        emit(y11, y12);
                    }
                }
            }
            return;
        }
        // naive mode: x11 already enumerated; solve x12 by divisibility
        long y11 = val_[i11_];
        Int denom = Int(b1) * Int(gamma_[i11_]) * y11 * Int(gamma_[i12_]);
        if (denom == 0) return;
        if (rhs % denom != 0) return;
        Int y12i = rhs / denom;
        if (y12i == 0) return;
        if (abs(y12i) > Int(bounds_[i12_])) return;
        emit(y11, y12i.convert_to<long>());
    }

    void emit(long y11, long y12) {
        // final exact height + gcd checks on x = gamma * y
        auto saved = save_partial();
        push_val(i11_, y11);
        push_val(i12_, y12);
        bool ok = true;
        for (std::size_t nu = 0; nu < N_ && ok; ++nu)
            if (partial_[nu] > limit_) ok = false;
        if (ok && apply_gcd_) {
            for (const auto& set : spec_.coprimality) {
                Int g = 0;
                for (const auto& vi : set) {
                    std::size_t fl = spec_.flat_index(vi);
                    g = gcd(g, Int(gamma_[fl]) * val_[fl]);
                    if (g == 1) break;
                }
                if (abs(g) != 1) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) total_ += fold_ ? 4 : 1;
        restore_partial(saved);
        val_[i11_] = 0;
        val_[i12_] = 0;
    }

    const VarietySpec& spec_;
    const HeightSystem& hs_;
    std::size_t J_ = 0, N_ = 0;
    std::vector<std::vector<long>> alpha_;
    std::vector<Rat> expo_;
    std::vector<VarIndex> order_;
    std::size_t i11_ = 0, i12_ = 0;

    long B_ = 0;
    std::vector<long> gamma_;
    bool apply_gcd_ = true, fold_ = false, divisor_mode_ = false;
    u128 limit_ = 1;
    std::vector<long> bounds_;
    std::vector<std::size_t> loops_;
    std::vector<long> val_;
    std::vector<u128> partial_;
    Int total_ = 0;
};

}  // namespace detail

struct CountSeries {
    std::vector<long> b_values;
    std::vector<Int> counts;
    std::string strategy;
    std::vector<double> seconds;
};

class TorsorCounter {
  public:
    explicit TorsorCounter(const VarietySpec& spec)
        : spec_(spec), a1_(derive_height_matrix(spec)), hs_(assemble_block_matrix(spec, a1_)) {
        expo_ = variable_exponent_bounds(hs_);
    }

    const HeightSystem& height_system() const { return hs_; }
    const std::vector<Rat>& exponent_bounds() const { return expo_; }

    Int count_naive(long B) const {
        detail::Counter c(spec_, hs_, expo_);
        std::vector<long> gamma(hs_.J, 1);
        return c.count(B, gamma, true, false, false);
    }

    Int count_fast(long B) const {
        if (!spec_.is_type_t()) throw std::domain_error("count_fast: type-T equation required");
        detail::Counter c(spec_, hs_, expo_);
        std::vector<long> gamma(hs_.J, 1);
        return c.count(B, gamma, true, true, true);
    }

    // Moebius-inverted count: sum over squarefree g of mu(g) * (count of points
    // with gamma | x coordinatewise, gcd conditions dropped).
    Int count_moebius(long B, long T) const {
        if (!spec_.is_type_t()) throw std::domain_error("count_moebius: type-T equation required");
        const auto& sets = spec_.coprimality;
        const std::size_t r = sets.size();
        std::vector<long> caps(r, T);
        for (std::size_t t = 0; t < r; ++t)
            for (const auto& vi : sets[t]) {
                long bd = exponent_bound(B, expo_[spec_.flat_index(vi)]);
                caps[t] = std::min(caps[t], bd);
            }
        detail::Counter engine(spec_, hs_, expo_);
        Int total = 0;
        std::vector<long> g(r, 1);
        std::vector<long> gamma(hs_.J, 1);
        std::function<void(std::size_t, long)> rec = [&](std::size_t t, long musign) {
            if (t == r) {
                for (std::size_t i = 0; i < hs_.J; ++i) gamma[i] = 1;
                for (std::size_t s = 0; s < r; ++s)
                    for (const auto& vi : sets[s]) {
                        std::size_t fl = spec_.flat_index(vi);
                        gamma[fl] = std::lcm(gamma[fl], g[s]);
                    }
                // quick feasibility: every height column monomial in gamma <= B
                for (std::size_t nu = 0; nu < hs_.N; ++nu) {
                    detail::u128 m = 1;
                    for (std::size_t i = 0; i < hs_.J; ++i) {
                        long a = to_int(hs_.A1(i, nu)).convert_to<long>();
                        for (long q = 0; q < a; ++q) {
                            m *= detail::u128(gamma[i]);
                            if (m > detail::u128(B)) return;
                        }
                    }
                }
                total += Int(musign) * engine.count(B, gamma, false, true, true);
                return;
            }
            for (long v = 1; v <= caps[t]; ++v) {
                long mu = mobius_(v);
                if (mu == 0) continue;
                g[t] = v;
                rec(t + 1, musign * mu);
            }
            g[t] = 1;
        };
        rec(0, 1);
        return total;
    }

    CountSeries series(const std::vector<long>& bs, const std::string& strategy, long T = 0) const {
        CountSeries s;
        s.strategy = strategy;
        for (long B : bs) {
            auto t0 = std::chrono::steady_clock::now();
            Int n;
            if (strategy == "naive") n = count_naive(B);
            else if (strategy == "fast") n = count_fast(B);
            else if (strategy == "moebius") n = count_moebius(B, T > 0 ? T : B);
            else throw std::invalid_argument("unknown strategy: " + strategy);
            auto t1 = std::chrono::steady_clock::now();
            s.b_values.push_back(B);
            s.counts.push_back(n);
            s.seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
        }
        return s;
    }

  private:
    static long mobius_(long n) {
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

    VarietySpec spec_;
    QMat a1_;
    HeightSystem hs_;
    std::vector<Rat> expo_;
};

struct FitReport {
    std::vector<double> coefficients;  // degree 0..c2 of log B, for N(B)/B
    double leading = 0;
    double rms_residual = 0;
    bool slow_convergence_flag = true;  // log-scale convergence: always reported
    std::string note;
};

// Least squares of N(B)/B against a degree-c2 polynomial in log B.
inline FitReport fit_leading_constant(const CountSeries& s, int c2) {
    FitReport rep;
    const std::size_t n = s.b_values.size();
    if (int(n) < c2 + 2) throw std::invalid_argument("fit: need at least c2+2 samples");
    double lmin = 1e300, lmax = -1e300;
    for (long b : s.b_values) {
        lmin = std::min(lmin, std::log(double(b)));
        lmax = std::max(lmax, std::log(double(b)));
    }
    if (lmax - lmin < std::log(100.0) * 0.999)
        throw std::invalid_argument("fit: samples must span at least two decades");
    const int m = c2 + 1;
    std::vector<std::vector<long double>> ata(std::size_t(m), std::vector<long double>(std::size_t(m), 0));
    std::vector<long double> atb(std::size_t(m), 0);
    for (std::size_t i = 0; i < n; ++i) {
        long double lb = std::log((long double)(s.b_values[i]));
        long double y = (long double)(to_double(s.counts[i])) / (long double)(s.b_values[i]);
        std::vector<long double> row(static_cast<std::size_t>(m));
        long double p = 1;
        for (int j = 0; j < m; ++j) {
            row[std::size_t(j)] = p;
            p *= lb;
        }
        for (int a = 0; a < m; ++a) {
            for (int b = 0; b < m; ++b) ata[std::size_t(a)][std::size_t(b)] += row[std::size_t(a)] * row[std::size_t(b)];
            atb[std::size_t(a)] += row[std::size_t(a)] * y;
        }
    }
    // solve (Gaussian elimination, partial pivot)
    for (int c = 0; c < m; ++c) {
        int piv = c;
        for (int rr = c + 1; rr < m; ++rr)
            if (std::abs((double)ata[std::size_t(rr)][std::size_t(c)]) >
                std::abs((double)ata[std::size_t(piv)][std::size_t(c)]))
                piv = rr;
        std::swap(ata[std::size_t(c)], ata[std::size_t(piv)]);
        std::swap(atb[std::size_t(c)], atb[std::size_t(piv)]);
        if (ata[std::size_t(c)][std::size_t(c)] == 0) throw std::domain_error("fit: singular normal equations");
        for (int rr = 0; rr < m; ++rr) {
            if (rr == c) continue;
            long double f = ata[std::size_t(rr)][std::size_t(c)] / ata[std::size_t(c)][std::size_t(c)];
            for (int cc = c; cc < m; ++cc) ata[std::size_t(rr)][std::size_t(cc)] -= f * ata[std::size_t(c)][std::size_t(cc)];
            atb[std::size_t(rr)] -= f * atb[std::size_t(c)];
        }
    }
    rep.coefficients.resize(std::size_t(m));
    for (int j = 0; j < m; ++j)
        rep.coefficients[std::size_t(j)] = double(atb[std::size_t(j)] / ata[std::size_t(j)][std::size_t(j)]);
    rep.leading = rep.coefficients.back();
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double lb = std::log(double(s.b_values[i]));
        double y = to_double(s.counts[i]) / double(s.b_values[i]);
        double fit = 0, p = 1;
        for (int j = 0; j < m; ++j) {
            fit += rep.coefficients[std::size_t(j)] * p;
            p *= lb;
        }
        ss += (y - fit) * (y - fit);
    }
    rep.rms_residual = std::sqrt(ss / double(n));
    rep.slow_convergence_flag = true;
    rep.note = "finite-B counts converge at log-scale; the fitted leading coefficient is an "
               "order-of-magnitude diagnostic, not a precision estimate";
    return rep;
}

}  // namespace mtw
