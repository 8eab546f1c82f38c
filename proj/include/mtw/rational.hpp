#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mtw {

using Int = boost::multiprecision::mpz_int;
using Rat = boost::multiprecision::mpq_rational;

inline Rat rat(long num, long den = 1) { return Rat(num, den); }

inline Int rat_num(const Rat& x) { return boost::multiprecision::numerator(x); }
inline Int rat_den(const Rat& x) { return boost::multiprecision::denominator(x); }

inline bool is_integer(const Rat& x) { return rat_den(x) == 1; }

inline Int to_int(const Rat& x) {
    if (!is_integer(x)) throw std::invalid_argument("rational is not an integer: " + x.str());
    return rat_num(x);
}

inline double to_double(const Rat& x) { return x.convert_to<double>(); }
inline double to_double(const Int& x) { return x.convert_to<double>(); }

inline Int ipow(Int base, unsigned e) {
    Int r = 1;
    while (e) {
        if (e & 1u) r *= base;
        base *= base;
        e >>= 1u;
    }
    return r;
}

inline Rat rpow(const Rat& base, long e) {
    if (e >= 0) return Rat(ipow(rat_num(base), unsigned(e)), ipow(rat_den(base), unsigned(e)));
    if (base == 0) throw std::domain_error("0^negative");
    return Rat(ipow(rat_den(base), unsigned(-e)), ipow(rat_num(base), unsigned(-e)));
}

// "p/q" or "p"; used across all JSON I/O so downstream consumers never see floats.
inline std::string rat_str(const Rat& x) { return x.str(); }

inline Rat rat_parse(const std::string& s) {
    try {
        return Rat(s);
    } catch (...) {
        throw std::invalid_argument("cannot parse rational: '" + s + "'");
    }
}

}  // namespace mtw
