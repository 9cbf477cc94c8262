#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace holant {

using rational = boost::multiprecision::cpp_rational;
using bigint = boost::multiprecision::cpp_int;

class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

inline double to_double(const rational& r) { return r.template convert_to<double>(); }
inline double to_double(double x) { return x; }

// cpp_int's string constructor honors 0x/0 prefixes; build from plain decimal digits.
inline bigint bigint_from_decimal(const std::string& s) {
    std::size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = s[i++] == '-';
    if (i >= s.size()) throw error("bad integer '" + s + "'");
    bigint v(0);
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') throw error("bad integer '" + s + "'");
        v = v * 10 + (s[i] - '0');
    }
    return neg ? -v : v;
}

// Parses a decimal string ("3", "-0.25", "1.5e-3") or "p/q" into an exact rational.
inline rational parse_rational(const std::string& s_in) {
    std::string s = s_in;
    if (s.empty()) throw error("empty number");
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        bigint num = bigint_from_decimal(s.substr(0, slash));
        bigint den = bigint_from_decimal(s.substr(slash + 1));
        if (den == 0) throw error("zero denominator in '" + s_in + "'");
        return rational(num, den);
    }
    bool neg = false;
    std::size_t i = 0;
    if (s[i] == '+' || s[i] == '-') { neg = s[i] == '-'; ++i; }
    std::string digits;
    long frac_digits = 0, exponent = 0;
    bool seen_dot = false, any = false;
    for (; i < s.size(); ++i) {
        char ch = s[i];
        if (ch == '.') {
            if (seen_dot) throw error("bad number '" + s_in + "'");
            seen_dot = true;
        } else if (ch == 'e' || ch == 'E') {
            exponent = std::stol(s.substr(i + 1));
            break;
        } else if (ch >= '0' && ch <= '9') {
            digits.push_back(ch);
            if (seen_dot) ++frac_digits;
            any = true;
        } else {
            throw error("bad number '" + s_in + "'");
        }
    }
    if (!any) throw error("bad number '" + s_in + "'");
    bigint mant = bigint_from_decimal(digits.empty() ? "0" : digits);
    if (neg) mant = -mant;
    long e = exponent - frac_digits;
    rational r(mant);
    if (e > 0) {
        bigint p(1);
        for (long k = 0; k < e; ++k) p *= 10;
        r *= rational(p);
    } else if (e < 0) {
        bigint p(1);
        for (long k = 0; k < -e; ++k) p *= 10;
        r /= rational(p);
    }
    return r;
}

// Exact decimal expansion when the denominator divides a power of ten, else "p/q".
inline std::string rational_to_string(const rational& r) {
    bigint num = boost::multiprecision::numerator(r);
    bigint den = boost::multiprecision::denominator(r);
    bigint d = den;
    int twos = 0, fives = 0;
    while (d % 2 == 0) { d /= 2; ++twos; }
    while (d % 5 == 0) { d /= 5; ++fives; }
    if (d == 1) {
        int shift = std::max(twos, fives);
        bigint scaled = num;
        for (int k = 0; k < shift - twos; ++k) scaled *= 2;
        for (int k = 0; k < shift - fives; ++k) scaled *= 5;
        bool neg = scaled < 0;
        if (neg) scaled = -scaled;
        std::string s = scaled.str();
        std::string out;
        if (shift == 0) {
            out = s;
        } else {
            while ((long)s.size() <= shift) s.insert(s.begin(), '0');
            out = s.substr(0, s.size() - shift) + "." + s.substr(s.size() - shift);
        }
        return (neg ? "-" : "") + out;
    }
    return num.str() + "/" + den.str();
}

inline std::string rational_to_string(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// sqrt usable from generic code: exact for rationals that are perfect squares.
inline std::optional<rational> exact_sqrt(const rational& r) {
    if (r < 0) return std::nullopt;
    bigint num = boost::multiprecision::numerator(r);
    bigint den = boost::multiprecision::denominator(r);
    bigint sn = boost::multiprecision::sqrt(num);
    bigint sd = boost::multiprecision::sqrt(den);
    if (sn * sn == num && sd * sd == den) return rational(sn, sd);
    return std::nullopt;
}

template <class T>
struct scalar_traits;

template <>
struct scalar_traits<rational> {
    static rational sqrt_or_throw(const rational& x) {
        auto s = exact_sqrt(x);
        if (!s) throw error("sqrt(" + rational_to_string(x) + ") is irrational; use a double instance");
        return *s;
    }
    static bool is_zero(const rational& x) { return x == 0; }
    static std::string to_string(const rational& x) { return rational_to_string(x); }
};

template <>
struct scalar_traits<double> {
    static double sqrt_or_throw(double x) {
        if (x < 0) throw error("sqrt of negative");
        return std::sqrt(x);
    }
    static bool is_zero(double x) { return x == 0.0; }
    static std::string to_string(double x) { return fmt17(x); }
};

inline std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 1469598103934665603ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t fnv1a(const std::string& s) { return fnv1a(s.data(), s.size()); }

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace holant
