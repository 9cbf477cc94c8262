#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "holant/numeric.hpp"

namespace holant {

// Symmetric vertex function [f_0, ..., f_d] indexed by Hamming weight of the
// incident edge assignment. fib_c caches the recurrence parameter when known.
template <class T>
struct Signature {
    std::vector<T> values;
    std::optional<T> fib_c;

    Signature() = default;
    explicit Signature(std::vector<T> v, std::optional<T> c = std::nullopt)
        : values(std::move(v)), fib_c(std::move(c)) {}

    int arity() const { return static_cast<int>(values.size()) - 1; }
    const T& operator[](int k) const { return values.at(k); }

    bool nonnegative() const {
        return std::all_of(values.begin(), values.end(), [](const T& x) { return x >= 0; });
    }

    // Contract one slot against (1-tau, tau).
    Signature pinned(const T& tau) const {
        if (arity() < 1) throw error("cannot pin a scalar signature");
        std::vector<T> out(values.size() - 1);
        if (tau == 0) {
            for (std::size_t i = 0; i + 1 < values.size(); ++i) out[i] = values[i];
        } else if (tau == 1) {
            for (std::size_t i = 0; i + 1 < values.size(); ++i) out[i] = values[i + 1];
        } else {
            for (std::size_t i = 0; i + 1 < values.size(); ++i)
                out[i] = (T(1) - tau) * values[i] + tau * values[i + 1];
        }
        return Signature(std::move(out), fib_c);
    }

    // Keep values [f_0 .. f_new_arity].
    Signature truncated(int new_arity) const {
        if (new_arity < 0 || new_arity > arity()) throw error("bad truncation arity");
        std::vector<T> out(values.begin(), values.begin() + new_arity + 1);
        return Signature(std::move(out), fib_c);
    }
};

template <class T>
Signature<T> build_fibonacci_signature(const T& c, const T& f0, const T& f1, int arity) {
    if (arity < 1) throw error("build_fibonacci_signature: arity must be >= 1");
    if (f0 == 0 && f1 == 0) throw error("build_fibonacci_signature: (f0, f1) = (0, 0)");
    if (f0 < 0 || f1 < 0) throw error("build_fibonacci_signature: negative seed");
    std::vector<T> f{f0, f1};
    while ((int)f.size() < arity + 1) {
        T next = c * f[f.size() - 1] + f[f.size() - 2];
        if (next < 0) throw error("build_fibonacci_signature: negative value in recurrence");
        f.push_back(next);
    }
    return Signature<T>(std::move(f), c);
}

// The decomposition gadget [1, 0, 1, c, ...] of a given arity (values g_0..g_arity).
template <class T>
Signature<T> gadget_signature(const T& c, int arity) {
    if (arity < 1) throw error("gadget arity must be >= 1");
    std::vector<T> g{T(1), T(0)};
    while ((int)g.size() < arity + 1) g.push_back(c * g[g.size() - 1] + g[g.size() - 2]);
    return Signature<T>(std::move(g), c);
}

struct FamilyMembership {
    bool is_fibonacci = false;
    double c = 0.0;
    double p = kInf;   // min of defined consecutive ratios (0 when some f_{i+1}=0, f_i>0)
    double q = 0.0;    // max ratio; +inf when some f_i=0 with f_{i+1}>0
};

// Detects membership in the generalized Fibonacci family and the consecutive
// ratio range [p, q]. Signatures of arity < 2 are vacuously Fibonacci (no
// recurrence constraint); is_fibonacci is reported true with c unset (0).
template <class T>
FamilyMembership classify_signature(const Signature<T>& sig, double tol = 1e-9) {
    FamilyMembership m;
    const auto& f = sig.values;
    int d = sig.arity();
    for (int i = 0; i < d; ++i) {
        double fi = to_double(f[i]), fi1 = to_double(f[i + 1]);
        if (fi == 0.0) {
            if (fi1 != 0.0) m.q = kInf;
            // ratio undefined; contributes no p candidate
        } else {
            double r = fi1 / fi;
            m.p = std::min(m.p, r);
            m.q = std::max(m.q, r);
        }
    }
    if (m.p == kInf) m.p = 0.0;  // no defined ratio at all
    if (d < 2) {
        m.is_fibonacci = true;
        return m;
    }
    bool have_c = false;
    double c = 0.0;
    for (int i = 0; i + 2 <= d; ++i) {
        double fi = to_double(f[i]), fi1 = to_double(f[i + 1]), fi2 = to_double(f[i + 2]);
        if (fi1 == 0.0) {
            // constraint degenerates to f_{i+2} = f_i
            if (std::abs(fi2 - fi) > tol * std::max({1.0, std::abs(fi), std::abs(fi2)})) return m;
            continue;
        }
        double ci = (fi2 - fi) / fi1;
        if (!have_c) {
            c = ci;
            have_c = true;
        } else if (std::abs(ci - c) > tol * std::max(1.0, std::abs(c))) {
            return m;
        }
    }
    m.is_fibonacci = true;
    if (have_c) m.c = c;
    return m;
}

// Verifies the recurrence f_{i+2} = c f_{i+1} + f_i to a relative tolerance.
template <class T>
bool satisfies_fibonacci(const Signature<T>& sig, const T& c, double rel_tol = 1e-12) {
    const auto& f = sig.values;
    for (int i = 0; i + 2 <= sig.arity(); ++i) {
        double lhs = to_double(f[i + 2]);
        double rhs = to_double(c * f[i + 1] + f[i]);
        if (std::abs(lhs - rhs) > rel_tol * std::max({1.0, std::abs(lhs), std::abs(rhs)})) return false;
    }
    return true;
}

inline double fib_rho(double c) { return (c + std::sqrt(c * c + 4.0)) / 2.0; }

}  // namespace holant
