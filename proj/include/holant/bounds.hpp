#pragma once

#include <functional>
#include <map>
#include <string>

#include "holant/numeric.hpp"
#include "holant/parallel.hpp"
#include "holant/signature.hpp"

namespace holant {

// ---------------------------------------------------------------------------
// family parameters and interval iteration
// ---------------------------------------------------------------------------

struct FibonacciFamilyParams {
    double c1 = 1, c2 = 1;          // 0 < c1 <= c2
    double p = 1, q = kInf;         // 0 < p <= q
    double lambda_lo = 1, lambda_hi = 1;

    void validate() const {
        if (!(c1 > 0 && c1 <= c2)) throw error("family: need 0 < c1 <= c2");
        if (!(p > 0 && p <= q)) throw error("family: need 0 < p <= q");
        if (!(lambda_lo > 0 && lambda_lo <= lambda_hi)) throw error("family: need 0 < lambda_lo <= lambda_hi");
    }
    double rho() const { return fib_rho(c1); }
};

struct Interval {
    double lo = 0, hi = kInf;
    double width() const { return hi - lo; }
    bool finite() const { return std::isfinite(lo) && std::isfinite(hi); }
    bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
};

// One application of h^c_{lambda,mu}(x) = (mu + (1+c*mu) lambda x) / (1 + lambda mu x)
// at a corner, with the analytic limits at infinite coordinates:
//   x = inf or lambda = inf  ->  c + 1/mu
//   mu = inf                 ->  c + 1/(lambda x)   (inf at x = 0)
//   x = 0                    ->  mu
inline double h_recursion_corner(double c, double mu, double lambda, double x) {
    if (std::isinf(mu)) {
        if (std::isinf(lambda) || std::isinf(x)) return c;
        if (x == 0) return kInf;
        return c + 1.0 / (lambda * x);
    }
    if (std::isinf(x) || std::isinf(lambda)) return c + 1.0 / mu;
    if (x == 0) return mu;
    return (mu + (1 + c * mu) * lambda * x) / (1 + lambda * mu * x);
}

// Interval image of the recursion family over a box of parameters. The map is
// a Mobius transform in each coordinate separately (one-signed partials for
// fixed values of the others), so box extrema sit at corners or their limits.
inline Interval interval_step(const FibonacciFamilyParams& fp, const Interval& I) {
    fp.validate();
    if (!(I.lo >= 0) || I.lo > I.hi) throw error("interval_step: degenerate interval");
    double lo = kInf, hi = -kInf;
    for (double c : {fp.c1, fp.c2})
        for (double mu : {fp.p, fp.q})
            for (double lam : {fp.lambda_lo, fp.lambda_hi})
                for (double x : {I.lo, I.hi}) {
                    double v = h_recursion_corner(c, mu, lam, x);
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
    return Interval{lo, hi};
}

struct ClampBounds {
    double R1 = 0, R2 = kInf;
    int L = 0;
};

// Iterates interval_step from [0, inf). Auto mode (L < 0) stops when the width
// stabilizes within 1e-6 or after 64 iterations and reports the count used.
inline ClampBounds compute_clamp_bounds(const FibonacciFamilyParams& fp, int L = -1) {
    fp.validate();
    Interval I{0, kInf};
    if (L >= 0) {
        for (int i = 0; i < L; ++i) I = interval_step(fp, I);
        return ClampBounds{I.lo, I.hi, L};
    }
    double prev_width = kInf;
    for (int it = 1; it <= 64; ++it) {
        I = interval_step(fp, I);
        double w = I.width();
        if (std::isfinite(w) && std::isfinite(prev_width) && std::abs(prev_width - w) < 1e-6)
            return ClampBounds{I.lo, I.hi, it};
        prev_width = w;
    }
    if (!I.finite()) throw error("compute_clamp_bounds: interval never became finite (unbounded family)");
    return ClampBounds{I.lo, I.hi, 64};
}

// ---------------------------------------------------------------------------
// recursion step maps and their closed-form partial derivatives
// ---------------------------------------------------------------------------

inline double step_h(double x, double mu, double c, double lambda) {
    if (std::isinf(x)) return mu > 0 ? c + 1.0 / mu : kInf;
    return (mu + (c * mu + 1) * lambda * x) / (1 + lambda * mu * x);
}

inline double step_g(double x, double y, double z, double c, double lambda) {
    if (std::isinf(y)) return kInf;
    if (std::isinf(x)) return z > 0 ? c + 1.0 / (lambda * z) : kInf;
    if (std::isinf(z)) return x > 0 ? c : lambda * y;
    return (lambda * y + x + c * lambda * x * z) / (1 + lambda * x * z);
}

inline double step_g_hat(double x, double y, double c, double lambda) { return step_g(x, y, y, c, lambda); }

// Theorem-2 variant (e_1 left free in the e'-sub-instance).
inline double step_g_free(double x, double y, double z, double c, double lambda) {
    if (std::isinf(y)) return kInf;
    if (std::isinf(x)) return z > 0 ? c + 1.0 / (lambda * z) : kInf;
    if (std::isinf(z)) return lambda * (y + c * x * (1 + y)) / (1 + lambda * x * (1 + y));
    return (x * (1 + y) + lambda * y * (1 + z) + lambda * c * x * (1 + y) * z) /
           (1 + z + lambda * x * (1 + y) * z);
}

struct StepPartials {
    double dx = 0, dy = 0, dz = 0;
    double value = 0;
};

inline StepPartials partials_h(double x, double mu, double c, double lambda) {
    double D = 1 + lambda * mu * x;
    StepPartials r;
    r.value = (mu + (c * mu + 1) * lambda * x) / D;
    r.dx = lambda * ((c * mu + 1) - mu * mu) / (D * D);
    return r;
}

inline StepPartials partials_g(double x, double y, double z, double c, double lambda) {
    double D = lambda * x * z + 1;
    StepPartials r;
    r.value = (lambda * c * x * z + lambda * y + x) / D;
    r.dx = (lambda * c * z + 1 - lambda * lambda * y * z) / (D * D);
    r.dy = lambda / D;
    r.dz = lambda * x * (c - lambda * y - x) / (D * D);
    return r;
}

inline StepPartials partials_g_hat(double x, double y, double c, double lambda) {
    double D = lambda * x * y + 1;
    StepPartials r;
    r.value = (lambda * c * x * y + lambda * y + x) / D;
    r.dx = (lambda * c * y + 1 - lambda * lambda * y * y) / (D * D);
    r.dy = lambda * (1 + c * x - x * x) / (D * D);
    return r;
}

inline StepPartials partials_g_free(double x, double y, double z, double c, double lambda) {
    double D = 1 + z + lambda * x * (1 + y) * z;
    StepPartials r;
    r.value = (x * (1 + y) + lambda * y * (1 + z) + lambda * c * x * (1 + y) * z) / D;
    r.dx = (y + 1) * (z + 1) * (c * lambda * z + 1 - lambda * lambda * y * z) / (D * D);
    r.dy = (z + 1) * (lambda * (c * x * z + z + 1) + lambda * lambda * x * z + x) / (D * D);
    r.dz = -x * (y + 1) * (lambda * (x - c + y * (lambda + x)) + 1) / (D * D);
    return r;
}

// ---------------------------------------------------------------------------
// amortized decay rates
// ---------------------------------------------------------------------------

enum class PotentialKind { Constant, Identity };

struct PotentialFunction {
    PotentialKind kind = PotentialKind::Constant;
    double phi_big(double x) const { return kind == PotentialKind::Constant ? 1.0 : x; }
    // phi = integral of 1/Phi: x for the constant potential, log for identity
    double phi(double x) const { return kind == PotentialKind::Constant ? x : std::log(x); }
    // Phi(x)/Phi(y) <= f(c) whenever x <= c*y (the "nice" bound)
    double nice_f(double c) const { return kind == PotentialKind::Constant ? 1.0 : c; }
};

enum class GVariant { Pinned, Free };  // Eq.(2) vs the Theorem-2 recursion

enum class DecayRate { Alpha1, Alpha2, Alpha3, Alpha4 };

struct RatePoint {
    double x = 1, y = 1, z = 1;  // y holds mu for Alpha1, the free variable for Alpha3/4
    double c = 1, lambda = 1;
};

inline double decay_rate(DecayRate which, const RatePoint& pt, const PotentialFunction& Phi,
                         GVariant gv = GVariant::Pinned) {
    switch (which) {
        case DecayRate::Alpha1: {
            auto r = partials_h(pt.x, pt.y, pt.c, pt.lambda);
            return std::abs(r.dx) * Phi.phi_big(pt.x) / Phi.phi_big(r.value);
        }
        case DecayRate::Alpha2: {
            auto r = gv == GVariant::Pinned ? partials_g(pt.x, pt.y, pt.z, pt.c, pt.lambda)
                                            : partials_g_free(pt.x, pt.y, pt.z, pt.c, pt.lambda);
            return (std::abs(r.dx) * Phi.phi_big(pt.x) + std::abs(r.dy) * Phi.phi_big(pt.y) +
                    std::abs(r.dz) * Phi.phi_big(pt.z)) /
                   Phi.phi_big(r.value);
        }
        case DecayRate::Alpha3: {
            auto r = partials_g_hat(pt.x, pt.y, pt.c, pt.lambda);
            return std::abs(r.dx) * Phi.phi_big(pt.x) / Phi.phi_big(r.value);
        }
        case DecayRate::Alpha4: {
            auto r = partials_g_hat(pt.x, pt.y, pt.c, pt.lambda);
            return std::abs(r.dy) * Phi.phi_big(pt.y) / Phi.phi_big(r.value);
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------
// grid verification over a parameter box
// ---------------------------------------------------------------------------

struct Axis {
    double lo = 1, hi = 1;  // hi may be +inf: reparameterized through u = v/(1+v)
};

struct ParameterBox {
    Axis clamp;    // recursion values x (and y, z for the g-rates)
    Axis free;     // unclamped partner values (mu for alpha1, y for alpha3, x for alpha4)
    Axis lambda;
    Axis c;
};

enum class RateSet { G, HG, All };

struct DecayReport {
    double sup_alpha = 0;
    std::map<std::string, double> argmax;
    int grid_n = 0;
    bool corner_checked = true;
    ParameterBox box;
};

namespace detail {
constexpr double kInfCap = 1e12;

inline std::vector<double> axis_grid(const Axis& a, int n) {
    std::vector<double> out;
    if (a.hi == a.lo) return {a.lo};
    if (std::isinf(a.hi)) {
        // uniform in u = v/(1+v); u = 1 evaluated as the analytic limit via a large cap
        double ulo = a.lo / (1 + a.lo);
        for (int i = 0; i < n; ++i) {
            double u = ulo + (1.0 - ulo) * i / (n - 1);
            out.push_back(u >= 1.0 ? kInfCap : std::max(a.lo, u / (1 - u)));
        }
        return out;
    }
    for (int i = 0; i < n; ++i) out.push_back(a.lo + (a.hi - a.lo) * i / (n - 1));
    return out;
}
}  // namespace detail

inline DecayReport verify_decay_on_box(const ParameterBox& box, RateSet rates, const PotentialFunction& Phi,
                                       int grid_n, GVariant gv = GVariant::Pinned, int threads = 1) {
    if (grid_n < 2) throw error("verify_decay_on_box: grid_n >= 2");
    DecayReport rep;
    rep.grid_n = grid_n;
    rep.box = box;
    auto xs = detail::axis_grid(box.clamp, grid_n);
    auto fs = detail::axis_grid(box.free, grid_n);
    auto ls = detail::axis_grid(box.lambda, grid_n);
    auto cs = detail::axis_grid(box.c, grid_n);

    struct Best {
        double a = -1;
        RatePoint pt;
        DecayRate which = DecayRate::Alpha1;
    };
    auto consider = [](Best& b, double a, DecayRate w, const RatePoint& pt) {
        if (a > b.a) b = Best{a, pt, w};
    };

    Best best;
    if (rates == RateSet::G || rates == RateSet::All) {
        // sup of alpha2 over clamp^3 x lambda x c
        auto worker = [&](std::size_t i) {
            Best local;
            double x = xs[i];
            for (double c : cs)
                for (double lam : ls)
                    for (double y : xs)
                        for (double z : xs) {
                            RatePoint pt{x, y, z, c, lam};
                            consider(local, decay_rate(DecayRate::Alpha2, pt, Phi, gv), DecayRate::Alpha2, pt);
                        }
            return local;
        };
        auto merge = [&](Best& acc, const Best& b) {
            if (b.a > acc.a) acc = b;
        };
        best = parallel_map_reduce<Best>(xs.size(), worker, merge, threads, best);
    }
    if (rates == RateSet::HG || rates == RateSet::All) {
        for (double c : cs)
            for (double lam : ls)
                for (double x : xs)
                    for (double f : fs) {
                        consider(best, decay_rate(DecayRate::Alpha1, RatePoint{x, f, 0, c, lam}, Phi, gv),
                                 DecayRate::Alpha1, RatePoint{x, f, 0, c, lam});
                        consider(best, decay_rate(DecayRate::Alpha3, RatePoint{x, f, 0, c, lam}, Phi, gv),
                                 DecayRate::Alpha3, RatePoint{x, f, 0, c, lam});
                        consider(best, decay_rate(DecayRate::Alpha4, RatePoint{f, x, 0, c, lam}, Phi, gv),
                                 DecayRate::Alpha4, RatePoint{f, x, 0, c, lam});
                    }
    }
    rep.sup_alpha = best.a;
    rep.argmax["x"] = best.pt.x;
    rep.argmax["y"] = best.pt.y;
    rep.argmax["z"] = best.pt.z;
    rep.argmax["c"] = best.pt.c;
    rep.argmax["lambda"] = best.pt.lambda;
    rep.argmax["rate"] = best.which == DecayRate::Alpha1   ? 1
                         : best.which == DecayRate::Alpha2 ? 2
                         : best.which == DecayRate::Alpha3 ? 3
                                                           : 4;
    return rep;
}

// ---------------------------------------------------------------------------
// regime selection
// ---------------------------------------------------------------------------

enum class RegimeKind { THM1, THM2, THM3 };

struct RecursionRegime {
    RegimeKind kind = RegimeKind::THM2;
    double alpha = 0.9;
    ClampBounds bounds;
    PotentialFunction potential;
    GVariant g_variant = GVariant::Pinned;
    FibonacciFamilyParams family;  // the certified (effective) family
};

inline double thm2_hg_bound(double p) {
    double f = (1 + p + p * p) / ((1 + p) * (1 + 2 * p));
    return std::max(0.5, f);
}

// Effective family once the estimator's own constructions are accounted for:
// free-end [1,1] vertices contribute ratio 1, decomposition bridges weight 1.
inline FibonacciFamilyParams effective_family(const FibonacciFamilyParams& fp) {
    FibonacciFamilyParams e = fp;
    e.p = std::min(fp.p, 1.0);
    e.q = std::max(fp.q, 1.0);
    e.lambda_lo = std::min(fp.lambda_lo, 1.0);
    e.lambda_hi = std::max(fp.lambda_hi, 1.0);
    return e;
}

struct Thm1WindowOptions {
    double margin = 0.02;
    double shrink = 0.95;
    int grid_n = 12;
    int bisect_iters = 30;
};

// Largest symmetric window [1-k, 1+k] around lambda = 1 on which all four
// decay rates verify below 1 - margin with the trivial potential, shrunk 5%.
inline double thm1_lambda_window(double c, double p, double q, const Thm1WindowOptions& opt = {}) {
    auto ok = [&](double k) -> bool {
        if (k <= 0 || k >= 0.5) return false;
        FibonacciFamilyParams fp{c, c, p, q, 1 - k, 1 + k};
        ClampBounds cb;
        try {
            cb = compute_clamp_bounds(fp);
        } catch (const error&) {
            return false;
        }
        if (cb.R1 <= 0 || !std::isfinite(cb.R2)) return false;
        ParameterBox box;
        box.clamp = {cb.R1, cb.R2};
        box.free = {std::min(p, 1.0), std::max(q, 1.0)};
        box.lambda = {1 - k, 1 + k};
        box.c = {c, c};
        auto rep = verify_decay_on_box(box, RateSet::All, PotentialFunction{PotentialKind::Constant},
                                       opt.grid_n, GVariant::Pinned);
        return rep.sup_alpha <= 1 - opt.margin;
    };
    double lo = 1e-9;
    if (!ok(lo)) return 0.0;
    double hi = 0.02;
    while (hi < 0.499 && ok(hi)) {
        lo = hi;
        hi = std::min(0.499, hi * 1.6);
    }
    for (int i = 0; i < opt.bisect_iters; ++i) {
        double mid = (lo + hi) / 2;
        (ok(mid) ? lo : hi) = mid;
    }
    return lo * opt.shrink;
}

// Regime table: THM2 when c1 >= 1.17 and lambda >= 1; THM3 when c is a single
// value >= 2.57 with ratios inside [c/2, c+2/c]; THM1 when c is a single value
// and the lambda range sits inside the numerically certified window around 1.
inline std::optional<RecursionRegime> select_regime(const FibonacciFamilyParams& fp_in, int grid_n = 16) {
    fp_in.validate();
    FibonacciFamilyParams fp = effective_family(fp_in);
    const double kThm2C = 1.17, kThm3C = 2.57;

    if (fp_in.c1 >= kThm2C && fp_in.lambda_lo >= 1.0) {
        RecursionRegime r;
        r.kind = RegimeKind::THM2;
        r.potential = PotentialFunction{PotentialKind::Identity};
        r.g_variant = GVariant::Free;
        r.alpha = std::max(0.9, thm2_hg_bound(fp.p));
        r.bounds = compute_clamp_bounds(fp);
        r.family = fp;
        return r;
    }

    bool single_c = fp.c2 - fp.c1 <= 1e-9 * std::max(1.0, fp.c1);
    if (single_c && fp_in.c1 >= kThm3C) {
        double c = fp_in.c1;
        if (fp_in.p >= c / 2 - 1e-12 && fp_in.q <= c + 2 / c + 1e-12) {
            RecursionRegime r;
            r.kind = RegimeKind::THM3;
            r.potential = PotentialFunction{PotentialKind::Identity};
            r.g_variant = GVariant::Pinned;
            r.bounds = compute_clamp_bounds(fp);
            ParameterBox box;
            box.clamp = {r.bounds.R1, r.bounds.R2};
            box.free = {fp.p, fp.q};
            box.lambda = {fp.lambda_lo, fp.lambda_hi};
            box.c = {c, c};
            auto rep = verify_decay_on_box(box, RateSet::All, r.potential, grid_n, r.g_variant);
            if (rep.sup_alpha < 1 - 1e-9) {
                r.alpha = rep.sup_alpha;
                r.family = fp;
                return r;
            }
        }
    }

    if (single_c) {
        double c = fp_in.c1;
        double k = thm1_lambda_window(c, fp.p, fp.q);
        if (k > 0 && fp.lambda_lo >= 1 - k && fp.lambda_hi <= 1 + k) {
            RecursionRegime r;
            r.kind = RegimeKind::THM1;
            r.potential = PotentialFunction{PotentialKind::Constant};
            r.g_variant = GVariant::Pinned;
            r.bounds = compute_clamp_bounds(fp);
            ParameterBox box;
            box.clamp = {r.bounds.R1, r.bounds.R2};
            box.free = {fp.p, fp.q};
            box.lambda = {fp.lambda_lo, fp.lambda_hi};
            box.c = {c, c};
            auto rep = verify_decay_on_box(box, RateSet::All, r.potential, grid_n, r.g_variant);
            if (rep.sup_alpha < 1 - 1e-9) {
                r.alpha = rep.sup_alpha;
                r.family = fp;
                return r;
            }
        }
    }
    return std::nullopt;
}

// Smallest t with C * alpha^t <= eps.
inline int depth_for_eps(double alpha, double C, double eps) {
    if (!(alpha > 0 && alpha < 1)) throw error("depth_for_eps: need 0 < alpha < 1");
    if (!(C >= 1)) throw error("depth_for_eps: need C >= 1");
    if (!(eps > 0 && eps < 1)) throw error("depth_for_eps: need 0 < eps < 1");
    if (C <= eps) return 0;
    int t = (int)std::ceil(std::log(C / eps) / std::log(1.0 / alpha));
    while (t > 0 && C * std::pow(alpha, t - 1) <= eps) --t;
    while (C * std::pow(alpha, t) > eps) ++t;
    return t;
}

// Depth budget for a regime at additive accuracy eps on a marginal.
inline int regime_depth(const RecursionRegime& r, double eps) {
    double C;
    if (r.potential.kind == PotentialKind::Constant) {
        C = std::max(1.0, r.bounds.R2 - r.bounds.R1);
    } else {
        double ratio = r.bounds.R2 / r.bounds.R1;
        C = std::max(1.0, (r.bounds.R2 - r.bounds.R1) / r.bounds.R1 * r.potential.nice_f(ratio));
    }
    return depth_for_eps(r.alpha, C, eps);
}

}  // namespace holant
