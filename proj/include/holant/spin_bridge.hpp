#pragma once

#include "holant/recursion.hpp"

namespace holant {

// Ferromagnetic two-state spin system: edge matrix [beta 1; 1 gamma] and a
// uniform external field mu on state 1.
struct TwoSpinSystem {
    double beta = 1, gamma = 1, mu = 1;
};

struct SpinGraph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;
};

struct BridgeParams {
    double rho = 1, t = 1, lambda = 1;

    void validate() const {
        if (!(rho >= 1)) throw error("bridge: need rho >= 1");
        if (!(t != 0 && std::abs(t) <= 1)) throw error("bridge: need 0 < |t| <= 1");
        if (!(lambda > 0)) throw error("bridge: need lambda > 0");
        if (!(t * (1 - lambda) > 0)) throw error("bridge: need t(1 - lambda) > 0");
    }
};

// beta = (1 + lambda rho^2) / (t (1 - lambda)),  gamma = t (1 + lambda rho^-2) / (1 - lambda)
inline std::pair<double, double> bridge_to_spin(const BridgeParams& bp) {
    bp.validate();
    if (bp.lambda == 1) throw error("bridge: lambda = 1 is singular");
    double beta = (1 + bp.lambda * bp.rho * bp.rho) / (bp.t * (1 - bp.lambda));
    double gamma = bp.t * (1 + bp.lambda / (bp.rho * bp.rho)) / (1 - bp.lambda);
    return {beta, gamma};
}

inline double spin_Z_brute(const TwoSpinSystem& s, const SpinGraph& g) {
    if (g.n > 24) throw error("spin_Z_brute: too many vertices");
    double Z = 0;
    for (std::uint64_t mask = 0; mask < (1ULL << g.n); ++mask) {
        double w = 1;
        for (int v = 0; v < g.n; ++v)
            if ((mask >> v) & 1) w *= s.mu;
        for (auto [u, v] : g.edges) {
            int a = (mask >> u) & 1, b = (mask >> v) & 1;
            if (a == 0 && b == 0) w *= s.beta;
            else if (a == 1 && b == 1) w *= s.gamma;
        }
        Z += w;
    }
    return Z;
}

// Holant instance equivalent to the spin system: the degree-n vertex carries
// f_k = rho^k + mu t^n (-rho)^{-k}, every edge has weight lambda. Each vertex
// is scaled by s^{deg/2} with s = 1/(t(1-lambda)) so the partition functions
// agree exactly, not just up to a per-edge factor.
inline Instance<double> spin_to_fibonacci(const TwoSpinSystem& spin, const SpinGraph& g,
                                          const BridgeParams& bp, double tol = 1e-9) {
    auto [beta, gamma] = bridge_to_spin(bp);
    double resid = std::max(std::abs(beta - spin.beta) / std::max(1.0, std::abs(spin.beta)),
                            std::abs(gamma - spin.gamma) / std::max(1.0, std::abs(spin.gamma)));
    if (resid > tol)
        throw error("spin_to_fibonacci: bridge residual " + fmt17(resid) + " exceeds tolerance (beta=" +
                    fmt17(beta) + ", gamma=" + fmt17(gamma) + ")");
    std::vector<int> deg(g.n, 0);
    for (auto [u, v] : g.edges) {
        if (u == v) throw error("spin_to_fibonacci: self-loop");
        deg[u]++;
        deg[v]++;
    }
    double s = 1.0 / (bp.t * (1 - bp.lambda));
    Instance<double> inst;
    for (int v = 0; v < g.n; ++v) {
        int n = deg[v];
        std::vector<double> f(n + 1);
        double scale = std::pow(s, n / 2.0);
        for (int k = 0; k <= n; ++k) {
            double val = std::pow(bp.rho, k) + spin.mu * std::pow(bp.t, n) * std::pow(-bp.rho, -k);
            if (val < 0) {
                if (val > -1e-12) val = 0;
                else throw error("spin_to_fibonacci: negative signature value (field/basis out of range)");
            }
            f[k] = val * scale;
        }
        std::optional<double> c;
        if (n >= 2) c = bp.rho - 1.0 / bp.rho;
        inst.vertices.emplace(v, Signature<double>(std::move(f), c));
    }
    int id = 0;
    for (auto [u, v] : g.edges) inst.edges.emplace(id++, Edge<double>{u, v, bp.lambda});
    return inst;
}

// ---------------------------------------------------------------------------
// the tractability curve Gamma(beta) = max(Gamma1, Gamma2, Gamma3)
// ---------------------------------------------------------------------------

struct GammaCurveOptions {
    double rho1 = 2.92;   // Gamma1: t = 1 (c = 2.57)
    double rho2 = 1.75;   // Gamma2: t = -1 (c = 1.17)
    double rho3_min = 1.02, rho3_max = 2.2;
    int rho3_rows = 22;
    Thm1WindowOptions window;
};

class GammaCurve {
public:
    struct G3Row {
        double rho = 1, lambda2 = 1, beta = 0, gamma = 0;
    };

    explicit GammaCurve(GammaCurveOptions opt = {}) : opt_(opt) { build_table(); }

    // Gamma1/Gamma2 parametric points at a given lambda
    static std::pair<double, double> g1_point(double rho, double lam) {
        return {(1 + rho * rho * lam) / (1 - lam), (1 + lam / (rho * rho)) / (1 - lam)};
    }
    static std::pair<double, double> g2_point(double rho, double lam) {
        return {(1 + rho * rho * lam) / (lam - 1), (1 + lam / (rho * rho)) / (lam - 1)};
    }

    // gamma value of each branch at a given beta (0 when the branch does not reach it)
    double gamma1(double beta) const {
        if (beta <= 1) return beta >= 1 ? 1.0 : 0.0;
        double lo = 0, hi = 1 - 1e-15;
        for (int i = 0; i < 200; ++i) {
            double mid = (lo + hi) / 2;
            (g1_point(opt_.rho1, mid).first < beta ? lo : hi) = mid;
        }
        return g1_point(opt_.rho1, lo).second;
    }
    double gamma2(double beta) const {
        double r2 = opt_.rho2 * opt_.rho2;
        if (beta <= r2 + 1e-12) return 0.0;  // beta(lambda) > rho^2 on (1, inf)
        double lo = 1 + 1e-15, hi = 2;
        while (g2_point(opt_.rho2, hi).first > beta) hi *= 2;
        for (int i = 0; i < 200; ++i) {
            double mid = (lo + hi) / 2;
            (g2_point(opt_.rho2, mid).first > beta ? lo : hi) = mid;
        }
        return g2_point(opt_.rho2, lo).second;
    }
    double gamma3(double beta) const {
        if (table_.empty() || beta < table_.front().beta || beta > table_.back().beta) return 0.0;
        // beta ascending in the table; invert rho -> beta by bisection with
        // lambda2 linearly interpolated over the rho grid
        double rlo = table_.back().rho, rhi = table_.front().rho;  // beta decreasing in rho
        for (int i = 0; i < 100; ++i) {
            double mid = (rlo + rhi) / 2;
            (beta_at(mid) > beta ? rlo : rhi) = mid;
        }
        double rho = (rlo + rhi) / 2, l2 = lambda2_at(rho);
        return (1 + l2 / (rho * rho)) / (l2 - 1);
    }

    double operator()(double beta) const {
        if (beta < 1) throw error("gamma_curve: beta >= 1 required");
        return std::max({gamma1(beta), gamma2(beta), gamma3(beta)});
    }

    const std::vector<G3Row>& table() const { return table_; }

    double lambda2_at(double rho) const {
        if (table_.empty()) return 0;
        if (rho >= table_.front().rho) return table_.front().lambda2;
        if (rho <= table_.back().rho) return table_.back().lambda2;
        for (std::size_t i = 0; i + 1 < table_.size(); ++i) {
            double r0 = table_[i].rho, r1 = table_[i + 1].rho;  // descending
            if (rho <= r0 && rho >= r1) {
                double w = (r0 - rho) / (r0 - r1);
                return table_[i].lambda2 * (1 - w) + table_[i + 1].lambda2 * w;
            }
        }
        return table_.back().lambda2;
    }
    double beta_at(double rho) const {
        double l2 = lambda2_at(rho);
        return (1 + rho * rho * l2) / (l2 - 1);
    }

private:
    void build_table() {
        double lo = std::log(opt_.rho3_min - 1), hi = std::log(opt_.rho3_max - 1);
        for (int i = 0; i < opt_.rho3_rows; ++i) {
            double rho = 1 + std::exp(hi + (lo - hi) * i / (opt_.rho3_rows - 1));  // descending rho
            double c = rho - 1 / rho;
            double w = thm1_lambda_window(c, std::min(c / 2, 1.0), kInf, opt_.window);
            if (w <= 1e-7) continue;
            G3Row row;
            row.rho = rho;
            row.lambda2 = 1 + w;
            row.beta = (1 + rho * rho * row.lambda2) / (row.lambda2 - 1);
            row.gamma = (1 + row.lambda2 / (rho * rho)) / (row.lambda2 - 1);
            if (!table_.empty() && row.beta <= table_.back().beta) continue;  // keep beta monotone
            table_.push_back(row);
        }
    }

    GammaCurveOptions opt_;
    std::vector<G3Row> table_;  // rho descending, beta ascending
};

// ---------------------------------------------------------------------------
// classification and the end-to-end spin FPTAS
// ---------------------------------------------------------------------------

struct SpinClassification {
    bool tractable = false;
    bool swapped = false;      // (beta, gamma) exchanged to make beta >= gamma
    BridgeParams witness;
    std::string branch;        // "G1", "G2", "G3"
    std::string reason;        // failure condition when not tractable
    double gamma_bound = 0;    // Gamma(beta) at the canonical beta
};

namespace detail {

inline double bridge_product(double rho, double lam) {
    double a = 1 + lam * rho * rho, b = 1 + lam / (rho * rho);
    return a * b / ((1 - lam) * (1 - lam));
}

}  // namespace detail

// Canonicalizes to beta >= gamma, then looks for a boundary point with the
// same beta*gamma product; the witness rescales t = t* beta* / beta.
inline SpinClassification classify_spin(const TwoSpinSystem& spin, const GammaCurve& curve) {
    SpinClassification out;
    double B = spin.beta, G = spin.gamma;
    if (G > B) {
        std::swap(B, G);
        out.swapped = true;
    }
    if (!(B >= 0 && G >= 0)) {
        out.reason = "beta, gamma must be nonnegative";
        return out;
    }
    double P = B * G;
    if (!(P > 1)) {
        out.reason = "beta*gamma <= 1 (not in the ferromagnetic range of this method)";
        return out;
    }
    out.gamma_bound = B >= 1 ? curve(B) : 0.0;

    struct Candidate {
        BridgeParams bp;
        const char* branch;
        double beta_star;
    };
    std::vector<Candidate> cands;

    // Gamma1: t* = 1, rho = 2.92, lambda in (0,1); product increasing in lambda
    {
        double rho = 2.92, lo = 0, hi = 1 - 1e-15;
        for (int i = 0; i < 200; ++i) {
            double mid = (lo + hi) / 2;
            (detail::bridge_product(rho, mid) < P ? lo : hi) = mid;
        }
        double lam = lo;
        double beta_star = (1 + lam * rho * rho) / (1 - lam);
        double t = beta_star / B;
        if (t > 0 && t <= 1 + 1e-12)
            cands.push_back({BridgeParams{rho, std::min(t, 1.0), lam}, "G1", beta_star});
    }
    // Gamma2: t* = -1, rho = 1.75, lambda in (1, inf); product decreasing to 1
    {
        double rho = 1.75, lo = 1 + 1e-15, hi = 2;
        while (detail::bridge_product(rho, hi) > P) hi *= 2;
        for (int i = 0; i < 200; ++i) {
            double mid = (lo + hi) / 2;
            (detail::bridge_product(rho, mid) > P ? lo : hi) = mid;
        }
        double lam = hi;
        double beta_star = (1 + lam * rho * rho) / (lam - 1);
        double t = -beta_star / B;
        if (std::abs(t) <= 1 + 1e-12)
            cands.push_back({BridgeParams{rho, std::max(t, -1.0), lam}, "G2", beta_star});
    }
    // Gamma3: t* = -1, lambda = lambda2(rho) from the window table
    if (!curve.table().empty()) {
        const auto& tab = curve.table();
        double r_hi = tab.front().rho, r_lo = tab.back().rho;
        auto prod_at = [&](double rho) { return detail::bridge_product(rho, curve.lambda2_at(rho)); };
        if (P >= std::min(prod_at(r_hi), prod_at(r_lo)) && P <= std::max(prod_at(r_hi), prod_at(r_lo))) {
            bool incr = prod_at(r_hi) > prod_at(r_lo);  // product vs rho orientation
            double lo = r_lo, hi = r_hi;
            for (int i = 0; i < 100; ++i) {
                double mid = (lo + hi) / 2;
                bool below = prod_at(mid) < P;
                (below == incr ? lo : hi) = mid;
            }
            double rho = (lo + hi) / 2, lam = curve.lambda2_at(rho);
            double beta_star = (1 + lam * rho * rho) / (lam - 1);
            double t = -beta_star / B;
            if (std::abs(t) <= 1 + 1e-12)
                cands.push_back({BridgeParams{rho, std::max(t, -1.0), lam}, "G3", beta_star});
        }
    }

    if (cands.empty()) {
        out.reason = "gamma exceeds Gamma(beta): no boundary point shares the product beta*gamma";
        return out;
    }
    auto best = std::min_element(cands.begin(), cands.end(),
                                 [](const Candidate& a, const Candidate& b) { return a.beta_star < b.beta_star; });
    out.tractable = true;
    out.witness = best->bp;
    out.branch = best->branch;
    return out;
}

struct SpinEstimate {
    double Z = 0;
    SpinClassification cls;
    EstimateZResult inner;
};

// FPTAS for the spin partition function through the holographic bridge.
inline SpinEstimate estimate_spin_Z(const TwoSpinSystem& spin_in, const SpinGraph& g, double eps,
                                    const GammaCurve& curve, EstimatorOptions opt = {}) {
    SpinEstimate out;
    out.cls = classify_spin(spin_in, curve);
    if (!out.cls.tractable) throw error("estimate_spin_Z: outside tractable region: " + out.cls.reason);

    TwoSpinSystem spin = spin_in;
    double field_scale = 1.0;
    if (out.cls.swapped) {
        // Z(beta, gamma, mu) = mu^n Z(gamma, beta, 1/mu)
        std::swap(spin.beta, spin.gamma);
        field_scale = std::pow(spin_in.mu, g.n);
        spin.mu = 1.0 / spin_in.mu;
    }
    auto inst = spin_to_fibonacci(spin, g, out.cls.witness);
    auto fam = classify_instance(inst);
    if (!fam.all_fibonacci) throw error("estimate_spin_Z: bridge produced non-Fibonacci signatures");
    auto regime = select_regime(fam.params);
    if (!regime)
        throw error("estimate_spin_Z: witness family failed regime certification (branch " +
                    out.cls.branch + ")");
    out.inner = estimate_Z(inst, eps, *regime, opt);
    out.Z = out.inner.Z * field_scale;
    return out;
}

}  // namespace holant
