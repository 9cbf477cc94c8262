#pragma once

#include <unordered_map>

#include "holant/bounds.hpp"
#include "holant/extended_spin.hpp"

namespace holant {

// ---------------------------------------------------------------------------
// family classification of an instance
// ---------------------------------------------------------------------------

struct InstanceFamily {
    bool all_fibonacci = true;
    FibonacciFamilyParams params;
};

template <class T>
InstanceFamily classify_instance(const Instance<T>& inst) {
    InstanceFamily out;
    double c_lo = kInf, c_hi = -kInf, p = kInf, q = 0, l_lo = kInf, l_hi = 0;
    for (const auto& [vid, sig] : inst.vertices) {
        auto m = classify_signature(sig);
        if (!m.is_fibonacci) out.all_fibonacci = false;
        if (sig.arity() >= 2) {
            c_lo = std::min(c_lo, m.c);
            c_hi = std::max(c_hi, m.c);
        }
        if (sig.arity() >= 1) {
            p = std::min(p, m.p);
            q = std::max(q, m.q);
        }
    }
    for (const auto& [id, e] : inst.edges) {
        double l = to_double(e.lambda);
        l_lo = std::min(l_lo, l);
        l_hi = std::max(l_hi, l);
    }
    out.params.c1 = std::isfinite(c_lo) ? c_lo : 1.0;
    out.params.c2 = c_hi >= c_lo ? c_hi : out.params.c1;
    out.params.p = std::isfinite(p) ? p : 1.0;
    out.params.q = std::max(q, out.params.p);
    out.params.lambda_lo = std::isfinite(l_lo) ? l_lo : 1.0;
    out.params.lambda_hi = l_hi >= l_lo ? l_hi : out.params.lambda_lo;
    return out;
}

// ---------------------------------------------------------------------------
// one step of the computation tree
// ---------------------------------------------------------------------------

struct SubInstanceBundle {
    enum class Case { Base, H, G, GHat } kind = Case::Base;
    double lambda_e1 = 1;
    double c = 0;                  // Fibonacci parameter of the decomposed vertex
    double f0 = 0, f1 = 0, f2 = 0; // attaching signature values (Base / H cases)
    // sub-instances plus their dangling edge ids, in recursion order:
    //   H:    { Omega^{e_1} }
    //   G:    { Omega^{e'}, Omega^{e_1}, tilde Omega^{e_1} }
    //   GHat: { Omega^{e'}, Omega^{e_1} }
    std::vector<std::pair<Instance<double>, int>> subs;
};

// Decomposes the attaching vertex, removes e with the gadget, and pins per the
// scheme. GVariant::Pinned pins e_1 to 0 for Omega^{e'}; GVariant::Free leaves
// e_1 free there (the Theorem-2 recursion). Omega^{e_1} and tilde Omega^{e_1}
// pin e' to 0 and 1 respectively.
inline SubInstanceBundle build_subinstances(const Instance<double>& inst, int dangling_id,
                                            GVariant scheme) {
    SubInstanceBundle out;
    int v = inst.dangling.at(dangling_id);
    const Signature<double>& sig = inst.vertices.at(v);
    auto inc = inst.incident_ids(v);
    std::vector<int> others;
    for (int id : inc)
        if (id != dangling_id) others.push_back(id);
    out.f0 = to_double(sig[0]);
    out.f1 = to_double(sig[1 <= sig.arity() ? 1 : 0]);

    if (others.empty()) {
        out.kind = SubInstanceBundle::Case::Base;
        return out;
    }
    int e1 = others.front();  // smallest incident edge id
    if (inst.is_dangling(e1)) throw error("build_subinstances: expected a single dangling edge");
    out.lambda_e1 = to_double(inst.edges.at(e1).lambda);

    if (others.size() == 1) {
        out.kind = SubInstanceBundle::Case::H;
        out.f2 = to_double(sig[2]);
        Instance<double> rest = inst;
        rest.dangling.erase(dangling_id);
        rest = remove_vertex_to_dangling(rest, v);
        out.subs.emplace_back(std::move(rest), e1);
        return out;
    }

    // d >= 2: split off {e, e_1} onto the gadget, then drop e and the gadget.
    auto m = classify_signature(sig);
    if (!m.is_fibonacci) throw error("build_subinstances: attaching vertex is not Fibonacci");
    out.c = m.c;
    std::set<int> E2{dangling_id, e1};
    std::set<int> E1(others.begin() + 1, others.end());
    auto dec = decompose_vertex(inst, v, E1, E2);
    Instance<double> two = dec.inst;
    two.dangling.erase(dangling_id);
    two = remove_vertex_to_dangling(two, dec.v_gadget);
    int eprime = dec.bridge_edge;  // now dangling at v

    int v_e1 = two.dangling.at(e1);
    bool connected = component_of(two, v).count(v_e1) > 0;

    if (!connected) {
        out.kind = SubInstanceBundle::Case::GHat;
        out.subs.emplace_back(pin_edge(two, e1, 0.0), eprime);
        out.subs.emplace_back(pin_edge(two, eprime, 0.0), e1);
        return out;
    }
    out.kind = SubInstanceBundle::Case::G;
    if (scheme == GVariant::Free)
        out.subs.emplace_back(attach_free_end(two, e1), eprime);
    else
        out.subs.emplace_back(pin_edge(two, e1, 0.0), eprime);
    out.subs.emplace_back(pin_edge(two, eprime, 0.0), e1);
    out.subs.emplace_back(pin_edge(two, eprime, 1.0), e1);
    return out;
}

// ---------------------------------------------------------------------------
// clamped computation-tree estimator
// ---------------------------------------------------------------------------

struct RatioEstimate {
    double value = 0;
    int depth_used = 0;
    bool exact = false;
};

struct EstimatorOptions {
    bool use_cache = true;
    ShallowOptions shallow;
};

struct EstimatorStats {
    long nodes = 0;
    long cache_hits = 0;
    long shallow_calls = 0;
};

class RatioEstimator {
public:
    RatioEstimator(RecursionRegime regime, EstimatorOptions opt = {})
        : regime_(std::move(regime)), opt_(opt) {}

    const RecursionRegime& regime() const { return regime_; }
    const EstimatorStats& stats() const { return stats_; }

    // R^t per the three-branch recursion: exact when SP <= 2L, R1 at t = 0,
    // otherwise one recursion step with the result clamped to [R1, R2].
    RatioEstimate estimate(const Instance<double>& inst, int dangling_id, int t) {
        ++stats_.nodes;
        int v = inst.dangling.at(dangling_id);
        Instance<double> comp = restrict_to_component(inst, component_of(inst, v));
        std::string key;
        if (opt_.use_cache) {
            key = canonical_key(comp) + "#" + std::to_string(dangling_id);
            if (auto it = exact_cache_.find(key); it != exact_cache_.end()) {
                ++stats_.cache_hits;
                return RatioEstimate{it->second, 0, true};
            }
        }
        int L = regime_.bounds.L;
        if (!simple_path_reaches(comp, dangling_id, 2 * L).exceeds) {
            ++stats_.shallow_calls;
            double val = shallow_exact_ratio(comp, dangling_id, opt_.shallow);
            if (opt_.use_cache) exact_cache_.emplace(key, val);
            return RatioEstimate{val, 0, true};
        }
        if (t <= 0) return RatioEstimate{regime_.bounds.R1, 0, false};
        if (opt_.use_cache) {
            if (auto it = approx_cache_.find(key + "@" + std::to_string(t)); it != approx_cache_.end()) {
                ++stats_.cache_hits;
                return RatioEstimate{it->second, t, false};
            }
        }

        auto bundle = build_subinstances(comp, dangling_id, regime_.g_variant);
        double raw = 0;
        bool children_exact = true;
        int depth = 0;
        switch (bundle.kind) {
            case SubInstanceBundle::Case::Base:
                raw = bundle.f0 > 0 ? bundle.f1 / bundle.f0 : kInf;
                break;
            case SubInstanceBundle::Case::H: {
                auto ch = estimate(bundle.subs[0].first, bundle.subs[0].second, t - 1);
                children_exact = ch.exact;
                depth = ch.depth_used + 1;
                raw = combine_h(bundle, ch.value);
                break;
            }
            case SubInstanceBundle::Case::G: {
                auto cx = estimate(bundle.subs[0].first, bundle.subs[0].second, t - 1);
                auto cy = estimate(bundle.subs[1].first, bundle.subs[1].second, t - 1);
                auto cz = estimate(bundle.subs[2].first, bundle.subs[2].second, t - 1);
                children_exact = cx.exact && cy.exact && cz.exact;
                depth = 1 + std::max({cx.depth_used, cy.depth_used, cz.depth_used});
                raw = regime_.g_variant == GVariant::Free
                          ? step_g_free(cx.value, cy.value, cz.value, bundle.c, bundle.lambda_e1)
                          : step_g(cx.value, cy.value, cz.value, bundle.c, bundle.lambda_e1);
                break;
            }
            case SubInstanceBundle::Case::GHat: {
                auto cx = estimate(bundle.subs[0].first, bundle.subs[0].second, t - 1);
                auto cy = estimate(bundle.subs[1].first, bundle.subs[1].second, t - 1);
                children_exact = cx.exact && cy.exact;
                depth = 1 + std::max(cx.depth_used, cy.depth_used);
                raw = step_g_hat(cx.value, cy.value, bundle.c, bundle.lambda_e1);
                break;
            }
        }
        if (std::isnan(raw)) throw error("estimate_ratio: numeric fault in a recursion step");
        double clamped = std::min(std::max(raw, regime_.bounds.R1), regime_.bounds.R2);
        bool exact = children_exact && clamped == raw;
        if (opt_.use_cache) {
            if (exact) exact_cache_.emplace(key, clamped);
            else approx_cache_.emplace(key + "@" + std::to_string(t), clamped);
        }
        return RatioEstimate{clamped, exact ? 0 : depth, exact};
    }

private:
    static double combine_h(const SubInstanceBundle& b, double x) {
        // (f1 + lambda f2 x) / (f0 + lambda f1 x), with the x -> inf limit
        if (std::isinf(x)) {
            if (b.f1 > 0) return b.f2 / b.f1;
            return b.f2 > 0 ? kInf : 0.0;
        }
        double num = b.f1 + b.lambda_e1 * b.f2 * x;
        double den = b.f0 + b.lambda_e1 * b.f1 * x;
        if (den == 0) return num == 0 ? 0.0 : kInf;
        return num / den;
    }

    RecursionRegime regime_;
    EstimatorOptions opt_;
    EstimatorStats stats_;
    std::unordered_map<std::string, double> exact_cache_;
    std::unordered_map<std::string, double> approx_cache_;
};

// ---------------------------------------------------------------------------
// marginal of a regular edge and the partition-function estimator
// ---------------------------------------------------------------------------

namespace detail {

// Reduce an endpoint of `e` to degree <= 3 by splitting off {e, smallest
// sibling} onto a gadget vertex.
inline void reduce_endpoint(Instance<double>& inst, int e) {
    for (int round = 0; round < 2; ++round) {
        const auto& ed = inst.edges.at(e);
        int endpoint = round == 0 ? ed.u : ed.v;
        if (inst.degree(endpoint) <= 3) continue;
        auto inc = inst.incident_ids(endpoint);
        int sibling = -1;
        for (int id : inc)
            if (id != e && !inst.is_dangling(id)) { sibling = id; break; }
        if (sibling < 0) continue;
        std::set<int> E2{e, sibling};
        std::set<int> E1;
        for (int id : inc)
            if (!E2.count(id)) E1.insert(id);
        inst = decompose_vertex(inst, endpoint, E1, E2).inst;
    }
}

}  // namespace detail

// Additive-eps estimate of P(sigma(e) = 0) for a regular edge: endpoints are
// decomposed to degree <= 3, the <= 16 boundary assignments are enumerated,
// each chain-factored dangling marginal estimated by the clamped recursion
// (earlier edges pinned to their values, later edges half-pinned).
inline double marginal_of_regular_edge(RatioEstimator& est, const Instance<double>& inst_in, int e,
                                       double eps) {
    if (!inst_in.dangling.empty())
        throw error("marginal_of_regular_edge: attach free ends to dangling edges first");
    Instance<double> inst = inst_in;
    detail::reduce_endpoint(inst, e);
    const auto ed = inst.edges.at(e);
    int u = ed.u, v = ed.v;
    double lambda_e = to_double(ed.lambda);
    const Signature<double> fu = inst.vertices.at(u);
    const Signature<double> fv = inst.vertices.at(v);

    std::vector<int> boundary;
    for (int id : inst.incident_ids(u))
        if (id != e) boundary.push_back(id);
    for (int id : inst.incident_ids(v))
        if (id != e && std::find(boundary.begin(), boundary.end(), id) == boundary.end())
            boundary.push_back(id);
    std::sort(boundary.begin(), boundary.end());
    if (boundary.size() > 4) throw error("marginal_of_regular_edge: endpoint reduction failed");

    Instance<double> base = remove_vertex_to_dangling(remove_vertex_to_dangling(inst, u), v);
    std::vector<int> chain;  // boundary edges that survive into the dangling instance
    for (int id : boundary)
        if (base.is_dangling(id)) chain.push_back(id);

    int t = regime_depth(est.regime(), eps / 16.0);

    double num0 = 0, num1 = 0;
    for (std::uint64_t mask = 0; mask < (1ULL << boundary.size()); ++mask) {
        std::map<int, int> x;
        for (std::size_t i = 0; i < boundary.size(); ++i) x[boundary[i]] = (mask >> i) & 1;
        double W = 1;
        for (std::size_t i = 0; i < boundary.size(); ++i)
            if (x[boundary[i]]) W *= to_double(inst.edges.at(boundary[i]).lambda);
        // chain факторization: P(sigma(chain) = x) = prod_k P_k(x_k), where the
        // k-th instance pins earlier chain edges to x and half-pins later ones
        for (std::size_t k = 0; k < chain.size() && W > 0; ++k) {
            Instance<double> omega = base;
            for (std::size_t j = 0; j < chain.size(); ++j) {
                if (j < k) omega = pin_edge(omega, chain[j], (double)x[chain[j]]);
                else if (j > k) omega = pin_edge(omega, chain[j], 0.5);
            }
            double R = est.estimate(omega, chain[k], t).value;
            double pk;
            if (std::isinf(R)) pk = x[chain[k]] ? 1.0 : 0.0;
            else pk = x[chain[k]] ? R / (1 + R) : 1 / (1 + R);
            W *= pk;
        }
        if (W == 0) continue;
        int ku = 0, kv = 0;
        for (std::size_t i = 0; i < boundary.size(); ++i) {
            const auto& be = inst.edges.at(boundary[i]);
            if (be.u == u || be.v == u) ku += x[boundary[i]];
            if (be.u == v || be.v == v) kv += x[boundary[i]];
        }
        num0 += W * to_double(fu[ku]) * to_double(fv[kv]);
        num1 += W * to_double(fu[ku + 1]) * to_double(fv[kv + 1]);
    }
    double den = num0 + lambda_e * num1;
    if (!(den > 0) || !std::isfinite(den))
        throw error("marginal_of_regular_edge: numeric fault (degenerate denominator)");
    return num0 / den;
}

struct EstimateZResult {
    double Z = 0;
    double eps = 0;
    int m = 0;
    int t = 0;
    EstimatorStats stats;
    RecursionRegime regime;
};

// Sequential-pinning FPTAS: pins edges in id order toward the majority value,
// each marginal estimated to additive eps/(6m).
inline EstimateZResult estimate_Z(const Instance<double>& inst_in, double eps,
                                  const RecursionRegime& regime, EstimatorOptions opt = {}) {
    if (!(eps > 0 && eps < 1)) throw error("estimate_Z: need 0 < eps < 1");
    Instance<double> inst = inst_in;
    for (auto ds = inst.dangling; const auto& [id, v] : ds) inst = attach_free_end(inst, id);
    const Instance<double> full = inst;

    EstimateZResult out;
    out.eps = eps;
    out.regime = regime;
    out.m = (int)inst.edges.size();
    RatioEstimator est(regime, opt);
    if (out.m == 0) {
        Configuration none;
        out.Z = config_weight(inst, none);
        out.stats = est.stats();
        return out;
    }
    double eps_step = eps / (6.0 * out.m);
    out.t = regime_depth(regime, eps_step / 16.0);

    std::vector<int> order;
    for (const auto& [id, e] : inst.edges) order.push_back(id);

    Configuration chosen;
    double phat_product = 1;
    for (int id : order) {
        double p0 = marginal_of_regular_edge(est, inst, id, eps_step);
        if (p0 < -1e-9 || p0 > 1 + 1e-9)
            throw error("estimate_Z: marginal estimate outside [0,1]");
        p0 = std::min(1.0, std::max(0.0, p0));
        int xk = p0 >= 0.5 ? 0 : 1;
        chosen[id] = xk;
        phat_product *= xk == 0 ? p0 : 1 - p0;
        inst = pin_edge(inst, id, (double)xk);
    }
    if (!(phat_product > 0)) throw error("estimate_Z: vanishing pinned-path probability");
    double w = to_double(config_weight(full, chosen));
    out.Z = w / phat_product;
    out.stats = est.stats();
    return out;
}

// Convenience wrapper: classify, select the regime, run.
inline EstimateZResult estimate_Z_auto(const Instance<rational>& inst, double eps,
                                       EstimatorOptions opt = {}) {
    auto fam = classify_instance(inst);
    if (!fam.all_fibonacci) throw error("estimate_Z: instance has non-Fibonacci signatures");
    auto regime = select_regime(fam.params);
    if (!regime) throw error("estimate_Z: no certified regime covers this family (use --force)");
    return estimate_Z(inst.converted<double>(), eps, *regime, opt);
}

}  // namespace holant
