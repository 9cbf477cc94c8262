#pragma once

#include <array>

#include "holant/oracle.hpp"

namespace holant {

// Two-state spin system extended to arbitrary real vertex/edge weights.
// Vertex v contributes w[v][spin]; edge (u,v) contributes M[spin_u][spin_v].
template <class T>
struct ExtSpin {
    using Mat = std::array<std::array<T, 2>, 2>;
    struct SEdge {
        int u, v;
        Mat M;
    };
    std::map<int, std::array<T, 2>> w;
    std::map<int, SEdge> edges;
};

template <class T>
T ext_spin_Z(const ExtSpin<T>& s, const std::map<int, int>& pins = {}) {
    std::vector<int> ids;
    for (const auto& [v, _] : s.w) ids.push_back(v);
    if (ids.size() > 24) throw error("ext_spin_Z: too many vertices");
    T Z(0);
    for (std::uint64_t mask = 0; mask < (1ULL << ids.size()); ++mask) {
        std::map<int, int> sp;
        bool skip = false;
        for (std::size_t i = 0; i < ids.size(); ++i) sp[ids[i]] = (mask >> i) & 1;
        for (const auto& [v, x] : pins)
            if (sp.at(v) != x) { skip = true; break; }
        if (skip) continue;
        T wgt(1);
        for (const auto& [v, wv] : s.w) wgt *= wv[sp[v]];
        for (const auto& [id, e] : s.edges) wgt *= e.M[sp[e.u]][sp[e.v]];
        Z += wgt;
    }
    return Z;
}

// Projective ratio: the pair (num, den) stands for num/den; division happens
// only at the final read-out.
template <class T>
struct FormalRatio {
    T num{0}, den{0};
    bool degenerate() const { return scalar_traits<T>::is_zero(num) && scalar_traits<T>::is_zero(den); }
};

namespace detail {

template <class T>
void merge_parallel(ExtSpin<T>& s) {
    std::map<std::pair<int, int>, int> seen;  // (min,max) -> edge id kept
    for (auto it = s.edges.begin(); it != s.edges.end();) {
        auto& e = it->second;
        if (e.u == e.v) {  // self-loop: only diagonal entries can fire
            s.w.at(e.u) = {s.w.at(e.u)[0] * e.M[0][0], s.w.at(e.u)[1] * e.M[1][1]};
            it = s.edges.erase(it);
            continue;
        }
        auto key = std::minmax(e.u, e.v);
        typename ExtSpin<T>::Mat Mo = e.M;
        if (e.u > e.v) Mo = {{{e.M[0][0], e.M[1][0]}, {e.M[0][1], e.M[1][1]}}};
        auto [pos, fresh] = seen.emplace(key, it->first);
        if (fresh) {
            it->second = {key.first, key.second, Mo};
            ++it;
        } else {
            auto& kept = s.edges.at(pos->second).M;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) kept[a][b] = kept[a][b] * Mo[a][b];
            it = s.edges.erase(it);
        }
    }
}

// Exact structural simplification before the walk: fold vertices whose weight
// pair has exactly one zero (their spin is forced), contract edges whose
// off-diagonal entries are exactly zero (hard equality), merge parallels.
// Returns false when the component's partition function is identically zero.
template <class T>
bool simplify_for_saw(ExtSpin<T>& s, int& root) {
    merge_parallel(s);
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto it = s.w.begin(); it != s.w.end(); ++it) {
            int x = it->first;
            if (x == root) continue;
            const T& w0 = it->second[0];
            const T& w1 = it->second[1];
            bool z0 = scalar_traits<T>::is_zero(w0), z1 = scalar_traits<T>::is_zero(w1);
            if (z0 && z1) return false;
            if (z0 == z1) continue;
            int sp = z0 ? 1 : 0;
            T wt = it->second[sp];
            for (auto eit = s.edges.begin(); eit != s.edges.end();) {
                auto& e = eit->second;
                if (e.u == x || e.v == x) {
                    int other = e.u == x ? e.v : e.u;
                    T f0 = e.u == x ? e.M[sp][0] : e.M[0][sp];
                    T f1 = e.u == x ? e.M[sp][1] : e.M[1][sp];
                    s.w.at(other) = {s.w.at(other)[0] * f0 * wt, s.w.at(other)[1] * f1 * wt};
                    wt = T(1);
                    eit = s.edges.erase(eit);
                } else {
                    ++eit;
                }
            }
            if (!(wt == T(1))) s.w.at(root) = {s.w.at(root)[0] * wt, s.w.at(root)[1] * wt};
            s.w.erase(it);
            changed = true;
            break;
        }
        if (changed) continue;
        for (auto eit = s.edges.begin(); eit != s.edges.end(); ++eit) {
            const auto& e = eit->second;
            if (!scalar_traits<T>::is_zero(e.M[0][1]) || !scalar_traits<T>::is_zero(e.M[1][0])) continue;
            int keep = (e.u == root || e.v == root) ? root : std::min(e.u, e.v);
            int gone = e.u == keep ? e.v : e.u;
            s.w.at(keep) = {s.w.at(keep)[0] * s.w.at(gone)[0] * e.M[0][0],
                            s.w.at(keep)[1] * s.w.at(gone)[1] * e.M[1][1]};
            s.w.erase(gone);
            s.edges.erase(eit);
            for (auto& [id2, e2] : s.edges) {
                if (e2.u == gone) e2.u = keep;
                if (e2.v == gone) e2.v = keep;
            }
            merge_parallel(s);
            changed = true;
            break;
        }
    }
    return true;
}

template <class T>
struct SawWalker {
    struct Arc {
        int eid, to;
        typename ExtSpin<T>::Mat M;  // oriented: M[spin_here][spin_to]
    };
    std::map<int, std::vector<Arc>> adj;
    int depth_cap;

    explicit SawWalker(const ExtSpin<T>& s, int cap) : depth_cap(cap) {
        for (const auto& [id, e] : s.edges) {
            adj[e.u].push_back({id, e.v, e.M});
            adj[e.v].push_back({id, e.u, {{{e.M[0][0], e.M[1][0]}, {e.M[0][1], e.M[1][1]}}}});
        }
        for (auto& [v, arcs] : adj)
            std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) { return a.eid < b.eid; });
        wref = nullptr;
    }
    const std::map<int, std::array<T, 2>>* wref;

    // Returns (Z0, Z1) of the self-avoiding-walk subtree rooted at a copy of u.
    // on_path: vertices of the current walk; left_via: edge used to leave them.
    std::array<T, 2> walk(int u, int came_eid, std::map<int, int>& left_via, int depth) const {
        if (depth > depth_cap) throw error("saw_ratio: depth cap exceeded");
        std::array<T, 2> f = wref->at(u);
        auto it = adj.find(u);
        if (it == adj.end()) return f;
        for (const Arc& a : it->second) {
            if (a.eid == came_eid) continue;
            auto lv = left_via.find(a.to);
            if (lv != left_via.end()) {
                // cycle closes: leaf copy pinned; larger closing edge id pins 1
                int sp = a.eid > lv->second ? 1 : 0;
                f[0] = f[0] * a.M[0][sp];
                f[1] = f[1] * a.M[1][sp];
            } else {
                left_via[u] = a.eid;
                auto c = walk(a.to, a.eid, left_via, depth + 1);
                left_via.erase(u);
                f[0] = f[0] * (a.M[0][0] * c[0] + a.M[0][1] * c[1]);
                f[1] = f[1] * (a.M[1][0] * c[0] + a.M[1][1] * c[1]);
            }
        }
        if constexpr (std::is_same_v<T, double>) {
            double m = std::max(std::abs(f[0]), std::abs(f[1]));
            if (m > 1e100 || (m > 0 && m < 1e-100)) {
                f[0] /= m;
                f[1] /= m;
            }
        }
        return f;
    }
};

}  // namespace detail

// Formal marginal ratio Z(spin_v = 1) / Z(spin_v = 0) at v, computed on the
// self-avoiding-walk tree with boundary spins fixed at repeat visits.
template <class T>
FormalRatio<T> saw_ratio(const ExtSpin<T>& spin, int v, int depth_cap) {
    ExtSpin<T> s = spin;
    // restrict to v's component (other components cancel in the ratio)
    {
        std::set<int> comp{v};
        bool grew = true;
        while (grew) {
            grew = false;
            for (const auto& [id, e] : s.edges) {
                if (comp.count(e.u) != comp.count(e.v)) {
                    comp.insert(e.u);
                    comp.insert(e.v);
                    grew = true;
                }
            }
        }
        for (auto it = s.w.begin(); it != s.w.end();)
            it = comp.count(it->first) ? std::next(it) : s.w.erase(it);
        for (auto it = s.edges.begin(); it != s.edges.end();)
            it = comp.count(it->second.u) ? std::next(it) : s.edges.erase(it);
    }
    int root = v;
    if (!detail::simplify_for_saw(s, root)) return FormalRatio<T>{T(0), T(0)};  // Z == 0
    detail::SawWalker<T> walker(s, depth_cap);
    walker.wref = &s.w;
    std::map<int, int> left_via;
    auto z = walker.walk(root, -1, left_via, 0);
    return FormalRatio<T>{z[1], z[0]};
}

// --- holographic reduction of a Fibonacci instance to an extended spin system

// Decomposes each signature as f_k = A rho^k + B (-rho)^{-k}; under the basis
// [1 t; rho -t/rho] the vertex becomes a weighted equality with weights
// (A, B/t^arity) and each lambda-edge the 2x2 matrix below.
struct SpinReduction {
    ExtSpin<double> spin;
    double rho = 1, t = 1;
};

inline ExtSpin<double>::Mat bridge_edge_matrix(double rho, double t, double lambda) {
    return {{{1 + lambda * rho * rho, t * (1 - lambda)},
             {t * (1 - lambda), t * t * (1 + lambda / (rho * rho))}}};
}

template <class T>
SpinReduction holant_to_extended_spin(const Instance<T>& inst, double rho, double t) {
    if (rho <= 0) throw error("holant_to_extended_spin: rho must be positive");
    if (t == 0 || std::abs(t) > 1) throw error("holant_to_extended_spin: need 0 < |t| <= 1");
    double c = rho - 1.0 / rho;
    SpinReduction out;
    out.rho = rho;
    out.t = t;
    for (const auto& [vid, sig] : inst.vertices) {
        if (sig.arity() >= 2) {
            auto m = classify_signature(sig);
            if (!m.is_fibonacci || std::abs(m.c - c) > 1e-7 * std::max(1.0, std::abs(c)))
                throw error("holant_to_extended_spin: vertex " + std::to_string(vid) +
                            " is not Fibonacci with the common parameter");
        }
        if (sig.arity() < 1) {
            out.spin.w[vid] = {to_double(sig[0]), 0.0};  // scalar factor
            continue;
        }
        double f0 = to_double(sig[0]), f1 = to_double(sig[1]);
        double A = (f0 + rho * f1) / (rho * rho + 1);
        double B = f0 - A;
        out.spin.w[vid] = {A, B / std::pow(t, sig.arity())};
    }
    for (const auto& [id, e] : inst.edges)
        out.spin.edges.emplace(id, typename ExtSpin<double>::SEdge{
                                       e.u, e.v, bridge_edge_matrix(rho, t, to_double(e.lambda))});
    if (!inst.dangling.empty())
        throw error("holant_to_extended_spin: pin or free dangling edges first");
    return out;
}

struct ShallowOptions {
    double t = 1.0;
    int brute_cap = 16;
    int depth_cap = 64;
};

// Exact ratio R(Omega^e) for instances whose longest simple path through e is
// bounded: holographic reduction to the spin world plus the SAW recursion.
// Falls back to (double) brute force for mixed-parameter or degenerate cases.
template <class T>
double shallow_exact_ratio(const Instance<T>& inst_in, int dangling_id, ShallowOptions opt = {}) {
    auto at = inst_in.dangling.find(dangling_id);
    if (at == inst_in.dangling.end()) throw error("shallow_exact_ratio: id is not dangling");
    int v = at->second;
    Instance<T> comp = restrict_to_component(inst_in, component_of(inst_in, v));

    // free other dangling edges so exactly one remains
    for (auto ids = comp.dangling; const auto& [id, w] : ids)
        if (id != dangling_id) comp = attach_free_end(comp, id);

    auto brute = [&]() -> double {
        Instance<double> d = comp.template converted<double>();
        double z0 = brute_force_Z(d, {{dangling_id, 0}}, opt.brute_cap);
        double z1 = brute_force_Z(d, {{dangling_id, 1}}, opt.brute_cap);
        if (z0 == 0.0) return z1 == 0.0 ? std::nan("") : kInf;
        return z1 / z0;
    };

    // common Fibonacci parameter across the component
    bool have_c = false;
    double c = 0;
    bool mixed = false;
    for (const auto& [vid, sig] : comp.vertices) {
        if (sig.arity() < 2) continue;
        auto m = classify_signature(sig);
        if (!m.is_fibonacci) { mixed = true; break; }
        if (!have_c) { c = m.c; have_c = true; }
        else if (std::abs(m.c - c) > 1e-9 * std::max(1.0, std::abs(c))) { mixed = true; break; }
    }
    if (mixed) {
        if ((int)comp.edges.size() + 1 <= opt.brute_cap) return brute();
        throw error("shallow_exact_ratio: mixed Fibonacci parameters on a large component");
    }
    if (!have_c) c = 0.0;
    double rho = fib_rho(c);

    // The dangling slot of v pairs with T^T e_x at read-out; transform the rest
    // of the instance as if that slot were absent, then rebuild v's weights
    // from the full signature (its tensor keeps the dangling slot's arity).
    Instance<double> d = comp.template converted<double>();
    Instance<double> base = d;
    base.dangling.erase(dangling_id);
    const Signature<double>& fsig = d.vertices.at(v);
    base.vertices.at(v) = fsig.truncated(fsig.arity() - 1);  // arity bookkeeping only
    SpinReduction red;
    try {
        red = holant_to_extended_spin(base, rho, opt.t);
    } catch (const error&) {
        if ((int)comp.edges.size() + 1 <= opt.brute_cap) return brute();
        throw;
    }
    // overwrite v's weights using the full (unpinned) signature; its tensor has
    // arity = degree(v) in comp, one slot of which is the dangling edge
    {
        double f0 = to_double(fsig[0]), f1 = to_double(fsig[1]);
        double A = (f0 + rho * f1) / (rho * rho + 1);
        double B = f0 - A;
        red.spin.w[v] = {A, B / std::pow(opt.t, fsig.arity())};
    }
    auto fr = saw_ratio(red.spin, v, opt.depth_cap);
    double t = opt.t;
    double num = rho * fr.den - (t / rho) * fr.num;
    double den = fr.den + t * fr.num;
    if ((num == 0.0 && den == 0.0) || !std::isfinite(num) || !std::isfinite(den)) {
        if ((int)comp.edges.size() + 1 <= opt.brute_cap) return brute();
        throw error("shallow_exact_ratio: degenerate formal ratio on a large component");
    }
    if (den == 0.0) return kInf;
    double R = num / den;
    if (R < 0) {
        if ((int)comp.edges.size() + 1 <= opt.brute_cap) return brute();
        if (R > -1e-9) return 0.0;
        throw error("shallow_exact_ratio: negative ratio from cancellation");
    }
    return R;
}

}  // namespace holant
