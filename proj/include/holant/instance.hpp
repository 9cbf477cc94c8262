#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "holant/signature.hpp"

namespace holant {

template <class T>
struct Edge {
    int u = -1, v = -1;
    T lambda{1};
};

// A weighted Holant instance: multigraph, per-vertex symmetric signatures,
// per-edge weights, and dangling half-edges. Edge and dangling ids share one
// id space and stay stable under the structural operations. Instances are
// immutable values; every operation returns a new instance.
template <class T>
struct Instance {
    std::map<int, Signature<T>> vertices;
    std::map<int, Edge<T>> edges;
    std::map<int, int> dangling;  // id -> attached vertex

    int degree(int v) const {
        int d = 0;
        for (const auto& [id, e] : edges) d += (e.u == v) + (e.v == v);
        for (const auto& [id, w] : dangling) d += (w == v);
        return d;
    }

    std::vector<int> incident_ids(int v) const {
        std::vector<int> out;
        for (const auto& [id, e] : edges)
            if (e.u == v || e.v == v) out.push_back(id);
        for (const auto& [id, w] : dangling)
            if (w == v) out.push_back(id);
        std::sort(out.begin(), out.end());
        return out;
    }

    bool is_dangling(int id) const { return dangling.count(id) > 0; }

    int fresh_id() const {
        int m = -1;
        if (!edges.empty()) m = std::max(m, edges.rbegin()->first);
        if (!dangling.empty()) m = std::max(m, dangling.rbegin()->first);
        return m + 1;
    }

    int fresh_vertex_id() const { return vertices.empty() ? 0 : vertices.rbegin()->first + 1; }

    void validate() const {
        for (const auto& [id, e] : edges) {
            if (!vertices.count(e.u) || !vertices.count(e.v))
                throw error("edge " + std::to_string(id) + " references missing vertex");
            if (e.u == e.v) throw error("self-loop at vertex " + std::to_string(e.u));
            if (e.lambda < 0) throw error("negative edge weight on edge " + std::to_string(id));
            if (dangling.count(id)) throw error("edge id " + std::to_string(id) + " reused as dangling id");
        }
        for (const auto& [id, v] : dangling)
            if (!vertices.count(v)) throw error("dangling " + std::to_string(id) + " references missing vertex");
        for (const auto& [vid, sig] : vertices) {
            if (!sig.nonnegative()) throw error("negative signature value at vertex " + std::to_string(vid));
            if (sig.arity() != degree(vid))
                throw error("vertex " + std::to_string(vid) + ": arity " + std::to_string(sig.arity()) +
                            " != degree " + std::to_string(degree(vid)));
        }
    }

    template <class U>
    Instance<U> converted() const {
        Instance<U> out;
        for (const auto& [vid, sig] : vertices) {
            std::vector<U> vals;
            vals.reserve(sig.values.size());
            for (const auto& x : sig.values) vals.push_back(static_cast<U>(to_double(x)));
            std::optional<U> c;
            if (sig.fib_c) c = static_cast<U>(to_double(*sig.fib_c));
            out.vertices.emplace(vid, Signature<U>(std::move(vals), c));
        }
        for (const auto& [id, e] : edges)
            out.edges.emplace(id, Edge<U>{e.u, e.v, static_cast<U>(to_double(e.lambda))});
        out.dangling = dangling;
        return out;
    }
};

// A total 0/1 assignment over all regular and dangling edge ids.
using Configuration = std::map<int, int>;

template <class T>
T config_weight(const Instance<T>& inst, const Configuration& sigma) {
    std::map<int, int> weight_at;  // vertex -> hamming weight of incident assignment
    T w(1);
    for (const auto& [id, e] : inst.edges) {
        int x = sigma.at(id);
        if (x) w *= e.lambda;
        weight_at[e.u] += x;
        weight_at[e.v] += x;
    }
    for (const auto& [id, v] : inst.dangling) weight_at[v] += sigma.at(id);
    for (const auto& [vid, sig] : inst.vertices) {
        int k = weight_at.count(vid) ? weight_at[vid] : 0;
        w *= sig[k];
    }
    return w;
}

// Pin an edge to tau and contract the endpoint signatures. Regular edges only
// support tau in {0,1} (the two-endpoint blend is not the partial sum for
// fractional tau); dangling edges accept any tau in [0,1]. Pinning to 1 drops
// the edge weight: Z(inst) = Z(pin 0) + lambda_e * Z(pin 1).
template <class T>
Instance<T> pin_edge(const Instance<T>& inst, int id, const T& tau) {
    Instance<T> out = inst;
    if (tau < 0 || tau > 1) throw error("pin weight outside [0,1]");
    auto de = out.dangling.find(id);
    if (de != out.dangling.end()) {
        int v = de->second;
        out.dangling.erase(de);
        out.vertices.at(v) = out.vertices.at(v).pinned(tau);
        return out;
    }
    auto ee = out.edges.find(id);
    if (ee == out.edges.end()) throw error("pin_edge: unknown edge id " + std::to_string(id));
    if (!(tau == 0 || tau == 1)) throw error("fractional pinning is only defined on dangling edges");
    int u = ee->second.u, v = ee->second.v;
    out.edges.erase(ee);
    out.vertices.at(u) = out.vertices.at(u).pinned(tau);
    out.vertices.at(v) = out.vertices.at(v).pinned(tau);
    return out;
}

// Turn a dangling half-edge into a regular edge to a fresh [1,1] vertex.
template <class T>
Instance<T> attach_free_end(const Instance<T>& inst, int id, const T& lambda = T(1)) {
    auto de = inst.dangling.find(id);
    if (de == inst.dangling.end()) throw error("attach_free_end: id is not dangling");
    Instance<T> out = inst;
    int v = de->second;
    out.dangling.erase(id);
    int nv = out.fresh_vertex_id();
    out.vertices.emplace(nv, Signature<T>(std::vector<T>{T(1), T(1)}));
    out.edges.emplace(id, Edge<T>{v, nv, lambda});
    return out;
}

// Split Fibonacci vertex v into v' (keeps E1, signature [f_0..f_{|E1|+1}])
// and a fresh v'' (keeps E2, gadget [1,0,1,c,...] of arity |E2|+1), joined by
// a fresh weight-1 edge. Z and all surviving-edge marginals are preserved.
// Returns the new instance plus the ids of (v', v'', new edge).
template <class T>
struct Decomposition {
    Instance<T> inst;
    int v_keep;      // carries E1 (the original vertex id)
    int v_gadget;    // carries E2
    int bridge_edge;
};

template <class T>
Decomposition<T> decompose_vertex(const Instance<T>& inst, int v, const std::set<int>& E1,
                                  const std::set<int>& E2) {
    const Signature<T>& sig = inst.vertices.at(v);
    auto inc = inst.incident_ids(v);
    if (E1.empty() || E2.empty()) throw error("decompose_vertex: both edge sets must be nonempty");
    {
        std::set<int> uni = E1;
        uni.insert(E2.begin(), E2.end());
        if ((int)uni.size() != (int)E1.size() + (int)E2.size() || uni != std::set<int>(inc.begin(), inc.end()))
            throw error("decompose_vertex: E1, E2 must partition the incident edges");
    }
    std::optional<T> c = sig.fib_c;
    if (!c) {
        auto m = classify_signature(sig);
        if (!m.is_fibonacci) throw error("decompose_vertex: signature is not Fibonacci");
        if (sig.arity() >= 2) c = T(m.c);
        else c = T(0);
    } else if (!satisfies_fibonacci(sig, *c)) {
        throw error("decompose_vertex: signature violates its recorded Fibonacci parameter");
    }

    Decomposition<T> out{inst, v, inst.fresh_vertex_id(), inst.fresh_id()};
    Instance<T>& r = out.inst;
    r.vertices.at(v) = sig.truncated((int)E1.size() + 1);
    r.vertices.emplace(out.v_gadget, gadget_signature(*c, (int)E2.size() + 1));
    for (int id : E2) {
        auto de = r.dangling.find(id);
        if (de != r.dangling.end()) {
            de->second = out.v_gadget;
        } else {
            auto& e = r.edges.at(id);
            if (e.u == v) e.u = out.v_gadget;
            else e.v = out.v_gadget;
        }
    }
    r.edges.emplace(out.bridge_edge, Edge<T>{v, out.v_gadget, T(1)});
    return out;
}

// Remove a vertex: its dangling edges disappear, its regular edges become
// dangling half-edges of their other endpoints (edge weights dropped).
template <class T>
Instance<T> remove_vertex_to_dangling(const Instance<T>& inst, int v) {
    Instance<T> out = inst;
    for (auto it = out.dangling.begin(); it != out.dangling.end();)
        it = (it->second == v) ? out.dangling.erase(it) : std::next(it);
    for (auto it = out.edges.begin(); it != out.edges.end();) {
        if (it->second.u == v || it->second.v == v) {
            int other = it->second.u == v ? it->second.v : it->second.u;
            int id = it->first;
            it = out.edges.erase(it);
            out.dangling.emplace(id, other);
        } else {
            ++it;
        }
    }
    out.vertices.erase(v);
    return out;
}

// Rescale an L_{a,b} instance (f_{i+2} = a f_{i+1} + b f_i, shared b) to a
// Fibonacci one: g_i = f_i / b^{i/2} at every vertex, and each edge weight
// gains a sqrt(b) factor from each endpoint's rescale, so lambda -> lambda*b.
template <class T>
Instance<T> lab_rescale(const Instance<T>& inst, const T& b) {
    if (!(b > 0)) throw error("lab_rescale: b must be positive");
    if (!inst.dangling.empty())
        throw error("lab_rescale: dangling instances are not supported (the half-edge slot has no weight to absorb sqrt(b))");
    T sb = scalar_traits<T>::sqrt_or_throw(b);
    Instance<T> out = inst;
    for (auto& [vid, sig] : out.vertices) {
        // check: exists a with f_{i+2} = a f_{i+1} + b f_i for this shared b
        const auto& f = sig.values;
        bool have_a = false;
        double a = 0;
        for (int i = 0; i + 2 <= sig.arity(); ++i) {
            double fi1 = to_double(f[i + 1]);
            double resid = to_double(f[i + 2]) - to_double(b) * to_double(f[i]);
            if (fi1 == 0.0) {
                if (std::abs(resid) > 1e-9 * std::max(1.0, std::abs(to_double(f[i + 2])))) {
                    throw error("lab_rescale: vertex " + std::to_string(vid) + " not in L_{a,b} for given b");
                }
                continue;
            }
            double ai = resid / fi1;
            if (!have_a) { a = ai; have_a = true; }
            else if (std::abs(ai - a) > 1e-9 * std::max(1.0, std::abs(a)))
                throw error("lab_rescale: vertex " + std::to_string(vid) + " has inconsistent a");
        }
        std::vector<T> g(f.size());
        T scale(1);
        for (std::size_t i = 0; i < f.size(); ++i) {
            g[i] = f[i] / scale;
            scale *= sb;
        }
        std::optional<T> c;
        if (have_a) c = T(a) / sb;
        sig = Signature<T>(std::move(g), c);
    }
    for (auto& [id, e] : out.edges) e.lambda = e.lambda * b;
    return out;
}

// --- simple paths -----------------------------------------------------------

namespace detail {
template <class T>
int longest_path_from(const Instance<T>& inst, int v, std::set<int>& visited, int cap) {
    if (cap <= 0) return 0;
    visited.insert(v);
    int best = 0;
    for (const auto& [id, e] : inst.edges) {
        int w = -1;
        if (e.u == v) w = e.v;
        else if (e.v == v) w = e.u;
        else continue;
        if (visited.count(w)) continue;
        best = std::max(best, 1 + longest_path_from(inst, w, visited, cap - 1));
        if (best >= cap) break;
    }
    visited.erase(v);
    return best;
}
}  // namespace detail

struct SimplePathProbe {
    bool exceeds = false;
    int capped_length = 0;  // min(SP, threshold+1)
};

// SP(inst, e) counts the edges of the longest simple path containing the
// dangling edge e, including e itself. The probe runs a DFS truncated at
// threshold+1 edges and reports whether SP > threshold.
template <class T>
SimplePathProbe simple_path_reaches(const Instance<T>& inst, int dangling_id, int threshold) {
    if (threshold < 0) throw error("simple_path_reaches: threshold must be >= 0");
    auto it = inst.dangling.find(dangling_id);
    if (it == inst.dangling.end()) throw error("simple_path_reaches: id is not dangling");
    std::set<int> visited;
    int tail = detail::longest_path_from(inst, it->second, visited, threshold);  // capped at threshold
    int sp_capped = std::min(1 + tail, threshold + 1);
    return SimplePathProbe{sp_capped > threshold, sp_capped};
}

// Exact SP by exhaustive DFS (test oracle / shallow-branch dispatch on small instances).
template <class T>
int simple_path_length(const Instance<T>& inst, int dangling_id) {
    auto it = inst.dangling.find(dangling_id);
    if (it == inst.dangling.end()) throw error("simple_path_length: id is not dangling");
    std::set<int> visited;
    return 1 + detail::longest_path_from(inst, it->second, visited,
                                         (int)inst.edges.size() + 1);
}

// Vertices in the connected component of `v` (regular edges only; dangling
// half-edges do not connect components).
template <class T>
std::set<int> component_of(const Instance<T>& inst, int v) {
    std::set<int> comp{v};
    std::vector<int> stack{v};
    while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        for (const auto& [id, e] : inst.edges) {
            int w = -1;
            if (e.u == x) w = e.v;
            else if (e.v == x) w = e.u;
            else continue;
            if (comp.insert(w).second) stack.push_back(w);
        }
    }
    return comp;
}

// Restriction of the instance to one vertex component (keeps incident dangling edges).
template <class T>
Instance<T> restrict_to_component(const Instance<T>& inst, const std::set<int>& comp) {
    Instance<T> out;
    for (int v : comp) out.vertices.emplace(v, inst.vertices.at(v));
    for (const auto& [id, e] : inst.edges)
        if (comp.count(e.u)) out.edges.emplace(id, e);
    for (const auto& [id, v] : inst.dangling)
        if (comp.count(v)) out.dangling.emplace(id, v);
    return out;
}

// Canonical serialization for memoization keys. Ids are stable under the
// recursion's operations, so no relabeling is needed.
template <class T>
std::string canonical_key(const Instance<T>& inst) {
    std::ostringstream os;
    for (const auto& [vid, sig] : inst.vertices) {
        os << 'v' << vid << ':';
        for (const auto& x : sig.values) os << scalar_traits<T>::to_string(x) << ',';
    }
    for (const auto& [id, e] : inst.edges)
        os << 'e' << id << ':' << e.u << ',' << e.v << ',' << scalar_traits<T>::to_string(e.lambda) << ';';
    for (const auto& [id, v] : inst.dangling) os << 'd' << id << ':' << v << ';';
    return os.str();
}

}  // namespace holant
