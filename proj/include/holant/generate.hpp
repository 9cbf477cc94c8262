#pragma once

#include "holant/instance.hpp"

namespace holant {

// SplitMix64. Hand-rolled so generated files are byte-identical across
// platforms and standard library versions.
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed = 0) : state(seed) {}

    std::uint64_t next() {
        state += 0x9E3779B97f4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    double u01() { return (next() >> 11) * 0x1.0p-53; }
    // inclusive bounds
    long uniform_int(long lo, long hi) {
        if (hi < lo) throw error("uniform_int: empty range");
        return lo + (long)(next() % (std::uint64_t)(hi - lo + 1));
    }
    template <class T>
    const T& pick(const std::vector<T>& xs) {
        return xs[(std::size_t)uniform_int(0, (long)xs.size() - 1)];
    }
    // rational on the grid {lo + k/den} within [lo, hi]
    rational grid(const rational& lo, const rational& hi, long den = 100) {
        rational span = hi - lo;
        long steps = (long)(to_double(span) * (double)den + 0.5);
        if (steps <= 0) return lo;
        return lo + rational(uniform_int(0, steps), den);
    }
};

enum class GraphModel { Tree, Gnp, Regular, Path, Cycle };

inline std::vector<std::pair<int, int>> random_graph(GraphModel model, int n, double param, Rng& rng) {
    std::vector<std::pair<int, int>> edges;
    switch (model) {
        case GraphModel::Tree:
            for (int v = 1; v < n; ++v) edges.emplace_back((int)rng.uniform_int(0, v - 1), v);
            break;
        case GraphModel::Path:
            for (int v = 1; v < n; ++v) edges.emplace_back(v - 1, v);
            break;
        case GraphModel::Cycle:
            for (int v = 1; v < n; ++v) edges.emplace_back(v - 1, v);
            if (n > 2) edges.emplace_back(n - 1, 0);
            break;
        case GraphModel::Gnp:
            for (int u = 0; u < n; ++u)
                for (int v = u + 1; v < n; ++v)
                    if (rng.u01() < param) edges.emplace_back(u, v);
            break;
        case GraphModel::Regular: {
            int d = (int)param;
            if (d < 1 || (n * d) % 2 != 0) throw error("regular model: n*d must be even, d >= 1");
            for (int attempt = 0; attempt < 1000; ++attempt) {
                std::vector<int> stubs;
                for (int v = 0; v < n; ++v)
                    for (int k = 0; k < d; ++k) stubs.push_back(v);
                for (int i = (int)stubs.size() - 1; i > 0; --i)
                    std::swap(stubs[i], stubs[rng.uniform_int(0, i)]);
                edges.clear();
                bool ok = true;
                for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
                    if (stubs[i] == stubs[i + 1]) { ok = false; break; }  // reject self-loops
                    edges.emplace_back(std::min(stubs[i], stubs[i + 1]), std::max(stubs[i], stubs[i + 1]));
                }
                if (ok) return edges;
            }
            throw error("regular model: failed to avoid self-loops");
        }
    }
    return edges;
}

struct GenSpec {
    GraphModel model = GraphModel::Tree;
    int n = 6;
    double param = 0.4;        // gnp probability or regular degree
    rational c{1};
    rational f0{1};
    rational f1{1};
    rational lambda{1};
    std::uint64_t seed = 0;
    bool add_dangling = false;  // one dangling half-edge at vertex 0
};

// Deterministic instance: all vertices share the (c, f0, f1) recurrence, all
// edges the given weight. Same spec => identical instance.
inline Instance<rational> generate_instance(const GenSpec& gs) {
    Rng rng(gs.seed);
    auto edges = random_graph(gs.model, gs.n, gs.param, rng);
    Instance<rational> inst;
    std::vector<int> deg(gs.n, 0);
    for (auto [u, v] : edges) {
        deg[u]++;
        deg[v]++;
    }
    if (gs.add_dangling && gs.n > 0) deg[0]++;
    for (int v = 0; v < gs.n; ++v) {
        if (deg[v] == 0)
            inst.vertices.emplace(v, Signature<rational>(std::vector<rational>{gs.f0 == 0 ? rational(1) : gs.f0}));
        else
            inst.vertices.emplace(v, build_fibonacci_signature(gs.c, gs.f0, gs.f1, deg[v]));
    }
    int id = 0;
    for (auto [u, v] : edges) inst.edges.emplace(id++, Edge<rational>{u, v, gs.lambda});
    if (gs.add_dangling && gs.n > 0) inst.dangling.emplace(id++, 0);
    inst.validate();
    return inst;
}

// Randomized family instance for tests: per-vertex seeds drawn from the given
// grids, per-edge weights from [lambda_lo, lambda_hi] on a decimal grid.
struct FamilySampler {
    rational c{1};
    std::vector<rational> f0_choices{rational(1)};
    std::vector<rational> f1_choices{rational(1)};
    rational lambda_lo{1}, lambda_hi{1};
    bool add_dangling = false;
};

inline Instance<rational> sample_family_instance(const FamilySampler& fs, GraphModel model, int n,
                                                 double param, Rng& rng) {
    auto edges = random_graph(model, n, param, rng);
    Instance<rational> inst;
    std::vector<int> deg(n, 0);
    for (auto [u, v] : edges) {
        deg[u]++;
        deg[v]++;
    }
    if (fs.add_dangling && n > 0) deg[0]++;
    for (int v = 0; v < n; ++v) {
        if (deg[v] == 0) {
            inst.vertices.emplace(v, Signature<rational>(std::vector<rational>{rational(1)}));
            continue;
        }
        rational f0 = rng.pick(fs.f0_choices);
        rational f1 = rng.pick(fs.f1_choices);
        inst.vertices.emplace(v, build_fibonacci_signature(fs.c, f0, f1, deg[v]));
    }
    int id = 0;
    for (auto [u, v] : edges) inst.edges.emplace(id++, Edge<rational>{u, v, rng.grid(fs.lambda_lo, fs.lambda_hi)});
    if (fs.add_dangling && n > 0) inst.dangling.emplace(id++, 0);
    inst.validate();
    return inst;
}

}  // namespace holant
