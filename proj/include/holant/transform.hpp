#pragma once

#include <array>

#include "holant/instance.hpp"

namespace holant {

// 2x2 real basis for holographic transformations.
struct BasisTransform {
    // row-major: [[a, b], [c, d]]
    double a = 1, b = 0, c = 0, d = 1;

    double det() const { return a * d - b * c; }

    BasisTransform inverse() const {
        double dt = det();
        if (std::abs(dt) <= 1e-12) throw error("basis transform is singular");
        return BasisTransform{d / dt, -b / dt, -c / dt, a / dt};
    }

    BasisTransform transposed() const { return BasisTransform{a, c, b, d}; }
};

enum class TransformMode { Contravariant, Covariant };

// Applies T^{(x)d} to the full 2^d tensor of a symmetric signature and reads
// the result back as a symmetric signature. Contravariant: G' = T^{(x)d} G.
// Covariant: R' = R (T^{-1})^{(x)d}, i.e. apply transpose(inverse(T)) per axis.
inline Signature<double> transform_signature(const BasisTransform& T, const Signature<double>& sig,
                                             TransformMode mode, double sym_tol = 1e-10) {
    int d = sig.arity();
    if (d > 12) throw error("transform_signature: arity > 12");
    if (std::abs(T.det()) <= 1e-12) throw error("basis transform is singular");
    BasisTransform M = mode == TransformMode::Contravariant ? T : T.inverse().transposed();

    std::size_t n = std::size_t(1) << d;
    std::vector<double> t(n);
    for (std::size_t idx = 0; idx < n; ++idx) t[idx] = to_double(sig[__builtin_popcountll(idx)]);

    // Apply M along each axis in turn.
    for (int axis = 0; axis < d; ++axis) {
        std::size_t bit = std::size_t(1) << axis;
        for (std::size_t idx = 0; idx < n; ++idx) {
            if (idx & bit) continue;
            double x0 = t[idx], x1 = t[idx | bit];
            t[idx] = M.a * x0 + M.b * x1;
            t[idx | bit] = M.c * x0 + M.d * x1;
        }
    }

    // Compress by Hamming weight, checking symmetry.
    std::vector<double> vals(d + 1, 0.0);
    std::vector<int> counts(d + 1, 0);
    for (std::size_t idx = 0; idx < n; ++idx) {
        int k = __builtin_popcountll(idx);
        vals[k] += t[idx];
        counts[k] += 1;
    }
    for (int k = 0; k <= d; ++k) vals[k] /= counts[k];
    double scale = 0;
    for (double x : vals) scale = std::max(scale, std::abs(x));
    for (std::size_t idx = 0; idx < n; ++idx) {
        int k = __builtin_popcountll(idx);
        if (std::abs(t[idx] - vals[k]) > sym_tol * std::max(1.0, scale))
            throw error("transform_signature: result is not symmetric");
    }
    return Signature<double>(std::move(vals));
}

// Subdivide every weighted edge with a [1, 0, lambda] vertex; the resulting
// bipartite instance is unweighted and has the same partition function.
template <class T>
Instance<T> to_bipartite(const Instance<T>& inst) {
    Instance<T> out = inst;
    std::vector<int> ids;
    for (const auto& [id, e] : inst.edges) ids.push_back(id);
    for (int id : ids) {
        Edge<T> e = out.edges.at(id);
        int mid = out.fresh_vertex_id();
        out.vertices.emplace(mid, Signature<T>(std::vector<T>{T(1), T(0), e.lambda}));
        int id2 = out.fresh_id();
        out.edges.at(id) = Edge<T>{e.u, mid, T(1)};
        out.edges.emplace(id2, Edge<T>{mid, e.v, T(1)});
    }
    return out;
}

// The two-side transform of the Holant theorem on a bipartite instance:
// contravariant T on `left` vertices, covariant T on the rest. Z is preserved.
inline Instance<double> holant_transform_bipartite(const Instance<double>& inst, const BasisTransform& T,
                                                   const std::set<int>& left) {
    for (const auto& [id, e] : inst.edges) {
        if (to_double(e.lambda) != 1.0) throw error("holant transform needs an unweighted bipartite instance");
        if (left.count(e.u) == left.count(e.v)) throw error("edge does not cross the bipartition");
    }
    Instance<double> out = inst;
    for (auto& [vid, sig] : out.vertices) {
        sig = transform_signature(T, sig,
                                  left.count(vid) ? TransformMode::Contravariant : TransformMode::Covariant);
    }
    return out;
}

}  // namespace holant
