#pragma once

#include <cstdlib>

#include "holant/instance.hpp"

namespace holant {

inline int default_oracle_cap() {
    if (const char* s = std::getenv("HOLANT_ORACLE_CAP")) {
        int v = std::atoi(s);
        if (v > 0) return v;
    }
    return 24;
}

// Exact partition function by enumeration of all 2^(|E|+|D|) configurations.
// Dangling edges are summed over both values with no weight factor.
template <class T>
T brute_force_Z(const Instance<T>& inst, const Configuration& pins = {}, int cap = -1) {
    if (cap < 0) cap = default_oracle_cap();
    int m = (int)inst.edges.size() + (int)inst.dangling.size();
    if (m > cap)
        throw error("brute force refused: " + std::to_string(m) + " edges exceeds cap " +
                    std::to_string(cap) + " (HOLANT_ORACLE_CAP / --oracle-cap)");

    // Flatten to indexed arrays for the enumeration loop.
    std::vector<int> vid_index;  // vertex id -> dense index
    std::map<int, int> vmap;
    for (const auto& [vid, sig] : inst.vertices) {
        vmap[vid] = (int)vid_index.size();
        vid_index.push_back(vid);
    }
    struct Slot {
        int a = -1, b = -1;  // dense vertex indices (b = -1 for dangling)
        const T* lambda = nullptr;
        int forced = -1;
    };
    std::vector<Slot> slots;
    for (const auto& [id, e] : inst.edges) {
        Slot s;
        s.a = vmap.at(e.u);
        s.b = vmap.at(e.v);
        s.lambda = &e.lambda;
        if (auto it = pins.find(id); it != pins.end()) s.forced = it->second;
        slots.push_back(s);
    }
    for (const auto& [id, v] : inst.dangling) {
        Slot s;
        s.a = vmap.at(v);
        if (auto it = pins.find(id); it != pins.end()) s.forced = it->second;
        slots.push_back(s);
    }
    std::vector<const Signature<T>*> sigs;
    sigs.reserve(vid_index.size());
    for (int vid : vid_index) sigs.push_back(&inst.vertices.at(vid));

    T Z(0);
    std::vector<int> ham(vid_index.size(), 0);
    std::uint64_t total = 1ULL << slots.size();
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        bool skip = false;
        std::fill(ham.begin(), ham.end(), 0);
        T w(1);
        for (std::size_t i = 0; i < slots.size() && !skip; ++i) {
            int x = (mask >> i) & 1;
            if (slots[i].forced >= 0 && x != slots[i].forced) { skip = true; break; }
            if (x) {
                if (slots[i].lambda) w *= *slots[i].lambda;
                ham[slots[i].a] += 1;
                if (slots[i].b >= 0) ham[slots[i].b] += 1;
            } else if (slots[i].b >= 0) {
                // regular edge assigned 0 contributes no factor
            }
        }
        if (skip) continue;
        for (std::size_t j = 0; j < sigs.size(); ++j) {
            w *= (*sigs[j])[ham[j]];
            if (scalar_traits<T>::is_zero(w)) break;
        }
        Z += w;
    }
    return Z;
}

// Exact marginal probability P(sigma(E0) = alpha).
template <class T>
T brute_force_marginal(const Instance<T>& inst, const Configuration& alpha, int cap = -1) {
    T Z = brute_force_Z(inst, {}, cap);
    if (scalar_traits<T>::is_zero(Z)) throw error("marginal undefined: Z = 0");
    return brute_force_Z(inst, alpha, cap) / Z;
}

// Exact dangling-edge ratio R = P(sigma(e)=1) / P(sigma(e)=0).
template <class T>
T ratio_exact(const Instance<T>& inst, int dangling_id, int cap = -1) {
    if (!inst.is_dangling(dangling_id)) throw error("ratio_exact: id is not dangling");
    T z0 = brute_force_Z(inst, {{dangling_id, 0}}, cap);
    if (scalar_traits<T>::is_zero(z0)) throw error("ratio_exact: infinite ratio (Z(sigma=0) = 0)");
    return brute_force_Z(inst, {{dangling_id, 1}}, cap) / z0;
}

}  // namespace holant
