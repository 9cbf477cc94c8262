#pragma once

#include <fstream>

#include <json.hpp>

#include "holant/instance.hpp"

namespace holant {

using json = nlohmann::json;

// Instance schema:
//   { "vertices": [{"id": 0, "signature": {"values": ["1","1"]}} |
//                  {"id": 1, "signature": {"fib": {"c":"1","f0":"1","f1":"1","arity":3}}}],
//     "edges":    [{"id": 0, "u": 0, "v": 1, "lambda": "2"}],
//     "dangling": [{"id": 7, "v": 0}] }
// Numeric fields accept JSON numbers or decimal strings; strings parse exactly.

inline rational json_rational(const json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return rational(j.get<long long>());
    if (j.is_number_float()) {
        // exact: every finite double is a dyadic rational
        double d = j.get<double>();
        int exp;
        double m = std::frexp(d, &exp);
        long long mant = (long long)std::ldexp(m, 53);
        exp -= 53;
        rational r(mant);
        if (exp > 0) r *= rational(bigint(1) << exp);
        else if (exp < 0) r /= rational(bigint(1) << -exp);
        return r;
    }
    throw error("expected a number, got " + j.dump());
}

inline Instance<rational> parse_instance(const json& j) {
    Instance<rational> inst;
    if (!j.contains("vertices")) throw error("instance JSON: missing 'vertices'");
    for (const auto& jv : j.at("vertices")) {
        int id = jv.at("id").get<int>();
        if (id < 0) throw error("vertex ids must be non-negative");
        const auto& js = jv.at("signature");
        Signature<rational> sig;
        if (js.contains("values")) {
            std::vector<rational> vals;
            for (const auto& x : js.at("values")) vals.push_back(json_rational(x));
            if (vals.empty()) throw error("signature needs at least one value");
            sig = Signature<rational>(std::move(vals));
            if (sig.arity() >= 2) {
                std::optional<rational> c;
                for (int i = 0; i + 2 <= sig.arity(); ++i)
                    if (sig.values[i + 1] != 0) {
                        c = (sig.values[i + 2] - sig.values[i]) / sig.values[i + 1];
                        break;
                    }
                if (c && satisfies_fibonacci(sig, *c, 1e-12)) sig.fib_c = *c;
            }
        } else if (js.contains("fib")) {
            const auto& jf = js.at("fib");
            sig = build_fibonacci_signature(json_rational(jf.at("c")), json_rational(jf.at("f0")),
                                            json_rational(jf.at("f1")), jf.at("arity").get<int>());
        } else {
            throw error("signature must have 'values' or 'fib'");
        }
        if (!inst.vertices.emplace(id, std::move(sig)).second)
            throw error("duplicate vertex id " + std::to_string(id));
    }
    if (j.contains("edges"))
        for (const auto& je : j.at("edges")) {
            int id = je.at("id").get<int>();
            if (id < 0) throw error("edge ids must be non-negative");
            Edge<rational> e{je.at("u").get<int>(), je.at("v").get<int>(),
                             je.contains("lambda") ? json_rational(je.at("lambda")) : rational(1)};
            if (e.u == e.v) throw error("self-loops are not supported (edge " + std::to_string(id) + ")");
            if (!inst.edges.emplace(id, e).second) throw error("duplicate edge id " + std::to_string(id));
        }
    if (j.contains("dangling"))
        for (const auto& jd : j.at("dangling")) {
            int id = jd.at("id").get<int>();
            if (id < 0) throw error("dangling ids must be non-negative");
            if (inst.edges.count(id)) throw error("dangling id " + std::to_string(id) + " collides with an edge id");
            if (!inst.dangling.emplace(id, jd.at("v").get<int>()).second)
                throw error("duplicate dangling id " + std::to_string(id));
        }
    inst.validate();
    return inst;
}

inline json instance_to_json(const Instance<rational>& inst) {
    json j;
    j["vertices"] = json::array();
    for (const auto& [vid, sig] : inst.vertices) {
        json vals = json::array();
        for (const auto& x : sig.values) vals.push_back(rational_to_string(x));
        j["vertices"].push_back({{"id", vid}, {"signature", {{"values", vals}}}});
    }
    j["edges"] = json::array();
    for (const auto& [id, e] : inst.edges)
        j["edges"].push_back({{"id", id}, {"u", e.u}, {"v", e.v}, {"lambda", rational_to_string(e.lambda)}});
    j["dangling"] = json::array();
    for (const auto& [id, v] : inst.dangling) j["dangling"].push_back({{"id", id}, {"v", v}});
    return j;
}

inline Instance<rational> load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot open " + path);
    json j;
    in >> j;
    return parse_instance(j);
}

inline void save_instance(const Instance<rational>& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw error("cannot write " + path);
    out << instance_to_json(inst).dump(2) << "\n";
}

// Spin problem schema: {"beta","gamma","mu","graph":{"n","edges":[[u,v],...]}}
struct SpinProblemFile {
    double beta = 0, gamma = 0, mu = 1;
    int n = 0;
    std::vector<std::pair<int, int>> edges;
};

inline SpinProblemFile parse_spin_problem(const json& j) {
    SpinProblemFile sp;
    if (j.contains("beta")) sp.beta = to_double(json_rational(j.at("beta")));
    if (j.contains("gamma")) sp.gamma = to_double(json_rational(j.at("gamma")));
    if (j.contains("mu")) sp.mu = to_double(json_rational(j.at("mu")));
    if (j.contains("graph")) {
        const auto& jg = j.at("graph");
        sp.n = jg.at("n").get<int>();
        if (jg.contains("edges"))
            for (const auto& je : jg.at("edges")) {
                int u = je.at(0).get<int>(), v = je.at(1).get<int>();
                if (u < 0 || v < 0 || u >= sp.n || v >= sp.n) throw error("spin edge endpoint out of range");
                if (u == v) throw error("self-loops are not supported");
                sp.edges.emplace_back(u, v);
            }
    }
    return sp;
}

inline SpinProblemFile load_spin_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot open " + path);
    json j;
    in >> j;
    return parse_spin_problem(j);
}

}  // namespace holant
