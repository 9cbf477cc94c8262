#include "test_helpers.hpp"

#include "holant/oracle.hpp"

using namespace holant;
using ht::k4;
using ht::triangle;

TEST_CASE("brute force partition functions") {
    CHECK(brute_force_Z(k4({0, 1, 0, 0})) == 3);       // perfect matchings of K4
    CHECK(brute_force_Z(triangle({1, 1, 0})) == 4);    // all matchings of K3

    Instance<rational> g;
    g.vertices.emplace(0, Signature<rational>(std::vector<rational>{1, 1}));
    g.vertices.emplace(1, Signature<rational>(std::vector<rational>{1, 1}));
    g.edges.emplace(0, Edge<rational>{0, 1, 2});
    CHECK(brute_force_Z(g) == 3);

    Instance<rational> empty;
    CHECK(brute_force_Z(empty) == 1);
}

TEST_CASE("oracle cap") {
    GenSpec gs;
    gs.model = GraphModel::Cycle;
    gs.n = 8;
    auto inst = generate_instance(gs);
    CHECK_THROWS_AS(brute_force_Z(inst, {}, 7), error);
    CHECK_NOTHROW(brute_force_Z(inst, {}, 8));
}

TEST_CASE("marginals") {
    Instance<rational> g;
    g.vertices.emplace(0, Signature<rational>(std::vector<rational>{1, 1}));
    g.dangling.emplace(0, 0);
    CHECK(brute_force_marginal(g, {{0, 0}}) == rational(1, 2));

    Instance<rational> h;
    h.vertices.emplace(0, Signature<rational>(std::vector<rational>{1, 3}));
    h.dangling.emplace(0, 0);
    CHECK(brute_force_marginal(h, {{0, 1}}) == rational(3, 4));

    auto tri = triangle({1, 1, 0});
    CHECK(brute_force_marginal(tri, {{1, 1}}) == rational(1, 4));

    Instance<rational> dead;
    dead.vertices.emplace(0, Signature<rational>(std::vector<rational>{0, 0}));
    dead.dangling.emplace(0, 0);
    CHECK_THROWS_AS(brute_force_marginal(dead, {{0, 0}}), error);
}

TEST_CASE("ratio_exact") {
    Instance<rational> lone;
    lone.vertices.emplace(0, Signature<rational>(std::vector<rational>{2, 5}));
    lone.dangling.emplace(0, 0);
    CHECK(ratio_exact(lone, 0) == rational(5, 2));

    // vertex [1,1,2] with a dangling edge and a unit edge to a [1,1] leaf
    Instance<rational> g;
    g.vertices.emplace(0, Signature<rational>(std::vector<rational>{1, 1, 2}));
    g.vertices.emplace(1, Signature<rational>(std::vector<rational>{1, 1}));
    g.edges.emplace(1, Edge<rational>{0, 1, 1});
    g.dangling.emplace(0, 0);
    CHECK(ratio_exact(g, 0) == rational(3, 2));

    Instance<rational> inf;
    inf.vertices.emplace(0, Signature<rational>(std::vector<rational>{0, 1}));
    inf.dangling.emplace(0, 0);
    CHECK_THROWS_AS(ratio_exact(inf, 0), error);
}

TEST_CASE("trivial ratio sandwich") {
    Rng rng(41);
    for (int trial = 0; trial < 60; ++trial) {
        FamilySampler fs;
        fs.c = rng.grid(rational(1, 2), rational(2));
        fs.f0_choices = {rational(1), rational(2)};
        fs.f1_choices = {rational(1), rational(5, 2)};
        fs.lambda_lo = rational(1, 2);
        fs.lambda_hi = rational(2);
        fs.add_dangling = true;
        auto inst = sample_family_instance(fs, GraphModel::Gnp, (int)rng.uniform_int(2, 5), 0.5, rng);
        int did = inst.dangling.begin()->first;
        int v = inst.dangling.at(did);
        const auto& f = inst.vertices.at(v);
        rational lo = f[1] / f[0], hi = lo;
        for (int k = 0; k + 1 <= f.arity(); ++k) {
            rational r = f[k + 1] / f[k];
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        rational R = ratio_exact(inst, did);
        REQUIRE(R >= lo);
        REQUIRE(R <= hi);
    }
}

TEST_CASE("HOLANT_ORACLE_CAP env override") {
    setenv("HOLANT_ORACLE_CAP", "5", 1);
    CHECK(default_oracle_cap() == 5);
    unsetenv("HOLANT_ORACLE_CAP");
    CHECK(default_oracle_cap() == 24);
}
