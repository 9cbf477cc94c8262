#include "test_helpers.hpp"

#include "holant/oracle.hpp"
#include "holant/transform.hpp"

using namespace holant;
using ht::triangle;

TEST_CASE("transform_signature basics") {
    Signature<double> s(std::vector<double>{1.0, 0.0, 1.0});
    auto same = transform_signature(BasisTransform{}, s, TransformMode::Contravariant);
    CHECK(same.values == std::vector<double>{1, 0, 1});

    // [[1,1],[1,-1]] sends [1,0,1] to [2,0,2]
    auto h = transform_signature(BasisTransform{1, 1, 1, -1}, s, TransformMode::Contravariant);
    REQUIRE(h.values.size() == 3);
    CHECK(h.values[0] == Catch::Approx(2.0));
    CHECK(h.values[1] == Catch::Approx(0.0).margin(1e-12));
    CHECK(h.values[2] == Catch::Approx(2.0));

    CHECK_THROWS_AS(transform_signature(BasisTransform{1, 1, 1, 1}, s, TransformMode::Contravariant),
                    error);  // singular
}

TEST_CASE("transform inverse round trip") {
    Rng rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        int ar = (int)rng.uniform_int(1, 6);
        std::vector<double> vals(ar + 1);
        for (auto& x : vals) x = rng.u01() * 3.0 + 0.1;
        Signature<double> s(vals);
        BasisTransform T{rng.u01() * 2 + 0.5, rng.u01() - 0.5, rng.u01() - 0.5, rng.u01() * 2 + 0.5};
        if (std::abs(T.det()) < 0.1) continue;
        auto back = transform_signature(T.inverse(), transform_signature(T, s, TransformMode::Contravariant),
                                        TransformMode::Contravariant);
        for (int k = 0; k <= ar; ++k) CHECK(back.values[k] == Catch::Approx(s.values[k]).margin(1e-10));
    }
}

TEST_CASE("to_bipartite preserves Z exactly") {
    Instance<rational> g;
    g.vertices.emplace(0, Signature<rational>(std::vector<rational>{1, 1}));
    g.vertices.emplace(1, Signature<rational>(std::vector<rational>{1, 1}));
    g.edges.emplace(0, Edge<rational>{0, 1, 2});
    auto b = to_bipartite(g);
    CHECK(b.vertices.size() == 3);
    CHECK(brute_force_Z(b) == 3);

    auto tri = to_bipartite(triangle({1, 1, 0}));
    CHECK(tri.edges.size() == 6);
    CHECK(brute_force_Z(tri) == 4);

    // lambda = 0 edge forces sigma(e) = 0
    Instance<rational> z;
    z.vertices.emplace(0, Signature<rational>(std::vector<rational>{1, 3}));
    z.vertices.emplace(1, Signature<rational>(std::vector<rational>{1, 5}));
    z.edges.emplace(0, Edge<rational>{0, 1, 0});
    auto bz = to_bipartite(z);
    CHECK(brute_force_Z(bz) == brute_force_Z(z));
    CHECK(brute_force_Z(bz) == 1);

    Rng rng(13);
    for (int trial = 0; trial < 40; ++trial) {
        FamilySampler fs;
        fs.c = rng.grid(rational(1, 2), rational(2));
        fs.f0_choices = {rational(1), rational(2)};
        fs.f1_choices = {rational(1), rational(3)};
        fs.lambda_lo = rational(1, 2);
        fs.lambda_hi = rational(2);
        auto inst = sample_family_instance(fs, GraphModel::Gnp, (int)rng.uniform_int(2, 5), 0.5, rng);
        REQUIRE(brute_force_Z(to_bipartite(inst)) == brute_force_Z(inst));
    }
}

TEST_CASE("Holant theorem: paired transforms preserve Z") {
    Rng rng(29);
    for (int trial = 0; trial < 30; ++trial) {
        FamilySampler fs;
        fs.c = rng.grid(rational(1, 2), rational(2));
        fs.f0_choices = {rational(1), rational(2)};
        fs.f1_choices = {rational(1), rational(3, 2)};
        fs.lambda_lo = rational(1, 2);
        fs.lambda_hi = rational(2);
        auto inst = sample_family_instance(fs, GraphModel::Gnp, (int)rng.uniform_int(2, 4), 0.6, rng);
        auto bip = to_bipartite(inst);
        std::set<int> left;
        for (const auto& [vid, sig] : inst.vertices) left.insert(vid);  // originals vs subdividers
        auto dbl = bip.template converted<double>();
        double z0 = brute_force_Z(dbl);
        BasisTransform T{rng.u01() + 0.5, rng.u01() - 0.5, rng.u01() - 0.5, rng.u01() + 0.5};
        if (std::abs(T.det()) < 0.1) continue;
        auto moved = holant_transform_bipartite(dbl, T, left);
        double z1 = brute_force_Z(moved);
        REQUIRE(z1 == Catch::Approx(z0).epsilon(1e-10));
    }
}
