#include "test_helpers.hpp"

using namespace holant;

TEST_CASE("fibonacci signature construction") {
    auto s = build_fibonacci_signature<rational>(1, 1, 1, 5);
    CHECK(s.values == std::vector<rational>{1, 1, 2, 3, 5, 8});
    CHECK(s.fib_c == rational(1));

    auto parity = build_fibonacci_signature<rational>(0, 3, 7, 3);
    CHECK(parity.values == std::vector<rational>{3, 7, 3, 7});

    auto gadget_like = build_fibonacci_signature<rational>(1, 1, 0, 4);
    CHECK(gadget_like.values == std::vector<rational>{1, 0, 1, 1, 2});

    CHECK_THROWS_AS(build_fibonacci_signature<rational>(1, 0, 0, 2), error);
    CHECK_THROWS_AS(build_fibonacci_signature<rational>(-2, 1, 1, 3), error);
}

TEST_CASE("gadget signature is [1,0,1,c,...]") {
    auto g = gadget_signature<rational>(rational(3, 2), 3);
    CHECK(g.values == std::vector<rational>{1, 0, 1, rational(3, 2)});
    auto g5 = gadget_signature<double>(2.0, 5);
    CHECK(g5.values[4] == 2.0 * 2.0 + 1.0);
    CHECK(g5.values[5] == 2.0 * 5.0 + 2.0);
}

TEST_CASE("classify_signature") {
    auto m = classify_signature(Signature<rational>(std::vector<rational>{1, 1, 2, 3, 5}));
    CHECK(m.is_fibonacci);
    CHECK(m.c == Catch::Approx(1.0));
    CHECK(m.p == Catch::Approx(1.0));
    CHECK(m.q == Catch::Approx(2.0));  // max over {1, 2, 3/2, 5/3}

    auto z = classify_signature(Signature<rational>(std::vector<rational>{1, 0, 1, 1}));
    CHECK(z.is_fibonacci);
    CHECK(z.c == Catch::Approx(1.0));
    CHECK(z.p == 0.0);
    CHECK(z.q == kInf);

    auto geo = classify_signature(Signature<rational>(std::vector<rational>{1, 2, 4, 8}));
    CHECK(geo.is_fibonacci);
    CHECK(geo.c == Catch::Approx(1.5));
    CHECK(geo.p == Catch::Approx(2.0));
    CHECK(geo.q == Catch::Approx(2.0));

    auto bad = classify_signature(Signature<rational>(std::vector<rational>{1, 1, 2, 4}));
    CHECK_FALSE(bad.is_fibonacci);
}

TEST_CASE("classify agrees with construction on random families") {
    Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        rational c = rng.grid(rational(1, 10), rational(3));
        rational f0 = rng.grid(rational(1, 4), rational(3));
        rational f1 = rng.grid(rational(1, 4), rational(3));
        int ar = (int)rng.uniform_int(2, 6);
        auto s = build_fibonacci_signature(c, f0, f1, ar);
        auto m = classify_signature(s);
        REQUIRE(m.is_fibonacci);
        CHECK(m.c == Catch::Approx(to_double(c)).margin(1e-9));
        // p, q bracket every consecutive ratio
        for (int i = 0; i + 1 <= ar; ++i) {
            if (s.values[i] == 0) continue;
            double r = to_double(s.values[i + 1]) / to_double(s.values[i]);
            CHECK(r >= m.p - 1e-12);
            CHECK(r <= m.q + 1e-12);
        }
    }
}

TEST_CASE("pinning a signature") {
    Signature<rational> s(std::vector<rational>{1, 3});
    CHECK(s.pinned(rational(0)).values == std::vector<rational>{1});
    CHECK(s.pinned(rational(1)).values == std::vector<rational>{3});
    CHECK(s.pinned(rational(1, 2)).values == std::vector<rational>{2});

    Signature<rational> t(std::vector<rational>{1, 1, 2, 3});
    CHECK(t.pinned(rational(1)).values == std::vector<rational>{1, 2, 3});
    CHECK(t.truncated(2).values == std::vector<rational>{1, 1, 2});
}

TEST_CASE("satisfies_fibonacci tolerance") {
    Signature<double> s(std::vector<double>{1.0, 1.0, 2.0, 3.0000000001});
    CHECK(satisfies_fibonacci(s, 1.0, 1e-6));
    CHECK_FALSE(satisfies_fibonacci(s, 1.0, 1e-14));
}
