#include <catch2/catch_amalgamated.hpp>

#include "jlrobust/random.hpp"

#include <cmath>
#include <vector>

using namespace jlrobust;

TEST_CASE("golden outputs pin the generator", "[random]") {
    // First raw outputs for seed 1. Frozen values: everything downstream
    // (projection matrices, synthetic datasets, frozen regressions) depends
    // on this stream being stable across platforms and toolchains.
    SplitRng rng(1);
    CHECK(rng.next_u64() == 2469588189546311528ull);
    CHECK(rng.next_u64() == 2516265689700432462ull);
    CHECK(rng.next_u64() == 8323445853463659930ull);
}

TEST_CASE("uniform01 stays in the half-open unit interval", "[random]") {
    SplitRng rng(7);
    double mn = 1.0, mx = 0.0, sum = 0.0, sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform01();
        mn = std::min(mn, u);
        mx = std::max(mx, u);
        sum += u;
        sq += u * u;
    }
    CHECK(mn >= 0.0);
    CHECK(mx < 1.0);
    CHECK(sum / n == Catch::Approx(0.5).margin(0.01));
    CHECK(sq / n - 0.25 == Catch::Approx(1.0 / 12.0).margin(0.01));
}

TEST_CASE("below is bounded and roughly uniform", "[random]") {
    SplitRng rng(8);
    std::vector<int> counts(7, 0);
    const int n = 70000;
    for (int i = 0; i < n; ++i) {
        const std::uint64_t v = rng.below(7);
        REQUIRE(v < 7);
        ++counts[v];
    }
    for (int c : counts) CHECK(c == Catch::Approx(n / 7.0).epsilon(0.05));
}

TEST_CASE("normal has standard moments", "[random]") {
    SplitRng rng(9);
    double sum = 0.0, sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sq += z * z;
    }
    CHECK(sum / n == Catch::Approx(0.0).margin(0.01));
    CHECK(sq / n == Catch::Approx(1.0).margin(0.02));
}

TEST_CASE("split streams are reproducible and tag-separated", "[random]") {
    SplitRng a(123), b(123);
    SplitRng a1 = a.split(5), b1 = b.split(5);
    for (int i = 0; i < 16; ++i) CHECK(a1.next_u64() == b1.next_u64());

    SplitRng c(123);
    SplitRng c2 = c.split(6);
    SplitRng c1 = SplitRng(123).split(5);
    bool differ = false;
    for (int i = 0; i < 16; ++i) differ |= (c1.next_u64() != c2.next_u64());
    CHECK(differ);

    // splitting does not disturb the parent stream
    SplitRng p(55), q(55);
    (void)p.split(99);
    CHECK(p.next_u64() == q.next_u64());
}
