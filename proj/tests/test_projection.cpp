#include <catch2/catch_amalgamated.hpp>

#include "jlrobust/combination.hpp"
#include "jlrobust/projection.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace jlrobust;

TEST_CASE("target dimension and its inverse", "[projection]") {
    // ceil(8 ln(1000) / 0.25) = ceil(221.048...) = 222
    CHECK(target_dimension(1000, 0.5) == 222);
    CHECK(target_dimension(2, 0.9, 1.0) == 1);

    // inverting the rounded dimension can only shrink epsilon
    for (std::size_t n : {10u, 100u, 5000u}) {
        for (double eps : {0.2, 0.5, 0.9}) {
            const std::size_t dt = target_dimension(n, eps);
            CHECK(epsilon_for_dimension(n, dt) <= eps + 1e-12);
            CHECK(epsilon_for_dimension(n, dt) >= eps * 0.9);  // rounding gains at most a little
        }
    }

    CHECK_THROWS_AS(target_dimension(1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(target_dimension(10, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(target_dimension(10, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(epsilon_for_dimension(1, 5), std::invalid_argument);
    CHECK_THROWS_AS(epsilon_for_dimension(10, 0), std::invalid_argument);
}

TEST_CASE("variant names round trip", "[projection]") {
    for (Variant v : {Variant::gaussian, Variant::binary, Variant::fast, Variant::custom})
        CHECK(variant_from_name(variant_name(v)) == v);
    CHECK_THROWS_AS(variant_from_name("hadamard"), std::invalid_argument);
}

TEST_CASE("maps are deterministic in the descriptor", "[projection]") {
    for (Variant v : {Variant::gaussian, Variant::binary, Variant::fast}) {
        const ProjectionMap m1 = ProjectionMap::make(v, 31, 7, 99);
        const ProjectionMap m2 = ProjectionMap::make(m1.descriptor());
        SplitRng rng(3);
        const PointSet pts = ts::gaussian_points(rng, 5, 31, 1.0);
        CHECK(m1.apply(pts) == m2.apply(pts));

        const ProjectionMap m3 = ProjectionMap::make(v, 31, 7, 100);
        CHECK_FALSE(m1.apply(pts) == m3.apply(pts));
    }
    CHECK_THROWS_AS(ProjectionMap::make(Variant::custom, 4, 2, 0), std::invalid_argument);
}

TEST_CASE("variants with the same seed draw distinct matrices", "[projection]") {
    const ProjectionMap g = ProjectionMap::gaussian(16, 4, 7);
    const ProjectionMap b = ProjectionMap::binary(16, 4, 7);
    CHECK_FALSE(g.matrix() == b.matrix());
}

TEST_CASE("gaussian entries have the advertised scale", "[projection]") {
    const std::size_t d = 200, dt = 50;
    const ProjectionMap m = ProjectionMap::gaussian(d, dt, 11);
    const auto& mat = m.matrix();
    REQUIRE(mat.size() == d * dt);
    double sum = 0.0, sq = 0.0;
    for (double x : mat) {
        sum += x;
        sq += x * x;
    }
    const double n = static_cast<double>(mat.size());
    CHECK(sum / n == Catch::Approx(0.0).margin(0.002));
    // entry variance 1/d_tilde makes the map an isometry in expectation
    CHECK(sq / n == Catch::Approx(1.0 / dt).epsilon(0.05));
}

TEST_CASE("binary entries take the three admissible values", "[projection]") {
    const std::size_t d = 300, dt = 12;
    const double s = std::sqrt(3.0 / dt);  // = 0.5 for dt = 12
    const ProjectionMap m = ProjectionMap::binary(d, dt, 13);
    std::size_t zero = 0, pos = 0, neg = 0;
    for (double x : m.matrix()) {
        if (x == 0.0) ++zero;
        else if (x == s) ++pos;
        else if (x == -s) ++neg;
        else FAIL("unexpected entry value");
    }
    const double n = static_cast<double>(d * dt);
    CHECK(zero / n == Catch::Approx(2.0 / 3.0).margin(0.03));
    CHECK(pos / n == Catch::Approx(1.0 / 6.0).margin(0.03));
    CHECK(neg / n == Catch::Approx(1.0 / 6.0).margin(0.03));
}

TEST_CASE("fast map sends basis vectors to +-1/sqrt(dt) coordinates", "[projection]") {
    const std::size_t d = 5, dt = 3;  // pads to 8 internally
    const ProjectionMap m = ProjectionMap::fast(d, dt, 17);
    CHECK_THROWS_AS(m.matrix(), std::logic_error);
    const double mag = 1.0 / std::sqrt(static_cast<double>(dt));
    for (std::size_t t = 0; t < d; ++t) {
        Point e(d, 0.0);
        e[t] = 1.0;
        const Point out = m.apply_vector(e);
        REQUIRE(out.size() == dt);
        for (double x : out) CHECK(std::abs(x) == Catch::Approx(mag).epsilon(1e-12));
    }
}

TEST_CASE("fast map with full output dimension is an exact isometry", "[projection]") {
    // d = dt = 8: all rows of the sign-twisted Hadamard are kept, and
    // (1/sqrt(8)) H diag(s) is orthogonal, so norms are preserved exactly.
    const ProjectionMap m = ProjectionMap::fast(8, 8, 21);
    SplitRng rng(22);
    for (int rep = 0; rep < 50; ++rep) {
        Point x(8);
        for (double& v : x) v = rng.normal();
        const Point y = m.apply_vector(x);
        CHECK(norm(y) == Catch::Approx(norm(x)).epsilon(1e-12));
    }
}

TEST_CASE("fast map is linear and norm-preserving in expectation", "[projection]") {
    const std::size_t d = 37, dt = 9;
    const ProjectionMap m = ProjectionMap::fast(d, dt, 23);
    SplitRng rng(24);

    Point x(d), y(d), combo(d);
    for (std::size_t t = 0; t < d; ++t) {
        x[t] = rng.normal();
        y[t] = rng.normal();
        combo[t] = 2.5 * x[t] - 0.75 * y[t];
    }
    const Point mx = m.apply_vector(x), my = m.apply_vector(y), mc = m.apply_vector(combo);
    for (std::size_t r = 0; r < dt; ++r)
        CHECK(mc[r] == Catch::Approx(2.5 * mx[r] - 0.75 * my[r]).margin(1e-9));

    double ratio = 0.0;
    const int reps = 4000;
    for (int rep = 0; rep < reps; ++rep) {
        Point z(d);
        for (double& v : z) v = rng.normal();
        ratio += squared_norm(m.apply_vector(z)) / squared_norm(z);
    }
    CHECK(ratio / reps == Catch::Approx(1.0).margin(0.05));
}

TEST_CASE("custom dense maps apply exactly", "[projection]") {
    const ProjectionMap m = ProjectionMap::custom_dense(3, 2, {1, 0, 0, 0, 1, 0});
    const Point out = m.apply_vector(Point{4.0, 5.0, 6.0});
    CHECK(out == Point{4.0, 5.0});
    CHECK(m.variant() == Variant::custom);

    CHECK_THROWS_AS(ProjectionMap::custom_dense(3, 2, {1, 0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(ProjectionMap::gaussian(4, 5, 0), std::invalid_argument);
    CHECK_THROWS_AS(ProjectionMap::gaussian(4, 0, 0), std::invalid_argument);
}

TEST_CASE("applying to a point set maps every row", "[projection]") {
    SplitRng rng(25);
    const PointSet pts = ts::gaussian_points(rng, 9, 20, 1.0);
    const ProjectionMap m = ProjectionMap::binary(20, 6, 26);
    const PointSet mapped = apply(m, pts);
    REQUIRE(mapped.size() == 9);
    REQUIRE(mapped.dim() == 6);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Point row = m.apply_vector(pts[i]);
        for (std::size_t r = 0; r < 6; ++r) CHECK(mapped[i][r] == row[r]);
    }

    PointSet wrong(5);
    wrong.add_row({1, 2, 3, 4, 5});
    CHECK_THROWS_AS(m.apply(wrong), std::invalid_argument);
}

TEST_CASE("distances survive reduction within epsilon for every variant", "[projection]") {
    SplitRng rng(27);
    const std::size_t n = 40, d = 400;
    const PointSet pts = ts::gaussian_points(rng, n, d, 1.0);
    const double eps = 0.6;
    const std::size_t dt = target_dimension(n, eps);
    REQUIRE(dt <= d);

    for (Variant v : {Variant::gaussian, Variant::binary, Variant::fast}) {
        const ProjectionMap m = ProjectionMap::make(v, d, dt, 31);
        const DistortionReport rep = distortion_report(pts, m, 0, eps, 0);
        CHECK(rep.pairs == n * (n - 1) / 2);
        CHECK(rep.frac_within >= 0.9);
        CHECK(rep.mean_rel <= rep.max_rel);
        CHECK(rep.mean_rel <= eps);
    }

    const ProjectionMap m = ProjectionMap::gaussian(d, dt, 31);
    const DistortionReport sampled = distortion_report(pts, m, 150, eps, 5);
    CHECK(sampled.pairs == 150);
    const DistortionReport sampled2 = distortion_report(pts, m, 150, eps, 5);
    CHECK(sampled.max_rel == sampled2.max_rel);  // sampling is seeded
}

TEST_CASE("combination validation catches malformed inputs", "[combination]") {
    ConvexCombination ok{{0, 2}, {0.25, 0.75}};
    ok.validate();

    CHECK_THROWS_AS((ConvexCombination{{}, {}}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((ConvexCombination{{0, 0}, {0.5, 0.5}}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((ConvexCombination{{0, 1}, {0.5}}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((ConvexCombination{{0, 1}, {-0.2, 1.2}}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((ConvexCombination{{0, 1}, {0.3, 0.3}}.validate()), std::invalid_argument);
}

TEST_CASE("combination remapping relabels indices", "[combination]") {
    ConvexCombination local{{0, 2}, {0.5, 0.5}};
    const std::vector<std::size_t> table{7, 4, 9};
    const ConvexCombination global = local.remapped(table);
    CHECK(global.indices == std::vector<std::size_t>{7, 9});
    CHECK(global.weights == local.weights);
    const std::vector<std::size_t> short_table{7};
    CHECK_THROWS_AS(local.remapped(short_table), std::out_of_range);
}

TEST_CASE("recover forms the weighted sum of the referenced rows", "[combination]") {
    PointSet pts(2);
    pts.add_row({0.0, 0.0});
    pts.add_row({4.0, 0.0});
    pts.add_row({0.0, 8.0});
    const ConvexCombination comb{{1, 2}, {0.75, 0.25}};
    const Point p = recover(comb, pts);
    CHECK(p[0] == Catch::Approx(3.0));
    CHECK(p[1] == Catch::Approx(2.0));
    CHECK_THROWS_AS(recover(ConvexCombination{{3}, {1.0}}, pts), std::out_of_range);
}

TEST_CASE("reduction commutes with convex combinations", "[combination]") {
    // The property the whole recovery pipeline rests on: coefficients found in
    // reduced space reproduce the reduced solution when evaluated on the
    // original points and then mapped down.
    SplitRng rng(33);
    const PointSet pts = ts::gaussian_points(rng, 12, 30, 1.0);
    for (Variant v : {Variant::gaussian, Variant::binary, Variant::fast}) {
        const ProjectionMap m = ProjectionMap::make(v, 30, 8, 34);
        ConvexCombination comb{{0, 3, 7, 11}, {0.1, 0.2, 0.3, 0.4}};
        const Point down_then_comb = recover(comb, m.apply(pts));
        const Point comb_then_down = m.apply_vector(recover(comb, pts));
        for (std::size_t r = 0; r < 8; ++r)
            CHECK(down_then_comb[r] == Catch::Approx(comb_then_down[r]).margin(1e-10));
    }
}
