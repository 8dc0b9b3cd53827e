// Acceptance gate: eleven numbered end-to-end guarantees, each printed as a
// single [PASS]/[FAIL] line with its measured evidence. Run with no
// arguments for the full gate, or pass criterion numbers to run a subset.
// Exit code 0 iff everything selected passed. All tolerances are pinned
// here, next to the checks that use them.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#include "jlrobust.hpp"
#include "jlrobust/experiment.hpp"
#include "test_support.hpp"

using namespace jlrobust;

namespace {

double since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* pattern, ...) {
    char buf[512];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buf, sizeof(buf), pattern, args);
    va_end(args);
    return buf;
}

// Margin a direction v realizes on an instance: the trimmed width over the
// inliers it selects itself. Used to measure the black box's actual ratio.
double realized_one(const PointSet& fP, const Point& v, double gamma) {
    double w = std::numeric_limits<double>::infinity();
    for (const std::size_t i : select_inliers_one_class(fP, v, gamma))
        w = std::min(w, projection_distance(fP[i], v));
    return w;
}

double realized_two(const PointSet& fP1, const PointSet& fP2, const Point& v, double g1, double g2) {
    const auto [s1, s2] = select_inliers_two_class(fP1, fP2, v, g1, g2);
    double lo = std::numeric_limits<double>::infinity(), hi = -std::numeric_limits<double>::infinity();
    for (const std::size_t i : s1) lo = std::min(lo, projection_distance(fP1[i], v));
    for (const std::size_t j : s2) hi = std::max(hi, projection_distance(fP2[j], v));
    return lo - hi;
}

PointSet negated(const PointSet& s) {
    PointSet out(s.dim());
    std::vector<double> row(s.dim());
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t t = 0; t < s.dim(); ++t) row[t] = -s[i][t];
        out.add_row(row);
    }
    return out;
}

// 1. Ten thousand valid perturbed-triangle witnesses all satisfy the margin
//    lower bound a' >= (2a^2 - 3 delta) / (2 sqrt(a^2 + delta)) - 1e-12,
//    inside one second.
Outcome criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    SplitRng rng(2001);
    std::size_t bad = 0;
    for (int i = 0; i < 10000; ++i)
        if (!check_triangle_bound(ts::random_witness(rng))) ++bad;
    const double secs = since(t0);
    return {bad == 0 && secs < 1.0,
            fmt("%zu of 10000 perturbed-triangle witnesses broke the bound (%.3fs, budget 1s)", bad, secs)};
}

// 2. For every map variant, n=200 points in d=512 at eps=0.5 and the derived
//    target dimension: at least 90%% of all pairs keep their squared
//    distance within (1 +- eps), for a majority of 9 fixed seeds. Under 10s.
Outcome criterion2() {
    const auto t0 = std::chrono::steady_clock::now();
    SplitRng rng(2002);
    const PointSet pts = ts::gaussian_points(rng, 200, 512, 1.0);
    const double eps = 0.5;
    const std::size_t d_tilde = target_dimension(pts.size(), eps);

    std::string counts;
    bool all_majorities = true;
    for (const Variant v : {Variant::gaussian, Variant::binary, Variant::fast}) {
        int good = 0;
        for (std::uint64_t seed = 101; seed <= 109; ++seed) {
            const ProjectionMap map = ProjectionMap::make(v, pts.dim(), d_tilde, seed);
            if (distortion_report(pts, map, 0, eps, 1).frac_within >= 0.90) ++good;
        }
        all_majorities = all_majorities && good >= 5;
        counts += fmt("%s %d/9 ", variant_name(v), good);
    }
    const double secs = since(t0);
    return {all_majorities && secs < 10.0,
            fmt("seeds with >=90%% pairs within eps: %s(d~=%zu, %.2fs, budget 10s)", counts.c_str(), d_tilde, secs)};
}

// 3. On 100 random separable instances the iterative hull solver is an
//    eps0-approximation of the exact polytope distance, and its iteration
//    count stays within twice the provable budget. Under 30s.
Outcome criterion3() {
    const auto t0 = std::chrono::steady_clock::now();
    SplitRng rng(2003);
    const double eps0 = 0.2;
    std::size_t bad_norm = 0, bad_iters = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 4 + rng.below(17), dim = 2 + rng.below(4);
        const PointSet s = ts::uniform_points(rng, n, dim, 1.0, 3.0);
        const SparseSolution g = gilbert(s, eps0);
        const double exact = min_norm_point(s).distance;
        if (!(norm(g.point) <= exact / (1.0 - eps0) + 1e-9)) ++bad_norm;
        const double diam = exact_diameter(s);
        const double e = diam * diam / (exact * exact);
        const auto budget = 2 * (2 * static_cast<std::size_t>(std::ceil(2.0 * e / eps0)));
        if (g.iterations > budget) ++bad_iters;
    }
    const double secs = since(t0);
    return {bad_norm == 0 && bad_iters == 0 && secs < 30.0,
            fmt("100 instances: %zu approximation misses, %zu iteration-budget misses (%.2fs, budget 30s)",
                bad_norm, bad_iters, secs)};
}

// 4. The implicit-difference hull solver replays the explicit-difference one
//    iterate for iterate, with exact pick-index equality, on 50 instances.
Outcome criterion4() {
    SplitRng rng(2004);
    std::size_t bad = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n1 = 2 + rng.below(7), n2 = 2 + rng.below(7), dim = 2 + rng.below(4);
        const PointSet q1 = ts::uniform_points(rng, n1, dim, 1.0, 2.0);
        const PointSet q2 = ts::uniform_points(rng, n2, dim, -2.0, -1.0);
        const double eps0 = 0.1 + 0.3 * rng.uniform01();

        PointSet diff(dim);
        std::vector<double> row(dim);
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t j = 0; j < n2; ++j) {
                for (std::size_t t = 0; t < dim; ++t) row[t] = q1[i][t] - q2[j][t];
                diff.add_row(row);
            }
        const MinkowskiSolution implicit = gilbert_minkowski(q1, q2, eps0);
        const SparseSolution expl = gilbert(diff, eps0);

        bool same = implicit.iterations == expl.iterations &&
                    implicit.pick_first.size() == expl.pick_history.size();
        for (std::size_t t = 0; same && t < implicit.pick_first.size(); ++t)
            same = implicit.pick_first[t] * n2 + implicit.pick_second[t] == expl.pick_history[t];
        if (!same) ++bad;
    }
    return {bad == 0, fmt("%zu of 50 instances diverged from the explicit-difference replay", bad)};
}

// 5. The iterative enclosing-ball solver is a (1+eps)-approximation of the
//    exact ball on 100 random instances, at eps 0.1 and 0.5.
Outcome criterion5() {
    SplitRng rng(2005);
    std::size_t bad = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 2 + rng.below(39), dim = 2 + rng.below(4);
        const PointSet s = ts::uniform_points(rng, n, dim, -2.0, 2.0);
        const double exact = exact_meb(s).radius;
        for (const double eps : {0.1, 0.5}) {
            const SparseSolution ball = bc_meb(s, eps);
            if (!(covering_radius(s, ball.point) <= (1.0 + eps) * exact + 1e-9)) ++bad;
        }
    }
    return {bad == 0, fmt("%zu of 200 ball checks exceeded (1+eps) times the exact radius", bad)};
}

// 6. The threshold-greedy clustering stays within 3x the subset-enumeration
//    optimum (centers restricted to input points) and always covers exactly
//    the inlier count, on 50 instances.
Outcome criterion6() {
    SplitRng rng(2006);
    std::size_t bad_radius = 0, bad_cover = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t k = 1 + rng.below(3);
        const std::size_t n = std::max(k + 1, std::size_t{5} + rng.below(10));
        const PointSet s = ts::uniform_points(rng, n, 2 + rng.below(3), -2.0, 2.0);
        const double gamma = 0.35 * rng.uniform01();

        const ClusterSet cs = charikar_kcenter_outliers(s, k, gamma);
        const double oracle = brute_force_kcenter_outliers(s, k, gamma);
        if (!(cs.radius <= 3.0 * oracle + 1e-9)) ++bad_radius;
        std::size_t covered = 0;
        for (const auto& c : cs.clusters) covered += c.size();
        if (covered != inlier_count(n, gamma)) ++bad_cover;
    }
    return {bad_radius == 0 && bad_cover == 0,
            fmt("50 instances: %zu radius misses vs 3x oracle, %zu coverage mismatches", bad_radius, bad_cover)};
}

// 7. Margin preservation through the full reduce-solve-recover chain, one-
//    and two-class: recovered width >= (1/lambda_eff)(1-eps0)^3 times the
//    subset-enumeration optimum in at least 80% of 30 fixed-seed trials,
//    where lambda_eff is the black box's measured ratio on the reduced
//    instance.
Outcome criterion7() {
    const double eps0 = 0.3;
    const double factor = std::pow(1.0 - eps0, 3.0);

    SplitRng rng(2007);
    int good1 = 0;
    for (int i = 0; i < 30; ++i) {
        const std::size_t n = 6 + rng.below(7);
        const PointSet p = ts::shifted_blob(rng, n, 64, 4.0, 0.4);
        const double gamma = (i % 2 == 0) ? 0.0 : 0.1;

        Point captured;
        const OneClassBlackBox capturing = [&](const PointSet& fP, double g) {
            BlackBoxDirection d = default_blackbox_one_class(fP, g, eps0);
            captured = d.v;
            return d;
        };
        const MarginResult res = solve_one_class(p, gamma, eps0, Variant::gaussian, 9000 + i, capturing);
        const PointSet fP = ProjectionMap::make(res.descriptor).apply(p);
        const double lambda_eff = brute_force_margin_one_class(fP, gamma) / realized_one(fP, captured, gamma);
        const double rho = brute_force_margin_one_class(p, gamma);
        if (res.width >= (1.0 / lambda_eff) * factor * rho - 1e-9) ++good1;
    }

    int good2 = 0;
    for (int i = 0; i < 30; ++i) {
        const std::size_t n1 = 3 + rng.below(4), n2 = 3 + rng.below(4);
        const PointSet p1 = ts::shifted_blob(rng, n1, 64, 4.0, 0.4);
        const PointSet p2 = negated(ts::shifted_blob(rng, n2, 64, 4.0, 0.4));
        const double gamma = (i % 2 == 0) ? 0.0 : 0.1;

        Point captured;
        const TwoClassBlackBox capturing = [&](const PointSet& f1, const PointSet& f2, double g1, double g2) {
            BlackBoxDirection d = default_blackbox_two_class(f1, f2, g1, g2, eps0);
            captured = d.v;
            return d;
        };
        const MarginResult res = solve_two_class(p1, p2, gamma, gamma, eps0, Variant::gaussian, 9100 + i, capturing);
        const ProjectionMap map = ProjectionMap::make(res.descriptor);
        const PointSet f1 = map.apply(p1), f2 = map.apply(p2);
        const double lambda_eff =
            brute_force_margin_two_class(f1, f2, gamma, gamma) / realized_two(f1, f2, captured, gamma, gamma);
        const double rho = brute_force_margin_two_class(p1, p2, gamma, gamma);
        if (res.width >= (1.0 / lambda_eff) * factor * rho - 1e-9) ++good2;
    }
    return {good1 >= 24 && good2 >= 24,
            fmt("one-class %d/30, two-class %d/30 trials met the preservation bound (need 24)", good1, good2)};
}

// 8. Radius preservation through the clustering chain at k=1, gamma=0:
//    recovered radius <= lambda_eff * sqrt((1+eps)^3/(1-eps)) times the
//    exact ball radius in at least 80% of 30 fixed-seed trials.
Outcome criterion8() {
    const double eps = 0.2;
    const double chain = std::sqrt(std::pow(1.0 + eps, 3.0) / (1.0 - eps));
    int good = 0;
    for (int i = 0; i < 30; ++i) {
        SplitRng rng(2008 + i);
        const PointSet p = ts::gaussian_points(rng, 30, 64, 1.0);
        const KCenterResult res = solve_kcenter(p, 1, 0.0, eps, Variant::gaussian, 8100 + i);

        const PointSet fP = ProjectionMap::make(res.descriptor).apply(p);
        const double lambda_eff = charikar_kcenter_outliers(fP, 1, 0.0).radius / exact_meb(fP).radius;
        const double r_opt = exact_meb(p).radius;
        if (res.radius <= lambda_eff * chain * r_opt + 1e-9) ++good;
    }
    return {good >= 24, fmt("%d/30 trials met the radius preservation bound (need 24)", good)};
}

// 9. Recovery identities: pushing a recovered solution forward through the
//    same map reproduces the reduced solution to 1e-9 relative error, on
//    every pipeline run across all variants.
Outcome criterion9() {
    const auto close = [](const Point& fwd, const Point& reduced) {
        double diff2 = 0.0, ref2 = 0.0;
        for (std::size_t t = 0; t < fwd.size(); ++t) {
            const double d = fwd[t] - reduced[t];
            diff2 += d * d;
            ref2 += reduced[t] * reduced[t];
        }
        return std::sqrt(diff2) <= 1e-9 * (1.0 + std::sqrt(ref2));
    };

    std::size_t runs = 0, bad = 0;
    for (const Variant v : {Variant::gaussian, Variant::binary, Variant::fast}) {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            SplitRng rng(400 + seed);
            const PointSet p = ts::shifted_blob(rng, 25, 48, 4.0, 0.5);
            const MarginResult one = solve_one_class(p, 0.1, 0.3, v, seed);
            ++runs;
            if (!close(ProjectionMap::make(one.descriptor).apply_vector(one.direction), one.reduced_solution)) ++bad;

            const PointSet p2 = negated(ts::shifted_blob(rng, 12, 48, 4.0, 0.5));
            const PointSet p1 = ts::shifted_blob(rng, 12, 48, 4.0, 0.5);
            const MarginResult two = solve_two_class(p1, p2, 0.1, 0.1, 0.3, v, seed);
            ++runs;
            if (!close(ProjectionMap::make(two.descriptor).apply_vector(two.direction), two.reduced_solution)) ++bad;

            PointSet both(48);
            std::vector<double> row(48);
            for (std::size_t i = 0; i < p1.size(); ++i) both.add_row(Point(p1[i].begin(), p1[i].end()));
            for (std::size_t i = 0; i < p2.size(); ++i) both.add_row(Point(p2[i].begin(), p2[i].end()));
            const KCenterResult kc = solve_kcenter(both, 2, 0.1, 0.3, v, seed);
            ++runs;
            const ProjectionMap map = ProjectionMap::make(kc.descriptor);
            for (std::size_t c = 0; c < kc.centers.size(); ++c) {
                const Point fwd = map.apply_vector(kc.centers.row(c));
                const Point red(kc.reduced_centers.row(c).begin(), kc.reduced_centers.row(c).end());
                if (!close(fwd, red)) {
                    ++bad;
                    break;
                }
            }
        }
    }
    return {bad == 0, fmt("%zu of %zu pipeline runs broke the forward-map identity", bad, runs)};
}

// 10. At n=2000, d=2048 and a 10%% reduction rate, the full pipeline beats
//     the no-reduction baseline on wall time for both the margin task and
//     the clustering task. Whole check under five minutes.
Outcome criterion10() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t n = 2000, d = 2048;

    // wide blob close to the origin: separable, but wide enough that the
    // hull solver has real work to do in the full dimension
    SplitRng rng(4001);
    PointSet p(d);
    std::vector<double> row(d);
    for (std::size_t i = 0; i < n; ++i) {
        row[0] = 3.0 + 0.2 * rng.normal();
        for (std::size_t t = 1; t < d; ++t) row[t] = 0.15 * rng.normal();
        p.add_row(row);
    }

    ExperimentConfig cfg;
    cfg.gamma = 0.1;
    cfg.eps0 = 0.3;
    cfg.k = 2;
    cfg.eps = 0.3;
    const std::size_t d_tilde = detail::rate_dimension(0.1, d);

    const detail::RunOutcome svm_base = detail::run_svm1(p, cfg, Variant::custom, 0, 0);
    const detail::RunOutcome svm_fast = detail::run_svm1(p, cfg, Variant::fast, d_tilde, 4002);
    const double svm_norm = svm_fast.total_seconds / svm_base.total_seconds;

    const detail::RunOutcome kc_base = detail::run_kcenter(p, cfg, Variant::custom, 0, 0);
    const detail::RunOutcome kc_fast = detail::run_kcenter(p, cfg, Variant::fast, d_tilde, 4003);
    const double kc_norm = kc_fast.total_seconds / kc_base.total_seconds;

    const double secs = since(t0);
    return {svm_norm < 1.0 && kc_norm < 1.0 && secs < 300.0,
            fmt("normalized time: margin %.3f (%.2fs vs %.2fs), clustering %.3f (%.2fs vs %.2fs); "
                "d~=%zu, total %.1fs, budget 300s",
                svm_norm, svm_fast.total_seconds, svm_base.total_seconds, kc_norm, kc_fast.total_seconds,
                kc_base.total_seconds, d_tilde, secs)};
}

// 11. Planted far points (10%% of the data at 3x the group radius) are
//     discarded by the clustering pipeline at >=95% recall, for a majority
//     of 9 fixed seeds.
Outcome criterion11() {
    int good = 0;
    std::string recalls;
    for (std::uint64_t t = 1; t <= 9; ++t) {
        const LabeledDataset base = synth_clusters(2, 100, 1024, 0.3, 150.0, 5000 + t);
        const LabeledDataset ds = inject_ball_outliers(base, 0.1, 3.0, 6000 + t);
        const std::size_t injected = ds.injected_outliers.size();
        const double gamma = (static_cast<double>(injected) + 0.5) / static_cast<double>(ds.size());

        const KCenterResult res = solve_kcenter(ds.points, 2, gamma, 0.5, Variant::gaussian, 7000 + t);
        std::vector<std::size_t> discarded;
        for (std::size_t i = 0; i < res.assignment.size(); ++i)
            if (res.assignment[i] < 0) discarded.push_back(i);

        std::vector<std::size_t> hit;
        std::set_intersection(discarded.begin(), discarded.end(), ds.injected_outliers.begin(),
                              ds.injected_outliers.end(), std::back_inserter(hit));
        const double recall = static_cast<double>(hit.size()) / static_cast<double>(injected);
        if (recall >= 0.95) ++good;
        recalls += fmt("%.2f ", recall);
    }
    return {good >= 5, fmt("trial recalls: %s(%d/9 at >=0.95, need 5)", recalls.c_str(), good)};
}

Outcome run_criterion(int c) {
    switch (c) {
        case 1: return criterion1();
        case 2: return criterion2();
        case 3: return criterion3();
        case 4: return criterion4();
        case 5: return criterion5();
        case 6: return criterion6();
        case 7: return criterion7();
        case 8: return criterion8();
        case 9: return criterion9();
        case 10: return criterion10();
        case 11: return criterion11();
        default: return {false, "unknown criterion"};
    }
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        const int c = std::atoi(argv[i]);
        if (c < 1 || c > 11) {
            std::fprintf(stderr, "usage: %s [criterion 1..11]...\n", argv[0]);
            return 1;
        }
        selected.push_back(c);
    }
    if (selected.empty())
        for (int c = 1; c <= 11; ++c) selected.push_back(c);

    bool all = true;
    for (const int c : selected) {
        const Outcome o = run_criterion(c);
        std::printf("[%s] criterion %d: %s\n", o.pass ? "PASS" : "FAIL", c, o.detail.c_str());
        std::fflush(stdout);
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
