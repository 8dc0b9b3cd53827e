#pragma once

// k-center clustering with outliers via dimension reduction. Pipeline: map
// the points down, let a pluggable black box produce k disjoint clusters
// covering the inlier count, shrink every reduced cluster to an approximate
// MEB center expressed in convex-combination coefficients, and lift each
// center back up through those coefficients. The default black box is a
// greedy 3-approximation over the candidate radii.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "combination.hpp"
#include "geometry.hpp"
#include "hull.hpp"
#include "projection.hpp"
#include "svm.hpp"

namespace jlrobust {

struct ClusterSet {
    std::vector<std::vector<std::size_t>> clusters;  // disjoint index sets, lowest-index order inside
    double radius = 0.0;                             // the greedy's certified threshold
    std::string solver;
    double seconds = 0.0;
};

struct KCenterResult {
    PointSet centers{1};                  // k recovered centers in the original space
    double radius = 0.0;                  // max distance of an assigned point to its center
    std::vector<int> assignment;          // per input point: cluster id, or -1 for outlier
    std::vector<ConvexCombination> combs; // one per center, over original indices
    PointSet reduced_centers{1};          // the centers found down below
    ProjectionDescriptor descriptor;
    PipelineTiming timing;
    std::string blackbox_name;
};

namespace detail {

// One greedy pass at threshold r: k times, pick the point whose r-ball covers
// the most still-uncovered points (ties to the lower index), then retire
// everything within 3r of it into that cluster.
struct GreedyOutcome {
    std::vector<std::vector<std::size_t>> clusters;
    std::vector<std::size_t> picks;  // the chosen point per cluster
    std::size_t covered = 0;
};

inline GreedyOutcome greedy_cover(const std::vector<std::vector<double>>& dist, std::size_t k, double r) {
    const std::size_t n = dist.size();
    std::vector<bool> taken(n, false);
    GreedyOutcome out;
    for (std::size_t round = 0; round < k; ++round) {
        std::size_t best = n, best_count = 0;
        for (std::size_t c = 0; c < n; ++c) {
            std::size_t count = 0;
            for (std::size_t j = 0; j < n; ++j)
                if (!taken[j] && dist[c][j] <= r) ++count;
            if (count > best_count) {
                best_count = count;
                best = c;
            }
        }
        if (best == n) break;  // nothing left to cover
        std::vector<std::size_t> cluster;
        for (std::size_t j = 0; j < n; ++j)
            if (!taken[j] && dist[best][j] <= 3.0 * r) {
                taken[j] = true;
                cluster.push_back(j);
            }
        out.covered += cluster.size();
        out.clusters.push_back(std::move(cluster));
        out.picks.push_back(best);
    }
    return out;
}

}  // namespace detail

// Feasibility of one threshold in the greedy scheme. Coverage is not monotone
// in r (a larger ball can lure the argmax pick toward a locally denser point
// whose expanded ball strands someone), but every threshold at or above the
// best discrete-center radius is feasible. Exposed so that covering lemma can
// be tested directly.
inline bool charikar_feasible(const PointSet& p, std::size_t k, double gamma, double r) {
    const std::size_t n = p.size();
    std::vector<std::vector<double>> dist(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) dist[i][j] = distance(p[i], p[j]);
    return detail::greedy_cover(dist, k, r).covered >= inlier_count(n, gamma);
}

// Greedy k-center with outliers over the candidate thresholds (all pairwise
// distances plus zero, binary-searched; the best discrete-center radius is
// always realized at a pairwise distance). Feasibility is not monotone in r,
// but every candidate at or above that radius is feasible, so each range the
// search discards low sits strictly below it and the search always lands on a
// feasible threshold r no larger than it. Every cluster is built from a
// 3r-ball, so the radius certified against the discrete optimum carries the
// factor 3. Each cluster is then trimmed to exact coverage: the inlier count
// is met exactly by keeping the points nearest to their cluster's pick, so
// injected far contamination swept up by a generous 3r-ball is dropped again.
inline ClusterSet charikar_kcenter_outliers(const PointSet& p, std::size_t k, double gamma) {
    if (p.empty()) throw std::invalid_argument("charikar_kcenter_outliers: empty point set");
    if (k < 1) throw std::invalid_argument("charikar_kcenter_outliers: k must be >= 1");
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw std::invalid_argument("charikar_kcenter_outliers: gamma must lie in [0,1)");
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t n = p.size();
    const std::size_t m = inlier_count(n, gamma);

    std::vector<std::vector<double>> dist(n, std::vector<double>(n));
    std::vector<double> candidates{0.0};
    candidates.reserve(n * (n - 1) / 2 + 1);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            dist[i][j] = distance(p[i], p[j]);
            if (j > i) candidates.push_back(dist[i][j]);
        }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    // lands on a feasible candidate no larger than the best discrete radius
    std::size_t lo = 0, hi = candidates.size() - 1;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (detail::greedy_cover(dist, k, candidates[mid]).covered >= m)
            hi = mid;
        else
            lo = mid + 1;
    }
    const double r = candidates[lo];
    auto [clusters, picks, covered] = detail::greedy_cover(dist, k, r);
    if (covered < m) throw std::logic_error("charikar_kcenter_outliers: no feasible threshold");

    // exact-count trimming: drop the covered points farthest from their pick
    // until exactly m remain (the 3r sweep may have scooped up extras)
    if (covered > m) {
        struct Served {
            double d;
            std::size_t cluster, member;
        };
        std::vector<Served> served;
        for (std::size_t c = 0; c < clusters.size(); ++c) {
            const std::size_t pick = picks[c];
            for (const std::size_t j : clusters[c]) served.push_back({dist[pick][j], c, j});
        }
        std::sort(served.begin(), served.end(), [](const Served& a, const Served& b) {
            return a.d < b.d || (a.d == b.d && a.member < b.member);
        });
        served.resize(m);
        std::vector<std::vector<std::size_t>> trimmed(clusters.size());
        for (const Served& s : served) trimmed[s.cluster].push_back(s.member);
        for (auto& c : trimmed) std::sort(c.begin(), c.end());
        clusters = std::move(trimmed);
    }
    clusters.erase(std::remove_if(clusters.begin(), clusters.end(),
                                  [](const std::vector<std::size_t>& c) { return c.empty(); }),
                   clusters.end());

    ClusterSet out;
    out.clusters = std::move(clusters);
    out.radius = r;
    out.solver = "greedy-threshold";
    out.seconds = detail::seconds_since(t0);
    return out;
}

// Nearest-center assignment that keeps the inlier count: the floor(gamma n)
// points with the largest assignment distance are discarded (-1), and the
// radius is the largest distance that survives.
inline std::pair<std::vector<int>, double> assign_and_radius(const PointSet& p, const PointSet& centers,
                                                             double gamma) {
    if (centers.empty()) throw std::invalid_argument("assign_and_radius: no centers");
    if (p.dim() != centers.dim()) throw std::invalid_argument("assign_and_radius: dimension mismatch");
    const std::size_t n = p.size();
    const std::size_t m = inlier_count(n, gamma);
    std::vector<int> assignment(n, -1);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < centers.size(); ++c) {
            const double d = distance(p[i], centers[c]);
            if (d < best[i]) {
                best[i] = d;
                assignment[i] = static_cast<int>(c);
            }
        }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return best[a] < best[b] || (best[a] == best[b] && a < b); });
    double radius = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        if (t < m)
            radius = std::max(radius, best[order[t]]);
        else
            assignment[order[t]] = -1;
    }
    return {std::move(assignment), radius};
}

using KCenterBlackBox = std::function<ClusterSet(const PointSet&, std::size_t, double)>;

struct KCenterOptions {
    std::size_t d_tilde_override = 0;             // 0: target_dimension(n, eps)
    const ProjectionMap* map_override = nullptr;  // test hook; wins over everything else
    double jl_constant = 8.0;
};

// Full pipeline: reduce at the dimension the requested eps dictates, cluster
// down below, shrink each reduced cluster to an approximate MEB center with
// coefficients, lift the centers. The reported radius is measured in the
// original space over the black box's own clusters (the quantity the
// approximation chain bounds); a fresh nearest-center re-assignment is
// available separately through assign_and_radius.
inline KCenterResult solve_kcenter(const PointSet& p, std::size_t k, double gamma, double eps, Variant variant,
                                   std::uint64_t seed, const KCenterBlackBox& blackbox = {},
                                   const KCenterOptions& opts = {}) {
    if (p.empty()) throw std::invalid_argument("solve_kcenter: empty point set");
    if (k < 1) throw std::invalid_argument("solve_kcenter: k must be >= 1");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("solve_kcenter: eps must lie in (0,1)");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("solve_kcenter: gamma must lie in [0,1)");

    KCenterResult out;
    auto t0 = std::chrono::steady_clock::now();
    const ProjectionMap map = [&] {
        if (opts.map_override) {
            if (opts.map_override->input_dim() != p.dim())
                throw std::invalid_argument("solve_kcenter: map override does not match the input dimension");
            return *opts.map_override;
        }
        std::size_t dt = opts.d_tilde_override;
        if (dt == 0) dt = detail::clamped_target_dimension(p.size(), eps, p.dim(), opts.jl_constant);
        return ProjectionMap::make(variant, p.dim(), std::min(dt, p.dim()), seed);
    }();
    const PointSet fP = map.apply(p);
    out.timing.t_jl = detail::seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const ClusterSet cs = blackbox ? blackbox(fP, k, gamma) : charikar_kcenter_outliers(fP, k, gamma);
    out.timing.t_blackbox = detail::seconds_since(t0);

    // contract checks on the black box's clustering
    if (cs.clusters.empty() || cs.clusters.size() > k)
        throw std::invalid_argument("solve_kcenter: black box returned a wrong number of clusters");
    std::vector<bool> seen(p.size(), false);
    std::size_t covered = 0;
    for (const auto& cluster : cs.clusters)
        for (const std::size_t i : cluster) {
            if (i >= p.size() || seen[i])
                throw std::invalid_argument("solve_kcenter: black box clusters must be disjoint index sets");
            seen[i] = true;
            ++covered;
        }
    if (covered != inlier_count(p.size(), gamma))
        throw std::invalid_argument("solve_kcenter: black box covered the wrong number of points");

    t0 = std::chrono::steady_clock::now();
    out.assignment.assign(p.size(), -1);
    out.centers = PointSet(p.dim());
    out.reduced_centers = PointSet(fP.dim());
    double radius = 0.0;
    for (std::size_t c = 0; c < cs.clusters.size(); ++c) {
        const auto& cluster = cs.clusters[c];
        const SparseSolution meb = bc_meb(fP.subset(cluster), eps);
        const ConvexCombination comb = meb.comb.remapped(cluster);
        const Point center = recover(comb, p);
        for (const std::size_t i : cluster) {
            out.assignment[i] = static_cast<int>(c);
            radius = std::max(radius, distance(p[i], center));
        }
        out.centers.add_row(center);
        out.reduced_centers.add_row(meb.point);
        out.combs.push_back(comb);
    }
    out.timing.t_recover = detail::seconds_since(t0);

    out.radius = radius;
    out.descriptor = map.descriptor();
    out.blackbox_name = cs.solver;
    return out;
}

}  // namespace jlrobust
