#pragma once

// Margin maximization with outliers, one-class and two-class, via dimension
// reduction. The pipeline is: map the points down, let a pluggable black box
// pick a direction there, re-select the inlier set along that direction,
// sparsify the trimmed hull point, and carry its coefficients back up to the
// original space. The recovered direction is a convex combination of original
// input points (difference of two combinations in the two-class case), so its
// image under the map is exactly the reduced-space solution.

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

namespace jlrobust {

// Raised when a pipeline cannot certify separation: the trimmed reduced hull
// contains the origin (one-class) or the trimmed hulls overlap (two-class).
class NonSeparableError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

// A black box's answer: a nonzero normal vector in the reduced space. The
// approximation factor of the solver that produced it is not verified here.
struct BlackBoxDirection {
    Point v;
    std::string solver;
    double seconds = 0.0;
};

struct PipelineTiming {
    double t_jl = 0.0;        // build the map and push the points through it
    double t_blackbox = 0.0;  // the pluggable solver on the reduced instance
    double t_recover = 0.0;   // re-select, sparsify, lift the coefficients
};

struct MarginResult {
    Point direction;   // recovered solution in the original space, unnormalized
    double width = 0.0;
    std::vector<std::size_t> inliers;         // one-class set, or class-1 set
    std::vector<std::size_t> inliers_second;  // class-2 set (two-class only)
    ConvexCombination comb;                   // over original indices (class 1)
    ConvexCombination comb_second;            // class 2 (two-class only)
    Point reduced_solution;                   // the hull point found down below
    ProjectionDescriptor descriptor;
    PipelineTiming timing;
    std::string blackbox_name;
};

// eps that Theorem-style margin preservation demands for a given eps0, where
// e = D^2 / rho^2 measures how wide the instance is relative to its margin.
inline double theorem_epsilon(double eps0, double e) {
    if (!(eps0 > 0.0 && eps0 < 1.0)) throw std::invalid_argument("theorem_epsilon: eps0 must lie in (0,1)");
    if (!(e >= 0.0)) throw std::invalid_argument("theorem_epsilon: condition number must be nonnegative");
    return eps0 / (5.0 * (e + 1.0));
}

// Indices of the ceil((1-gamma) n) points with the largest signed projection
// onto v; ties go to the lower index. Returned sorted ascending.
inline std::vector<std::size_t> select_inliers_one_class(const PointSet& fP, const Point& v, double gamma) {
    if (fP.empty()) throw std::invalid_argument("select_inliers_one_class: empty point set");
    if (fP.dim() != v.size()) throw std::invalid_argument("select_inliers_one_class: dimension mismatch");
    if (!(norm(v) > 0.0)) throw std::invalid_argument("select_inliers_one_class: direction must be nonzero");
    const std::size_t m = inlier_count(fP.size(), gamma);
    std::vector<double> proj(fP.size());
    for (std::size_t i = 0; i < fP.size(); ++i) proj[i] = dot(fP[i], v);
    std::vector<std::size_t> idx(fP.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(m), idx.end(),
                      [&](std::size_t a, std::size_t b) { return proj[a] > proj[b] || (proj[a] == proj[b] && a < b); });
    idx.resize(m);
    std::sort(idx.begin(), idx.end());
    return idx;
}

// Two-sided selection: class 1 keeps its largest projections along v, class 2
// its most negative ones (class 1 lives on the positive side by convention).
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> select_inliers_two_class(
    const PointSet& fP1, const PointSet& fP2, const Point& v, double gamma1, double gamma2) {
    if (fP1.dim() != fP2.dim()) throw std::invalid_argument("select_inliers_two_class: dimension mismatch");
    std::vector<std::size_t> s1 = select_inliers_one_class(fP1, v, gamma1);
    Point flipped = v;
    for (double& x : flipped) x = -x;
    std::vector<std::size_t> s2 = select_inliers_one_class(fP2, flipped, gamma2);
    return {std::move(s1), std::move(s2)};
}

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Bounded-effort Gilbert passes: when the iteration cap trips, the best
// iterate so far is still a usable (if weaker) hull point.
inline SparseSolution gilbert_capped(const PointSet& s, double eps0, std::size_t cap) {
    try {
        return gilbert(s, eps0, cap);
    } catch (const IterationLimitError& e) {
        return e.best;
    }
}

inline MinkowskiSolution minkowski_capped(const PointSet& q1, const PointSet& q2, double eps0, std::size_t cap) {
    try {
        return gilbert_minkowski(q1, q2, eps0, cap);
    } catch (const MinkowskiIterationLimitError& e) {
        return e.best;
    }
}

// Sample floor(count) index pairs (i != j) and return the max distance seen.
inline double sampled_diameter(const PointSet& s, std::size_t count, SplitRng& rng) {
    if (s.size() < 2) return 0.0;
    double best = 0.0;
    for (std::size_t t = 0; t < count; ++t) {
        const std::size_t i = static_cast<std::size_t>(rng.below(s.size()));
        std::size_t j = static_cast<std::size_t>(rng.below(s.size() - 1));
        if (j >= i) ++j;
        best = std::max(best, squared_distance(s[i], s[j]));
    }
    return std::sqrt(best);
}

inline std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t cap, SplitRng& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (n <= cap) return idx;
    for (std::size_t t = 0; t < cap; ++t) {
        const std::size_t j = t + static_cast<std::size_t>(rng.below(n - t));
        std::swap(idx[t], idx[j]);
    }
    idx.resize(cap);
    std::sort(idx.begin(), idx.end());
    return idx;
}

// Estimate e = D^2 / rho^2 before any map exists. D comes from a 2n-pair
// sample of the diameter (an underestimate is possible and only costs target
// dimension, never recovery correctness). rho comes from a cheap eps=0.5
// Gilbert pass on a subsample: one pass to orient the trim, a second on the
// trimmed subsample for the estimate itself. Non-separable readings yield
// +infinity, which callers translate into "do not reduce at all".
inline double estimate_condition_one_class(const PointSet& p, double gamma, std::uint64_t seed) {
    SplitRng rng = SplitRng(seed).split(0x65737431ull);
    const double dia = sampled_diameter(p, 2 * p.size(), rng);
    const PointSet sub = p.subset(subsample_indices(p.size(), 256, rng));
    const SparseSolution pass1 = gilbert_capped(sub, 0.5, 512);
    if (pass1.zero_distance) return std::numeric_limits<double>::infinity();
    const PointSet trimmed = sub.subset(select_inliers_one_class(sub, pass1.point, gamma));
    const SparseSolution pass2 = gilbert_capped(trimmed, 0.5, 512);
    const double rho = pass2.zero_distance ? 0.0 : norm(pass2.point);
    if (!(rho > 1e-12)) return std::numeric_limits<double>::infinity();
    return (dia * dia) / (rho * rho);
}

inline double estimate_condition_two_class(const PointSet& p1, const PointSet& p2, double gamma1, double gamma2,
                                           std::uint64_t seed) {
    SplitRng rng = SplitRng(seed).split(0x65737432ull);
    PointSet all(p1.dim());
    for (std::size_t i = 0; i < p1.size(); ++i) all.add_row(p1[i]);
    for (std::size_t i = 0; i < p2.size(); ++i) all.add_row(p2[i]);
    const double dia = sampled_diameter(all, 2 * all.size(), rng);
    const PointSet sub1 = p1.subset(subsample_indices(p1.size(), 128, rng));
    const PointSet sub2 = p2.subset(subsample_indices(p2.size(), 128, rng));
    const MinkowskiSolution pass1 = minkowski_capped(sub1, sub2, 0.5, 512);
    if (pass1.zero_distance) return std::numeric_limits<double>::infinity();
    const auto [s1, s2] = select_inliers_two_class(sub1, sub2, pass1.point, gamma1, gamma2);
    const MinkowskiSolution pass2 = minkowski_capped(sub1.subset(s1), sub2.subset(s2), 0.5, 512);
    const double rho = pass2.zero_distance ? 0.0 : norm(pass2.point);
    if (!(rho > 1e-12)) return std::numeric_limits<double>::infinity();
    return (dia * dia) / (rho * rho);
}

// Reduced dimension for a requested distortion, saturated at the input
// dimension (reducing "up" would be meaningless) and floored at 1. eps = 0 or
// non-finite condition estimates land on d: no reduction.
inline std::size_t clamped_target_dimension(std::size_t n, double eps, std::size_t d, double c) {
    if (!(eps > 0.0) || !std::isfinite(eps)) return d;
    const double raw = std::ceil(c * std::log(static_cast<double>(std::max<std::size_t>(n, 2))) / (eps * eps));
    if (!(raw < static_cast<double>(d))) return d;
    return std::max<std::size_t>(1, static_cast<std::size_t>(raw));
}

inline void check_direction(const BlackBoxDirection& dir, std::size_t want_dim) {
    if (dir.v.size() != want_dim) throw std::invalid_argument("black box returned a direction of wrong dimension");
    require_finite(dir.v, "black box direction");
    if (!(norm(dir.v) > 0.0)) throw std::invalid_argument("black box returned a zero direction");
}

}  // namespace detail

namespace detail {

// Margin a direction realizes on its own trimmed selection: the m-th largest
// projection. Positive means the direction separates a full inlier set.
inline double trimmed_margin_one_class(const PointSet& fP, const Point& v, double gamma) {
    double w = std::numeric_limits<double>::infinity();
    for (const std::size_t i : select_inliers_one_class(fP, v, gamma))
        w = std::min(w, projection_distance(fP[i], v));
    return w;
}

inline double trimmed_margin_two_class(const PointSet& fP1, const PointSet& fP2, const Point& v, double gamma1,
                                       double gamma2) {
    const auto [s1, s2] = select_inliers_two_class(fP1, fP2, v, gamma1, gamma2);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const std::size_t i : s1) lo = std::min(lo, projection_distance(fP1[i], v));
    for (const std::size_t j : s2) hi = std::max(hi, projection_distance(fP2[j], v));
    return lo - hi;
}

}  // namespace detail

// Alternating trimming heuristic, the default stand-in for an external robust
// SVM solver. No approximation factor is proven for it; it only promises a
// nonzero direction or an explicit failure. Each round runs a capped Gilbert
// pass on the current inlier set and re-selects inliers along the returned
// direction until the set stabilizes or the round budget runs out. When the
// hull direction fails to separate a full inlier set (its trimmed margin is
// not positive, e.g. contamination drags the hull over the origin), the round
// tries the centroid direction instead and keeps whichever scores higher; on
// separable rounds the hull direction always wins, so with gamma = 0 the
// whole call collapses to a single Gilbert pass.
inline BlackBoxDirection default_blackbox_one_class(const PointSet& fP, double gamma, double eps0,
                                                    std::size_t rounds = 5) {
    if (rounds < 1) throw std::invalid_argument("default_blackbox_one_class: rounds must be >= 1");
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::size_t> s(fP.size());
    std::iota(s.begin(), s.end(), std::size_t{0});
    Point v;
    bool have = false;
    for (std::size_t r = 0; r < rounds; ++r) {
        const PointSet sub = fP.subset(s);
        const SparseSolution sol = detail::gilbert_capped(sub, eps0, 2000);
        Point cand;
        double score = -std::numeric_limits<double>::infinity();
        if (!sol.zero_distance) {
            cand = sol.point;
            score = detail::trimmed_margin_one_class(fP, cand, gamma);
        }
        if (!(score > 0.0)) {
            Point fallback = centroid(sub);
            if (norm(fallback) > 1e-12 && detail::trimmed_margin_one_class(fP, fallback, gamma) > score)
                cand = std::move(fallback);
        }
        if (cand.empty()) {
            if (have) break;  // keep the previous round's direction
            throw NonSeparableError("default_blackbox_one_class: origin inside the hull and no usable direction");
        }
        v = std::move(cand);
        have = true;
        std::vector<std::size_t> next = select_inliers_one_class(fP, v, gamma);
        if (next == s) break;
        s = std::move(next);
    }
    return {std::move(v), "alternating-trim", detail::seconds_since(t0)};
}

inline BlackBoxDirection default_blackbox_two_class(const PointSet& fP1, const PointSet& fP2, double gamma1,
                                                    double gamma2, double eps0, std::size_t rounds = 5) {
    if (rounds < 1) throw std::invalid_argument("default_blackbox_two_class: rounds must be >= 1");
    if (fP1.dim() != fP2.dim()) throw std::invalid_argument("default_blackbox_two_class: dimension mismatch");
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::size_t> s1(fP1.size()), s2(fP2.size());
    std::iota(s1.begin(), s1.end(), std::size_t{0});
    std::iota(s2.begin(), s2.end(), std::size_t{0});
    Point v;
    bool have = false;
    for (std::size_t r = 0; r < rounds; ++r) {
        const PointSet sub1 = fP1.subset(s1), sub2 = fP2.subset(s2);
        const MinkowskiSolution sol = detail::minkowski_capped(sub1, sub2, eps0, 2000);
        Point cand;
        double score = -std::numeric_limits<double>::infinity();
        if (!sol.zero_distance) {
            cand = sol.point;
            score = detail::trimmed_margin_two_class(fP1, fP2, cand, gamma1, gamma2);
        }
        if (!(score > 0.0)) {
            // overlapping or mis-oriented: aim from class-2 mass toward class-1 mass
            const Point c1 = centroid(sub1), c2 = centroid(sub2);
            Point fallback(fP1.dim());
            for (std::size_t t = 0; t < fallback.size(); ++t) fallback[t] = c1[t] - c2[t];
            if (norm(fallback) > 1e-12 && detail::trimmed_margin_two_class(fP1, fP2, fallback, gamma1, gamma2) > score)
                cand = std::move(fallback);
        }
        if (cand.empty()) {
            if (have) break;
            throw NonSeparableError("default_blackbox_two_class: hulls overlap and no usable direction");
        }
        v = std::move(cand);
        have = true;
        auto [next1, next2] = select_inliers_two_class(fP1, fP2, v, gamma1, gamma2);
        if (next1 == s1 && next2 == s2) break;
        s1 = std::move(next1);
        s2 = std::move(next2);
    }
    return {std::move(v), "alternating-trim", detail::seconds_since(t0)};
}

using OneClassBlackBox = std::function<BlackBoxDirection(const PointSet&, double)>;
using TwoClassBlackBox = std::function<BlackBoxDirection(const PointSet&, const PointSet&, double, double)>;

struct SvmOptions {
    std::size_t d_tilde_override = 0;             // 0: derive from the condition estimate
    const ProjectionMap* map_override = nullptr;  // test hook; wins over everything else
    std::size_t blackbox_rounds = 5;              // rounds for the default solvers
    double jl_constant = 8.0;                     // c in ceil(c ln n / eps^2)
};

namespace detail {

inline ProjectionMap build_margin_map(std::size_t n, std::size_t d, double gamma_e, Variant variant,
                                      std::uint64_t seed, const SvmOptions& opts, double eps0, bool two_class,
                                      const PointSet& p1, const PointSet* p2, double gamma2) {
    if (opts.map_override) {
        if (opts.map_override->input_dim() != d)
            throw std::invalid_argument("map override does not match the input dimension");
        return *opts.map_override;
    }
    std::size_t dt = opts.d_tilde_override;
    if (dt == 0) {
        const double e = two_class ? estimate_condition_two_class(p1, *p2, gamma_e, gamma2, seed)
                                   : estimate_condition_one_class(p1, gamma_e, seed);
        const double eps = std::isfinite(e) ? theorem_epsilon(eps0, e) : 0.0;
        dt = clamped_target_dimension(n, eps, d, opts.jl_constant);
    }
    dt = std::min(dt, d);
    return ProjectionMap::make(variant, d, dt, seed);
}

}  // namespace detail

// One-class pipeline: reduce, ask the black box for a direction, keep the
// ceil((1-gamma) n) points it separates best, sparsify their reduced hull
// point at quality eps0, and lift the coefficients. Width is measured in the
// original space: the smallest projection of a declared inlier onto the
// recovered direction. A positive width certifies separation there.
inline MarginResult solve_one_class(const PointSet& p, double gamma, double eps0, Variant variant, std::uint64_t seed,
                                    const OneClassBlackBox& blackbox = {}, const SvmOptions& opts = {}) {
    if (p.empty()) throw std::invalid_argument("solve_one_class: empty point set");
    if (!(eps0 > 0.0 && eps0 < 1.0)) throw std::invalid_argument("solve_one_class: eps0 must lie in (0,1)");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("solve_one_class: gamma must lie in [0,1)");

    MarginResult out;
    auto t0 = std::chrono::steady_clock::now();
    const ProjectionMap map =
        detail::build_margin_map(p.size(), p.dim(), gamma, variant, seed, opts, eps0, false, p, nullptr, 0.0);
    const PointSet fP = map.apply(p);
    out.timing.t_jl = detail::seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const BlackBoxDirection dir =
        blackbox ? blackbox(fP, gamma) : default_blackbox_one_class(fP, gamma, eps0, opts.blackbox_rounds);
    detail::check_direction(dir, fP.dim());
    out.timing.t_blackbox = detail::seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    out.inliers = select_inliers_one_class(fP, dir.v, gamma);
    const SparseSolution sol = gilbert(fP.subset(out.inliers), eps0);
    if (sol.zero_distance)
        throw NonSeparableError("solve_one_class: trimmed reduced hull contains the origin (inliers not separable)");
    out.comb = sol.comb.remapped(out.inliers);
    out.direction = recover(out.comb, p);
    double width = std::numeric_limits<double>::infinity();
    for (const std::size_t i : out.inliers) width = std::min(width, projection_distance(p[i], out.direction));
    out.timing.t_recover = detail::seconds_since(t0);

    out.width = width;
    out.reduced_solution = sol.point;
    out.descriptor = map.descriptor();
    out.blackbox_name = dir.solver;
    return out;
}

// Two-class pipeline: identical shape, with the implicit Minkowski-difference
// Gilbert pass in the sparsification step. The recovered direction is the
// difference of one convex combination per class, and the width is the gap
// between the two classes' projections in the original space.
inline MarginResult solve_two_class(const PointSet& p1, const PointSet& p2, double gamma1, double gamma2, double eps0,
                                    Variant variant, std::uint64_t seed, const TwoClassBlackBox& blackbox = {},
                                    const SvmOptions& opts = {}) {
    if (p1.empty() || p2.empty()) throw std::invalid_argument("solve_two_class: empty class");
    if (p1.dim() != p2.dim()) throw std::invalid_argument("solve_two_class: dimension mismatch");
    if (!(eps0 > 0.0 && eps0 < 1.0)) throw std::invalid_argument("solve_two_class: eps0 must lie in (0,1)");
    if (!(gamma1 >= 0.0 && gamma1 < 1.0) || !(gamma2 >= 0.0 && gamma2 < 1.0))
        throw std::invalid_argument("solve_two_class: gammas must lie in [0,1)");

    MarginResult out;
    auto t0 = std::chrono::steady_clock::now();
    const ProjectionMap map = detail::build_margin_map(p1.size() + p2.size(), p1.dim(), gamma1, variant, seed, opts,
                                                       eps0, true, p1, &p2, gamma2);
    const PointSet fP1 = map.apply(p1), fP2 = map.apply(p2);
    out.timing.t_jl = detail::seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const BlackBoxDirection dir = blackbox ? blackbox(fP1, fP2, gamma1, gamma2)
                                           : default_blackbox_two_class(fP1, fP2, gamma1, gamma2, eps0,
                                                                        opts.blackbox_rounds);
    detail::check_direction(dir, fP1.dim());
    out.timing.t_blackbox = detail::seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    auto [s1, s2] = select_inliers_two_class(fP1, fP2, dir.v, gamma1, gamma2);
    const MinkowskiSolution sol = gilbert_minkowski(fP1.subset(s1), fP2.subset(s2), eps0);
    if (sol.zero_distance)
        throw NonSeparableError("solve_two_class: trimmed reduced hulls overlap (inliers not separable)");
    out.inliers = std::move(s1);
    out.inliers_second = std::move(s2);
    out.comb = sol.comb_first.remapped(out.inliers);
    out.comb_second = sol.comb_second.remapped(out.inliers_second);
    const Point a = recover(out.comb, p1), b = recover(out.comb_second, p2);
    out.direction.resize(p1.dim());
    for (std::size_t t = 0; t < out.direction.size(); ++t) out.direction[t] = a[t] - b[t];
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const std::size_t i : out.inliers) lo = std::min(lo, projection_distance(p1[i], out.direction));
    for (const std::size_t j : out.inliers_second) hi = std::max(hi, projection_distance(p2[j], out.direction));
    out.timing.t_recover = detail::seconds_since(t0);

    out.width = lo - hi;
    out.reduced_solution = sol.point;
    out.descriptor = map.descriptor();
    out.blackbox_name = dir.solver;
    return out;
}

}  // namespace jlrobust
