#pragma once

// Iterative convex-hull solvers that report their answer as a sparse convex
// combination of input points:
//   gilbert            - distance from the origin to conv(S)
//   gilbert_minkowski  - distance between conv(Q1) and conv(Q2), run on the
//                        difference set without materializing it
//   bc_meb             - (1+eps)-approximate minimum enclosing ball via
//                        farthest-point insertion over a small coreset
// Tracking the combination costs one scalar update per touched point and is
// what makes answers liftable back through a linear map.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "jlrobust/combination.hpp"
#include "jlrobust/geometry.hpp"

namespace jlrobust {

// Signed length of p's projection onto the direction of v.
inline double projection_distance(std::span<const double> p, std::span<const double> v) {
    const double nv = norm(v);
    if (nv == 0.0) throw std::invalid_argument("projection_distance: zero direction");
    return dot(p, v) / nv;
}

// True when v is an eps-approximation of the polytope distance of S:
// |v| <= (1/(1-eps)) * min_p projection of p onto v.
inline bool epsilon_approx_check(const PointSet& s, std::span<const double> v, double eps) {
    if (s.empty()) throw std::invalid_argument("epsilon_approx_check: empty set");
    if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("epsilon_approx_check: eps must lie in [0,1)");
    double minp = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.size(); ++i) minp = std::min(minp, projection_distance(s[i], v));
    return norm(v) * (1.0 - eps) <= minp;
}

struct SparseSolution {
    Point point;                             // the iterate the solver stopped at
    ConvexCombination comb;                  // point as a combination of input rows
    std::size_t iterations = 0;
    bool zero_distance = false;              // origin found inside the hull
    std::vector<double> norm_history;        // |v_i| per iteration (radii for bc_meb)
    std::vector<std::size_t> pick_history;   // chosen input index per iteration
};

struct MinkowskiSolution {
    Point point;                             // difference vector between the two hulls
    ConvexCombination comb_first;            // closest point on conv(Q1)
    ConvexCombination comb_second;           // closest point on conv(Q2)
    std::size_t iterations = 0;
    bool zero_distance = false;              // hulls overlap
    std::vector<double> norm_history;
    std::vector<std::size_t> pick_first;     // chosen Q1 index per iteration
    std::vector<std::size_t> pick_second;    // chosen Q2 index per iteration
};

struct IterationLimitError : std::runtime_error {
    SparseSolution best;
    IterationLimitError(const std::string& msg, SparseSolution b) : std::runtime_error(msg), best(std::move(b)) {}
};

struct MinkowskiIterationLimitError : std::runtime_error {
    MinkowskiSolution best;
    MinkowskiIterationLimitError(const std::string& msg, MinkowskiSolution b)
        : std::runtime_error(msg), best(std::move(b)) {}
};

namespace detail {

// Iterations allowed at the current iterate when no explicit budget is
// given: ten times the provable requirement 2*ceil(2E/eps) with
// E = diam_bound^2 / |v|^2. |v| only shrinks, so the allowance grows toward
// its final value and cannot cut off a run that is still making progress.
inline std::size_t auto_iteration_allowance(double diam_bound, double v_norm, double eps) {
    const double e = (diam_bound * diam_bound) / (v_norm * v_norm);
    const double steps = 10.0 * 2.0 * std::ceil(2.0 * e / eps);
    if (!(steps < 9e18)) return std::numeric_limits<std::size_t>::max();
    return static_cast<std::size_t>(steps);
}

inline ConvexCombination gather_weights(const std::vector<double>& w) {
    ConvexCombination c;
    for (std::size_t i = 0; i < w.size(); ++i)
        if (w[i] > 0.0) {
            c.indices.push_back(i);
            c.weights.push_back(w[i]);
        }
    return c;
}

}  // namespace detail

// Distance from the origin to conv(S), to relative accuracy eps0.
// Starts at the closest input point and repeatedly moves to the closest
// point on the segment toward the input point of least projection; stops as
// soon as the iterate passes epsilon_approx_check. Ties in any argmin go to
// the lowest index. A vanishing iterate (|v| <= 1e-12) is reported as
// zero_distance: the origin lies in the hull. max_iter == 0 grows a budget
// from the running iterate (see auto_iteration_allowance); exceeding the
// budget throws IterationLimitError carrying the best iterate so far.
inline SparseSolution gilbert(const PointSet& s, double eps0, std::size_t max_iter = 0) {
    if (s.empty()) throw std::invalid_argument("gilbert: empty point set");
    if (!(eps0 > 0.0 && eps0 < 1.0)) throw std::invalid_argument("gilbert: eps0 must lie in (0,1)");
    const std::size_t n = s.size(), dim = s.dim();

    std::size_t first = 0;
    double best = squared_norm(s[0]);
    for (std::size_t i = 1; i < n; ++i) {
        const double q = squared_norm(s[i]);
        if (q < best) {
            best = q;
            first = i;
        }
    }

    SparseSolution sol;
    Point v(s[first].begin(), s[first].end());
    std::vector<double> w(n, 0.0);
    w[first] = 1.0;
    sol.pick_history.push_back(first);

    double diam_bound = 0.0;
    for (std::size_t i = 0; i < n; ++i) diam_bound = std::max(diam_bound, squared_distance(s[i], v));
    diam_bound = 2.0 * std::sqrt(diam_bound);

    for (std::size_t iter = 1;; ++iter) {
        const double nv = norm(v);
        sol.norm_history.push_back(nv);
        sol.iterations = iter;
        if (nv <= 1e-12) {
            sol.zero_distance = true;
            break;
        }

        double minp = std::numeric_limits<double>::infinity();
        std::size_t pick = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double proj = dot(s[i], v) / nv;
            if (proj < minp) {
                minp = proj;
                pick = i;
            }
        }
        if (nv * (1.0 - eps0) <= minp) break;  // eps0-approximation reached

        const std::size_t allowance =
            max_iter > 0 ? max_iter : detail::auto_iteration_allowance(diam_bound, nv, eps0);
        if (iter >= allowance) {
            sol.point = std::move(v);
            sol.comb = detail::gather_weights(w);
            throw IterationLimitError("gilbert: iteration budget " + std::to_string(allowance) +
                                          " exhausted at |v| = " + std::to_string(nv),
                                      std::move(sol));
        }

        const auto p = s[pick];
        double vmp2 = 0.0, vdotvmp = 0.0;
        for (std::size_t t = 0; t < dim; ++t) {
            const double diff = v[t] - p[t];
            vmp2 += diff * diff;
            vdotvmp += v[t] * diff;
        }
        if (vmp2 == 0.0) break;  // argmin equals the iterate; nothing can improve
        const double tstep = std::clamp(vdotvmp / vmp2, 0.0, 1.0);
        for (std::size_t t = 0; t < dim; ++t) v[t] = (1.0 - tstep) * v[t] + tstep * p[t];
        for (double& x : w) x *= (1.0 - tstep);
        w[pick] += tstep;
        sol.pick_history.push_back(pick);
    }

    sol.point = std::move(v);
    sol.comb = detail::gather_weights(w);
    return sol;
}

// Distance between conv(Q1) and conv(Q2): Gilbert on the difference set
// {q - q' : q in Q1, q' in Q2}, kept implicit. Each iteration selects the
// least-projecting difference by combining the least-projecting point of Q1
// with the most-projecting point of Q2, so the per-iteration cost is linear
// in |Q1| + |Q2|. Initialization scans all pairs for the shortest difference
// (the same starting point an explicit difference set would give); that scan
// is the one quadratic step. Tie-breaks are lexicographic, matching
// lowest-index tie-breaking on a row-major materialized difference set.
inline MinkowskiSolution gilbert_minkowski(const PointSet& q1, const PointSet& q2, double eps0,
                                           std::size_t max_iter = 0) {
    if (q1.empty() || q2.empty()) throw std::invalid_argument("gilbert_minkowski: empty point set");
    if (q1.dim() != q2.dim()) throw std::invalid_argument("gilbert_minkowski: dimension mismatch");
    if (!(eps0 > 0.0 && eps0 < 1.0))
        throw std::invalid_argument("gilbert_minkowski: eps0 must lie in (0,1)");
    const std::size_t n1 = q1.size(), n2 = q2.size(), dim = q1.dim();

    std::size_t fi = 0, fj = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n2; ++j) {
            double sq = 0.0;
            const auto a = q1[i], b = q2[j];
            for (std::size_t t = 0; t < dim; ++t) {
                const double diff = a[t] - b[t];
                sq += diff * diff;
            }
            if (sq < best) {
                best = sq;
                fi = i;
                fj = j;
            }
        }

    MinkowskiSolution sol;
    Point v(dim);
    {
        const auto a = q1[fi], b = q2[fj];
        for (std::size_t t = 0; t < dim; ++t) v[t] = a[t] - b[t];
    }
    std::vector<double> w1(n1, 0.0), w2(n2, 0.0);
    w1[fi] = 1.0;
    w2[fj] = 1.0;
    sol.pick_first.push_back(fi);
    sol.pick_second.push_back(fj);

    double diam_bound = 0.0;
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n2; ++j) {
            double sq = 0.0;
            const auto a = q1[i], b = q2[j];
            for (std::size_t t = 0; t < dim; ++t) {
                const double diff = (a[t] - b[t]) - v[t];
                sq += diff * diff;
            }
            diam_bound = std::max(diam_bound, sq);
        }
    diam_bound = 2.0 * std::sqrt(diam_bound);

    std::vector<double> p(dim);
    for (std::size_t iter = 1;; ++iter) {
        const double nv = norm(v);
        sol.norm_history.push_back(nv);
        sol.iterations = iter;
        if (nv <= 1e-12) {
            sol.zero_distance = true;
            break;
        }

        double min1 = std::numeric_limits<double>::infinity();
        double max2 = -std::numeric_limits<double>::infinity();
        std::size_t pick1 = 0, pick2 = 0;
        for (std::size_t i = 0; i < n1; ++i) {
            const double proj = dot(q1[i], v) / nv;
            if (proj < min1) {
                min1 = proj;
                pick1 = i;
            }
        }
        for (std::size_t j = 0; j < n2; ++j) {
            const double proj = dot(q2[j], v) / nv;
            if (proj > max2) {
                max2 = proj;
                pick2 = j;
            }
        }
        const double minp = min1 - max2;
        if (nv * (1.0 - eps0) <= minp) break;

        const std::size_t allowance =
            max_iter > 0 ? max_iter : detail::auto_iteration_allowance(diam_bound, nv, eps0);
        if (iter >= allowance) {
            sol.point = std::move(v);
            sol.comb_first = detail::gather_weights(w1);
            sol.comb_second = detail::gather_weights(w2);
            throw MinkowskiIterationLimitError("gilbert_minkowski: iteration budget " +
                                                   std::to_string(allowance) + " exhausted at |v| = " +
                                                   std::to_string(nv),
                                               std::move(sol));
        }

        const auto a = q1[pick1], b = q2[pick2];
        for (std::size_t t = 0; t < dim; ++t) p[t] = a[t] - b[t];
        double vmp2 = 0.0, vdotvmp = 0.0;
        for (std::size_t t = 0; t < dim; ++t) {
            const double diff = v[t] - p[t];
            vmp2 += diff * diff;
            vdotvmp += v[t] * diff;
        }
        if (vmp2 == 0.0) break;
        const double tstep = std::clamp(vdotvmp / vmp2, 0.0, 1.0);
        for (std::size_t t = 0; t < dim; ++t) v[t] = (1.0 - tstep) * v[t] + tstep * p[t];
        for (double& x : w1) x *= (1.0 - tstep);
        for (double& x : w2) x *= (1.0 - tstep);
        w1[pick1] += tstep;
        w2[pick2] += tstep;
        sol.pick_first.push_back(pick1);
        sol.pick_second.push_back(pick2);
    }

    sol.point = std::move(v);
    sol.comb_first = detail::gather_weights(w1);
    sol.comb_second = detail::gather_weights(w2);
    return sol;
}

namespace detail {

struct SmallMeb {
    Point center;
    double radius = 0.0;              // covering radius of the given points
    std::vector<std::size_t> support;  // local indices
    std::vector<double> coeffs;
};

// MEB of a coreset-sized set. Delegates to the exact recursive solver only
// where that recursion is tractable: low ambient dimension, or so few points
// that even an all-support ball is cheap. Everywhere else (many points in
// high dimension, where farthest-point coresets are nearly cospherical and
// the recursion can visit exponentially many bases) it maximizes the dual
// with away steps inside the points' affine hull. The gap contracts
// linearly, so the loop reaches round-off precision long before its cap.
inline SmallMeb small_meb(const PointSet& pts) {
    SmallMeb out;
    if (pts.dim() <= 10 || pts.size() <= 12) {
        MebResult m = exact_meb(pts);
        out.center = std::move(m.center);
        out.radius = m.radius;
        out.support = std::move(m.support);
        out.coeffs = std::move(m.coeffs);
        return out;
    }
    const std::size_t m = pts.size();
    const std::size_t d = pts.dim();

    // orthonormal basis of span{p_i - p_0}; the center lives in that hull.
    // Two projection passes keep the basis orthogonal to round-off.
    double scale2 = 0.0;
    for (std::size_t i = 1; i < m; ++i) scale2 = std::max(scale2, squared_distance(pts[i], pts[0]));
    std::vector<Point> basis;
    for (std::size_t i = 1; i < m; ++i) {
        Point v(pts[i].begin(), pts[i].end());
        for (std::size_t t = 0; t < d; ++t) v[t] -= pts[0][t];
        for (int pass = 0; pass < 2; ++pass)
            for (const Point& b : basis) {
                double dot = 0.0;
                for (std::size_t t = 0; t < d; ++t) dot += v[t] * b[t];
                for (std::size_t t = 0; t < d; ++t) v[t] -= dot * b[t];
            }
        double nn = 0.0;
        for (const double x : v) nn += x * x;
        if (nn > 1e-24 * scale2) {
            const double inv = 1.0 / std::sqrt(nn);
            for (double& x : v) x *= inv;
            basis.push_back(std::move(v));
        }
    }
    const std::size_t mhat = basis.size();
    std::vector<Point> q(m);
    for (std::size_t i = 0; i < m; ++i) {
        q[i].assign(mhat, 0.0);
        for (std::size_t j = 0; j < mhat; ++j) {
            double dot = 0.0;
            for (std::size_t t = 0; t < d; ++t) dot += (pts[i][t] - pts[0][t]) * basis[j][t];
            q[i][j] = dot;
        }
    }

    // maximize sum(lam_i |q_i|^2) - |sum(lam_i q_i)|^2 over the simplex:
    // the toward vertex is the farthest point, the away vertex the closest
    // supported one, and both line searches are exact on the quadratic
    std::vector<double> lam(m, 0.0);
    lam[0] = 1.0;
    Point c(mhat, 0.0);
    std::vector<double> d2(m);
    for (std::size_t it = 0; it < 20000; ++it) {
        std::size_t far = 0, near = m;
        double avg = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < mhat; ++j) {
                const double dd = q[i][j] - c[j];
                s += dd * dd;
            }
            d2[i] = s;
            if (s > d2[far]) far = i;
            avg += lam[i] * s;
            if (lam[i] > 0.0 && (near == m || s < d2[near])) near = i;
        }
        const double fw_gap = d2[far] - avg;
        if (!(fw_gap > 1e-13 * d2[far])) break;
        const double away_gap = avg - d2[near];
        if (fw_gap >= away_gap || lam[near] >= 1.0) {
            double t = d2[far] > 0.0 ? fw_gap / (2.0 * d2[far]) : 1.0;
            t = std::min(t, 1.0);
            for (double& x : lam) x *= (1.0 - t);
            lam[far] += t;
            for (std::size_t j = 0; j < mhat; ++j) c[j] += t * (q[far][j] - c[j]);
        } else {
            const double tmax = lam[near] / (1.0 - lam[near]);
            double t = d2[near] > 0.0 ? away_gap / (2.0 * d2[near]) : tmax;
            const bool drop = !(t < tmax);
            if (drop) t = tmax;
            for (double& x : lam) x *= (1.0 + t);
            lam[near] = drop ? 0.0 : lam[near] - t;
            for (std::size_t j = 0; j < mhat; ++j) c[j] += t * (c[j] - q[near][j]);
        }
    }

    out.center.assign(pts[0].begin(), pts[0].end());
    for (std::size_t j = 0; j < mhat; ++j)
        for (std::size_t t = 0; t < d; ++t) out.center[t] += c[j] * basis[j][t];
    double r2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) r2 = std::max(r2, squared_distance(out.center, pts[i]));
    out.radius = std::sqrt(r2);
    for (double& x : lam)
        if (x < 0.0) x = 0.0;
    ConvexCombination comb = gather_weights(lam);
    out.support = std::move(comb.indices);
    out.coeffs = std::move(comb.weights);
    return out;
}

}  // namespace detail

// (1+eps)-approximate minimum enclosing ball. Runs ceil(2/eps) iterations;
// each computes the exact center of the current coreset T and inserts the
// point of S farthest from it (lowest index on ties), stopping early once
// the farthest point is already in T. The returned center is the last one
// computed, expressed as a convex combination over S indices; norm_history
// records the per-iteration coreset radii, which are non-decreasing.
inline SparseSolution bc_meb(const PointSet& s, double eps) {
    if (s.empty()) throw std::invalid_argument("bc_meb: empty point set");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("bc_meb: eps must lie in (0,1)");

    const std::size_t rounds = static_cast<std::size_t>(std::ceil(2.0 / eps));
    std::vector<std::size_t> coreset{0};

    SparseSolution sol;
    detail::SmallMeb cur;
    for (std::size_t iter = 1; iter <= rounds; ++iter) {
        cur = detail::small_meb(s.subset(coreset));
        sol.iterations = iter;
        sol.norm_history.push_back(cur.radius);

        std::size_t far = 0;
        double fd = -1.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double sq = squared_distance(cur.center, s[i]);
            if (sq > fd) {
                fd = sq;
                far = i;
            }
        }
        sol.pick_history.push_back(far);
        if (std::find(coreset.begin(), coreset.end(), far) != coreset.end()) break;
        coreset.push_back(far);
    }

    sol.point = std::move(cur.center);
    sol.comb.indices.reserve(cur.support.size());
    for (std::size_t local : cur.support) sol.comb.indices.push_back(coreset[local]);
    sol.comb.weights = std::move(cur.coeffs);
    return sol;
}

// Covering radius of a center over a point set.
inline double covering_radius(const PointSet& s, std::span<const double> center) {
    double r2 = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) r2 = std::max(r2, squared_distance(center, s[i]));
    return std::sqrt(r2);
}

}  // namespace jlrobust
