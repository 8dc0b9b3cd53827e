#pragma once

// Desk-scale exact references. These are deliberately independent of the
// iterative solvers in hull.hpp: min_norm_point is Wolfe's corral algorithm
// (finite, exact up to round-off), and the brute_force_* routines enumerate
// subsets outright. They exist to check the fast paths, not to be fast.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "jlrobust/combination.hpp"
#include "jlrobust/geometry.hpp"

namespace jlrobust {

struct MinNormResult {
    Point point;
    double distance = 0.0;
    ConvexCombination comb;
};

// Exact minimum-norm point of conv(S) by Wolfe's method: keep a corral of
// affinely independent points, step to the affine minimizer while staying in
// the simplex, and add the most violating vertex until none is left.
inline MinNormResult min_norm_point(const PointSet& s) {
    if (s.empty()) throw std::invalid_argument("min_norm_point: empty point set");
    if (s.size() > 256) throw OracleScaleError("min_norm_point: guarded to n <= 256");
    const std::size_t n = s.size(), dim = s.dim();

    std::size_t first = 0;
    double bestsq = squared_norm(s[0]);
    for (std::size_t i = 1; i < n; ++i) {
        const double q = squared_norm(s[i]);
        if (q < bestsq) {
            bestsq = q;
            first = i;
        }
    }

    std::vector<std::size_t> corral{first};
    std::vector<double> w{1.0};
    Point x(s[first].begin(), s[first].end());

    double scale = 1.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, squared_norm(s[i]));
    const double tol = 1e-11 * scale;

    // Affine min-norm point over the current corral; false when the Gram
    // system is numerically singular.
    auto affine_min = [&](std::vector<double>& z) -> bool {
        const std::size_t m = corral.size() - 1;
        z.assign(corral.size(), 0.0);
        if (m == 0) {
            z[0] = 1.0;
            return true;
        }
        const auto p0 = s[corral[0]];
        std::vector<double> gram(m * m), rhs(m);
        for (std::size_t j = 0; j < m; ++j) {
            const auto pj = s[corral[j + 1]];
            for (std::size_t k = j; k < m; ++k) {
                const auto pk = s[corral[k + 1]];
                double g = 0.0;
                for (std::size_t t = 0; t < dim; ++t) g += (pj[t] - p0[t]) * (pk[t] - p0[t]);
                gram[j * m + k] = gram[k * m + j] = g;
            }
            double gj = 0.0;
            for (std::size_t t = 0; t < dim; ++t) gj += (pj[t] - p0[t]) * p0[t];
            rhs[j] = -gj;
        }
        if (!detail::solve_dense(gram, rhs, m)) return false;
        double z0 = 1.0;
        for (std::size_t j = 0; j < m; ++j) {
            z[j + 1] = rhs[j];
            z0 -= rhs[j];
        }
        z[0] = z0;
        return true;
    };

    auto rebuild_x = [&]() {
        std::fill(x.begin(), x.end(), 0.0);
        for (std::size_t c = 0; c < corral.size(); ++c) {
            const auto p = s[corral[c]];
            for (std::size_t t = 0; t < dim; ++t) x[t] += w[c] * p[t];
        }
    };

    const std::size_t major_limit = 16 * n + 64;
    for (std::size_t cycle = 0; cycle < major_limit; ++cycle) {
        const double xx = squared_norm(x);
        double minq = std::numeric_limits<double>::infinity();
        std::size_t q = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = dot(s[i], x);
            if (d < minq) {
                minq = d;
                q = i;
            }
        }
        if (xx - minq <= tol) break;  // every vertex projects at least |x|^2: optimal
        if (std::find(corral.begin(), corral.end(), q) != corral.end()) break;  // no usable progress
        corral.push_back(q);
        w.push_back(0.0);

        for (;;) {
            std::vector<double> z;
            if (!affine_min(z)) {
                // Degenerate corral: drop the lightest point other than the
                // newest and retry with a smaller corral.
                std::size_t drop = 0;
                for (std::size_t c = 1; c + 1 < corral.size(); ++c)
                    if (w[c] < w[drop]) drop = c;
                corral.erase(corral.begin() + drop);
                w.erase(w.begin() + drop);
                if (corral.size() == 1) {
                    w[0] = 1.0;
                    break;
                }
                continue;
            }
            bool inside = true;
            for (double zi : z)
                if (zi < -1e-12) inside = false;
            if (inside) {
                w = std::move(z);
                for (double& wi : w) wi = std::max(wi, 0.0);
                break;
            }
            double theta = 1.0;
            for (std::size_t c = 0; c < corral.size(); ++c)
                if (z[c] < 0.0 && w[c] - z[c] > 0.0) theta = std::min(theta, w[c] / (w[c] - z[c]));
            for (std::size_t c = 0; c < corral.size(); ++c) w[c] = (1.0 - theta) * w[c] + theta * z[c];
            for (std::size_t c = corral.size(); c-- > 0;) {
                if (w[c] <= 1e-14 && corral.size() > 1) {
                    corral.erase(corral.begin() + c);
                    w.erase(w.begin() + c);
                }
            }
        }
        rebuild_x();
    }

    MinNormResult out;
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& wi : w) wi /= sum;
    rebuild_x();
    out.comb.indices = std::move(corral);
    out.comb.weights = std::move(w);
    out.point = x;
    out.distance = norm(x);
    return out;
}

namespace detail {

// Visits every size-m index subset of [0, n) in lexicographic order.
template <typename F>
inline void for_each_subset(std::size_t n, std::size_t m, F&& visit) {
    if (m > n) return;
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (;;) {
        visit(idx);
        std::size_t i = m;
        while (i-- > 0) {
            if (idx[i] != i + n - m) {
                ++idx[i];
                for (std::size_t j = i + 1; j < m; ++j) idx[j] = idx[j - 1] + 1;
                break;
            }
            if (i == 0) return;
        }
        if (m == 0) return;
    }
}

inline std::size_t keep_count(std::size_t n, double gamma) { return inlier_count(n, gamma); }

}  // namespace detail

// Best one-class margin over every choice of ceil((1-gamma) n) inliers:
// for each subset, the margin is the distance from the origin to its hull.
// Exhaustive, guarded to n <= 12.
inline double brute_force_margin_one_class(const PointSet& s, double gamma) {
    if (s.empty()) throw std::invalid_argument("brute_force_margin_one_class: empty point set");
    if (s.size() > 12) throw OracleScaleError("brute_force_margin_one_class: guarded to n <= 12");
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw std::invalid_argument("brute_force_margin_one_class: gamma must lie in [0,1)");
    const std::size_t m = detail::keep_count(s.size(), gamma);
    double best = 0.0;
    detail::for_each_subset(s.size(), m, [&](const std::vector<std::size_t>& idx) {
        best = std::max(best, min_norm_point(s.subset(idx)).distance);
    });
    return best;
}

// Two-class counterpart: max over inlier subsets of both classes of the
// distance between the two subset hulls (min-norm point of the pairwise
// difference set). Guarded to |P1| + |P2| <= 12.
inline double brute_force_margin_two_class(const PointSet& p1, const PointSet& p2, double gamma1,
                                           double gamma2) {
    if (p1.empty() || p2.empty()) throw std::invalid_argument("brute_force_margin_two_class: empty class");
    if (p1.size() + p2.size() > 12)
        throw OracleScaleError("brute_force_margin_two_class: guarded to |P1|+|P2| <= 12");
    if (p1.dim() != p2.dim()) throw std::invalid_argument("brute_force_margin_two_class: dimension mismatch");
    if (!(gamma1 >= 0.0 && gamma1 < 1.0) || !(gamma2 >= 0.0 && gamma2 < 1.0))
        throw std::invalid_argument("brute_force_margin_two_class: gamma must lie in [0,1)");
    const std::size_t m1 = detail::keep_count(p1.size(), gamma1);
    const std::size_t m2 = detail::keep_count(p2.size(), gamma2);
    const std::size_t dim = p1.dim();
    double best = 0.0;
    detail::for_each_subset(p1.size(), m1, [&](const std::vector<std::size_t>& i1) {
        detail::for_each_subset(p2.size(), m2, [&](const std::vector<std::size_t>& i2) {
            PointSet diff(dim);
            std::vector<double> row(dim);
            for (std::size_t a : i1)
                for (std::size_t b : i2) {
                    const auto pa = p1[a], pb = p2[b];
                    for (std::size_t t = 0; t < dim; ++t) row[t] = pa[t] - pb[t];
                    diff.add_row(row);
                }
            best = std::max(best, min_norm_point(diff).distance);
        });
    });
    return best;
}

// Optimal k-center-with-outliers radius with centers restricted to input
// points: enumerate every k-subset of centers, assign each point to its
// nearest one, keep the ceil((1-gamma) n) best-served points. Discrete
// centers overestimate the unrestricted optimum by at most a factor of 2.
// Guarded to n <= 14 and k <= 3.
inline double brute_force_kcenter_outliers(const PointSet& s, std::size_t k, double gamma) {
    if (s.empty()) throw std::invalid_argument("brute_force_kcenter_outliers: empty point set");
    if (s.size() > 14 || k > 3)
        throw OracleScaleError("brute_force_kcenter_outliers: guarded to n <= 14, k <= 3");
    if (k == 0 || k > s.size())
        throw std::invalid_argument("brute_force_kcenter_outliers: need 1 <= k <= n");
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw std::invalid_argument("brute_force_kcenter_outliers: gamma must lie in [0,1)");
    const std::size_t n = s.size();
    const std::size_t m = detail::keep_count(n, gamma);
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> served(n);
    detail::for_each_subset(n, k, [&](const std::vector<std::size_t>& centers) {
        for (std::size_t i = 0; i < n; ++i) {
            double d = std::numeric_limits<double>::infinity();
            for (std::size_t c : centers) d = std::min(d, squared_distance(s[i], s[c]));
            served[i] = d;
        }
        std::nth_element(served.begin(), served.begin() + (m - 1), served.end());
        best = std::min(best, served[m - 1]);
    });
    return std::sqrt(best);
}

}  // namespace jlrobust
