#pragma once

// Dense point storage and the small exact geometric primitives the rest of
// the library is checked against: squared distances, the perturbed-triangle
// margin bound, and an exact minimum enclosing ball for desk-scale inputs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace jlrobust {

using Point = std::vector<double>;

// Thrown when an exact/brute-force routine is asked to run beyond the input
// size it is guaranteed (and affordable) for.
struct OracleScaleError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline void require_finite(std::span<const double> p, const char* what) {
    for (double x : p)
        if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + ": non-finite coordinate");
}

// Row-major set of n points in R^dim. Rows are immutable once added.
class PointSet {
public:
    PointSet() = default;
    explicit PointSet(std::size_t dim) : dim_(dim) {
        if (dim == 0) throw std::invalid_argument("PointSet: dimension must be positive");
    }

    static PointSet from_rows(std::size_t dim, std::vector<double> row_major) {
        if (dim == 0) throw std::invalid_argument("PointSet: dimension must be positive");
        if (row_major.size() % dim != 0)
            throw std::invalid_argument("PointSet: flat data size is not a multiple of dim");
        require_finite(row_major, "PointSet");
        PointSet s(dim);
        s.data_ = std::move(row_major);
        return s;
    }

    std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
    std::size_t dim() const { return dim_; }
    bool empty() const { return data_.empty(); }

    std::span<const double> operator[](std::size_t i) const {
        return std::span<const double>(data_.data() + i * dim_, dim_);
    }
    std::span<const double> row(std::size_t i) const {
        if (i >= size()) throw std::out_of_range("PointSet: row index out of range");
        return (*this)[i];
    }

    void add_row(std::span<const double> p) {
        if (dim_ == 0) dim_ = p.size();
        if (p.size() != dim_) throw std::invalid_argument("PointSet: row dimension mismatch");
        if (dim_ == 0) throw std::invalid_argument("PointSet: dimension must be positive");
        require_finite(p, "PointSet");
        data_.insert(data_.end(), p.begin(), p.end());
    }
    void add_row(std::initializer_list<double> p) { add_row(std::span<const double>(p.begin(), p.size())); }

    // New set holding rows idx[0], idx[1], ... in that order.
    PointSet subset(std::span<const std::size_t> idx) const {
        PointSet out(dim_);
        out.data_.reserve(idx.size() * dim_);
        for (std::size_t i : idx) {
            if (i >= size()) throw std::out_of_range("PointSet::subset: index out of range");
            out.data_.insert(out.data_.end(), data_.begin() + i * dim_, data_.begin() + (i + 1) * dim_);
        }
        return out;
    }

    const std::vector<double>& data() const { return data_; }
    bool operator==(const PointSet&) const = default;

private:
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

inline void check_same_dim(std::span<const double> p, std::span<const double> q, const char* what) {
    if (p.size() != q.size())
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(p.size()) +
                                    " vs " + std::to_string(q.size()) + ")");
}

inline double dot(std::span<const double> p, std::span<const double> q) {
    check_same_dim(p, q, "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * q[i];
    return s;
}

inline double squared_norm(std::span<const double> p) { return dot(p, p); }
inline double norm(std::span<const double> p) { return std::sqrt(squared_norm(p)); }

inline double squared_distance(std::span<const double> p, std::span<const double> q) {
    check_same_dim(p, q, "squared_distance");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = p[i] - q[i];
        s += d * d;
    }
    return s;
}

inline double distance(std::span<const double> p, std::span<const double> q) {
    return std::sqrt(squared_distance(p, q));
}

inline Point centroid(const PointSet& s) {
    if (s.empty()) throw std::invalid_argument("centroid: empty point set");
    Point c(s.dim(), 0.0);
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t t = 0; t < s.dim(); ++t) c[t] += s[i][t];
    for (double& x : c) x /= static_cast<double>(s.size());
    return c;
}

// The single trimming convention: floor(gamma n) points are discarded, so
// n - floor(gamma n) = ceil((1-gamma) n) are kept. Every trimming site in the
// library goes through this function so boundary rounding cannot diverge.
inline std::size_t inlier_count(std::size_t n, double gamma) {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("inlier_count: gamma must lie in [0,1)");
    const auto dropped = static_cast<std::size_t>(std::floor(gamma * static_cast<double>(n)));
    return n - std::min(dropped, n);
}

// Max pairwise distance; exact O(n^2 dim) scan.
inline double exact_diameter(const PointSet& s) {
    double best = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j) best = std::max(best, squared_distance(s[i], s[j]));
    return std::sqrt(best);
}

// ---------------------------------------------------------------------------
// Perturbed right triangle: o at the origin, y1 = (a, 0), y2 = (a, b).
// A perturbation moves y1 to (a0, 0) and y2 to (aPrime, bPrime) while every
// squared side length stays within +-delta of its original value. Under that
// promise the new base coordinate aPrime cannot drop below
// (2a^2 - 3 delta) / (2 sqrt(a^2 + delta)).
// ---------------------------------------------------------------------------
struct TriangleWitness {
    double a = 1.0;       // original base length, > 0
    double b = 0.0;       // original height, >= 0
    double delta = 0.0;   // additive bound on squared-length perturbation
    double a0 = 1.0;      // perturbed y1 = (a0, 0)
    double aPrime = 1.0;  // perturbed y2 = (aPrime, bPrime)
    double bPrime = 0.0;
};

inline double triangle_margin_bound(double a, double delta) {
    return (2.0 * a * a - 3.0 * delta) / (2.0 * std::sqrt(a * a + delta));
}

// Re-verifies the squared-length promises, then checks the lower bound on
// aPrime. Invalid witnesses (shape or broken promise) throw.
inline bool check_triangle_bound(const TriangleWitness& w) {
    for (double v : {w.a, w.b, w.delta, w.a0, w.aPrime, w.bPrime})
        if (!std::isfinite(v)) throw std::invalid_argument("TriangleWitness: non-finite field");
    if (!(w.a > 0.0)) throw std::invalid_argument("TriangleWitness: a must be positive");
    if (w.b < 0.0) throw std::invalid_argument("TriangleWitness: b must be nonnegative");
    if (w.delta < 0.0) throw std::invalid_argument("TriangleWitness: delta must be nonnegative");

    const double a2 = w.a * w.a;
    const double b2 = w.b * w.b;
    const double hyp2 = a2 + b2;
    const double n1 = w.a0 * w.a0;
    const double n2 = w.aPrime * w.aPrime + w.bPrime * w.bPrime;
    const double leg = (w.aPrime - w.a0) * (w.aPrime - w.a0) + w.bPrime * w.bPrime;

    const double slack = 1e-9 * std::max({1.0, a2, b2, hyp2});
    if (std::abs(n1 - a2) > w.delta + slack)
        throw std::invalid_argument("TriangleWitness: |y1'|^2 breaks the delta promise");
    if (std::abs(n2 - hyp2) > w.delta + slack)
        throw std::invalid_argument("TriangleWitness: |y2'|^2 breaks the delta promise");
    if (std::abs(leg - b2) > w.delta + slack)
        throw std::invalid_argument("TriangleWitness: |y1'-y2'|^2 breaks the delta promise");

    return w.aPrime >= triangle_margin_bound(w.a, w.delta) - 1e-12;
}

// ---------------------------------------------------------------------------
// Exact minimum enclosing ball (Welzl's move-to-front recursion), limited to
// desk scale: dim <= 10 or n <= 50. The center is also reported as a convex
// combination of the support points, which downstream solvers rely on.
// ---------------------------------------------------------------------------
struct MebResult {
    Point center;
    double radius = 0.0;
    std::vector<std::size_t> support;  // indices into the input set
    std::vector<double> coeffs;        // convex weights of the center over `support`
};

namespace detail {

// Solves the k x k linear system in place by Gaussian elimination with
// partial pivoting; returns false when numerically singular.
inline bool solve_dense(std::vector<double>& m, std::vector<double>& rhs, std::size_t k) {
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < k; ++r)
            if (std::abs(m[r * k + col]) > std::abs(m[piv * k + col])) piv = r;
        if (std::abs(m[piv * k + col]) < 1e-12) return false;
        if (piv != col) {
            for (std::size_t c = 0; c < k; ++c) std::swap(m[piv * k + c], m[col * k + c]);
            std::swap(rhs[piv], rhs[col]);
        }
        const double inv = 1.0 / m[col * k + col];
        for (std::size_t r = col + 1; r < k; ++r) {
            const double f = m[r * k + col] * inv;
            if (f == 0.0) continue;
            for (std::size_t c = col; c < k; ++c) m[r * k + c] -= f * m[col * k + c];
            rhs[r] -= f * rhs[col];
        }
    }
    for (std::size_t r = k; r-- > 0;) {
        double s = rhs[r];
        for (std::size_t c = r + 1; c < k; ++c) s -= m[r * k + c] * rhs[c];
        rhs[r] = s / m[r * k + r];
    }
    return true;
}

struct WelzlBall {
    Point center;
    double radius2 = -1.0;  // covers nothing until a support point exists
    std::vector<double> coeffs;
};

// Smallest ball with all points of R on its boundary (their circumball).
// Returns nullopt when R is affinely degenerate.
inline std::optional<WelzlBall> ball_from_support(const PointSet& pts, const std::vector<std::size_t>& r) {
    WelzlBall b;
    if (r.empty()) return b;
    const std::size_t dim = pts.dim();
    const auto p0 = pts[r[0]];
    if (r.size() == 1) {
        b.center.assign(p0.begin(), p0.end());
        b.radius2 = 0.0;
        b.coeffs = {1.0};
        return b;
    }
    const std::size_t m = r.size() - 1;
    std::vector<double> gram(m * m), rhs(m);
    for (std::size_t j = 0; j < m; ++j) {
        const auto pj = pts[r[j + 1]];
        for (std::size_t k = j; k < m; ++k) {
            const auto pk = pts[r[k + 1]];
            double g = 0.0;
            for (std::size_t t = 0; t < dim; ++t) g += (pj[t] - p0[t]) * (pk[t] - p0[t]);
            gram[j * m + k] = gram[k * m + j] = 2.0 * g;
        }
        rhs[j] = 0.5 * gram[j * m + j];
    }
    if (!solve_dense(gram, rhs, m)) return std::nullopt;
    b.center.assign(p0.begin(), p0.end());
    double w0 = 1.0;
    for (std::size_t j = 0; j < m; ++j) {
        const auto pj = pts[r[j + 1]];
        for (std::size_t t = 0; t < dim; ++t) b.center[t] += rhs[j] * (pj[t] - p0[t]);
        w0 -= rhs[j];
    }
    b.radius2 = squared_distance(b.center, p0);
    b.coeffs.assign(1, w0);
    b.coeffs.insert(b.coeffs.end(), rhs.begin(), rhs.end());
    return b;
}

inline bool ball_contains(const WelzlBall& b, std::span<const double> p) {
    if (b.radius2 < 0.0) return false;
    return squared_distance(b.center, p) <= b.radius2 + 1e-10 * std::max(1.0, b.radius2);
}

struct WelzlState {
    const PointSet& pts;
    std::vector<std::size_t> perm;
    std::vector<std::size_t> boundary;

    explicit WelzlState(const PointSet& p) : pts(p), perm(p.size()) {
        std::iota(perm.begin(), perm.end(), std::size_t{0});
    }

    WelzlBall run(std::size_t end) {
        auto ball = ball_from_support(pts, boundary);
        WelzlBall cur = ball ? *ball : WelzlBall{};
        std::vector<std::size_t> cur_support = boundary;
        if (boundary.size() >= pts.dim() + 1) {
            last_support = cur_support;
            return cur;
        }
        for (std::size_t i = 0; i < end; ++i) {
            const std::size_t idx = perm[i];
            if (!ball_contains(cur, pts[idx])) {
                boundary.push_back(idx);
                cur = run(i);
                cur_support = last_support;
                boundary.pop_back();
                // move-to-front keeps hard points early on re-scans
                std::rotate(perm.begin(), perm.begin() + i, perm.begin() + i + 1);
            }
        }
        last_support = cur_support;
        return cur;
    }

    std::vector<std::size_t> last_support;
};

}  // namespace detail

inline MebResult exact_meb(const PointSet& s) {
    if (s.empty()) throw std::invalid_argument("exact_meb: empty point set");
    if (s.dim() > 10 && s.size() > 50)
        throw OracleScaleError("exact_meb: guarded to dim <= 10 or n <= 50 (got dim=" +
                               std::to_string(s.dim()) + ", n=" + std::to_string(s.size()) + ")");

    detail::WelzlState st(s);
    st.boundary.clear();
    detail::WelzlBall ball = st.run(s.size());
    if (ball.radius2 < 0.0) throw std::runtime_error("exact_meb: failed to form a ball");

    MebResult out;
    out.center = ball.center;
    out.support = st.last_support;
    out.coeffs = ball.coeffs;
    // Numerical cleanup: the exact support weights are nonnegative; clamp
    // round-off negatives and renormalize.
    double sum = 0.0;
    for (double& w : out.coeffs) {
        if (w < 0.0) w = 0.0;
        sum += w;
    }
    if (sum <= 0.0) throw std::runtime_error("exact_meb: degenerate support weights");
    for (double& w : out.coeffs) w /= sum;
    double r2 = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) r2 = std::max(r2, squared_distance(out.center, s[i]));
    out.radius = std::sqrt(r2);
    return out;
}

}  // namespace jlrobust
