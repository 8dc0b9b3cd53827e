#pragma once

// Random linear maps R^d -> R^dTilde that preserve pairwise squared
// distances up to a relative (1 +- eps) factor with high probability.
// Three families:
//   gaussian - i.i.d. N(0,1) entries, scaled by 1/sqrt(dTilde)
//   binary   - entries +1 w.p. 1/6, -1 w.p. 1/6, 0 w.p. 2/3, scaled sqrt(3/dTilde)
//   fast     - subsampled randomized Hadamard transform: sign flips, a
//              normalized Walsh-Hadamard butterfly over the next power of
//              two, then dTilde sampled rows scaled sqrt(D/dTilde)
// A map is a value: (variant, d, dTilde, seed) regenerate it exactly, so only
// that descriptor ever needs to be stored or shipped.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "jlrobust/geometry.hpp"
#include "jlrobust/random.hpp"

namespace jlrobust {

enum class Variant { gaussian, binary, fast, custom };

inline const char* variant_name(Variant v) {
    switch (v) {
        case Variant::gaussian: return "gaussian";
        case Variant::binary: return "binary";
        case Variant::fast: return "fast";
        case Variant::custom: return "custom";
    }
    throw std::invalid_argument("variant_name: unknown variant");
}

inline Variant variant_from_name(const std::string& s) {
    if (s == "gaussian") return Variant::gaussian;
    if (s == "binary") return Variant::binary;
    if (s == "fast") return Variant::fast;
    if (s == "custom") return Variant::custom;
    throw std::invalid_argument("variant_from_name: unknown variant '" + s + "'");
}

struct ProjectionDescriptor {
    Variant variant = Variant::gaussian;
    std::size_t d = 0;
    std::size_t d_tilde = 0;
    std::uint64_t seed = 0;
    bool operator==(const ProjectionDescriptor&) const = default;
};

// Rows needed so that n points keep pairwise squared distances within
// (1 +- eps): ceil(c * ln(n) / eps^2).
inline std::size_t target_dimension(std::size_t n, double eps, double c = 8.0) {
    if (n < 2) throw std::invalid_argument("target_dimension: need n >= 2");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("target_dimension: eps must lie in (0,1)");
    if (!(c > 0.0)) throw std::invalid_argument("target_dimension: c must be positive");
    return static_cast<std::size_t>(std::ceil(c * std::log(static_cast<double>(n)) / (eps * eps)));
}

// Inverse of target_dimension: the eps a given row budget corresponds to.
inline double epsilon_for_dimension(std::size_t n, std::size_t d_tilde, double c = 8.0) {
    if (n < 2) throw std::invalid_argument("epsilon_for_dimension: need n >= 2");
    if (d_tilde == 0) throw std::invalid_argument("epsilon_for_dimension: d_tilde must be positive");
    if (!(c > 0.0)) throw std::invalid_argument("epsilon_for_dimension: c must be positive");
    return std::sqrt(c * std::log(static_cast<double>(n)) / static_cast<double>(d_tilde));
}

class ProjectionMap {
public:
    static ProjectionMap gaussian(std::size_t d, std::size_t d_tilde, std::uint64_t seed) {
        ProjectionMap m(Variant::gaussian, d, d_tilde, seed);
        SplitRng rng = SplitRng(seed).split(static_cast<std::uint64_t>(Variant::gaussian));
        m.matrix_.resize(d_tilde * d);
        const double scale = 1.0 / std::sqrt(static_cast<double>(d_tilde));
        for (double& e : m.matrix_) e = scale * rng.normal();
        return m;
    }

    static ProjectionMap binary(std::size_t d, std::size_t d_tilde, std::uint64_t seed) {
        ProjectionMap m(Variant::binary, d, d_tilde, seed);
        SplitRng rng = SplitRng(seed).split(static_cast<std::uint64_t>(Variant::binary));
        m.matrix_.resize(d_tilde * d);
        const double scale = std::sqrt(3.0 / static_cast<double>(d_tilde));
        for (double& e : m.matrix_) {
            const double u = rng.uniform01();
            e = u < 1.0 / 6.0 ? scale : (u < 2.0 / 6.0 ? -scale : 0.0);
        }
        return m;
    }

    static ProjectionMap fast(std::size_t d, std::size_t d_tilde, std::uint64_t seed) {
        ProjectionMap m(Variant::fast, d, d_tilde, seed);
        SplitRng rng = SplitRng(seed).split(static_cast<std::uint64_t>(Variant::fast));
        std::size_t padded = 1;
        while (padded < d) padded <<= 1;
        m.padded_ = padded;
        m.signs_.resize(padded);
        for (double& s : m.signs_) s = rng.uniform01() < 0.5 ? 1.0 : -1.0;
        // d_tilde distinct rows of the padded transform, sampled uniformly
        std::vector<std::size_t> pool(padded);
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        m.rows_.resize(d_tilde);
        for (std::size_t i = 0; i < d_tilde; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(padded - i));
            std::swap(pool[i], pool[j]);
            m.rows_[i] = pool[i];
        }
        return m;
    }

    static ProjectionMap make(Variant v, std::size_t d, std::size_t d_tilde, std::uint64_t seed) {
        switch (v) {
            case Variant::gaussian: return gaussian(d, d_tilde, seed);
            case Variant::binary: return binary(d, d_tilde, seed);
            case Variant::fast: return fast(d, d_tilde, seed);
            case Variant::custom:
                throw std::invalid_argument("ProjectionMap::make: custom maps need an explicit matrix");
        }
        throw std::invalid_argument("ProjectionMap::make: unknown variant");
    }

    static ProjectionMap make(const ProjectionDescriptor& desc) {
        return make(desc.variant, desc.d, desc.d_tilde, desc.seed);
    }

    // Explicit dense matrix (row-major d_tilde x d); mainly for tests that
    // need a handcrafted (e.g. orthonormal) map.
    static ProjectionMap custom_dense(std::size_t d, std::size_t d_tilde, std::vector<double> matrix) {
        ProjectionMap m(Variant::custom, d, d_tilde, 0);
        if (matrix.size() != d_tilde * d)
            throw std::invalid_argument("ProjectionMap::custom_dense: matrix size mismatch");
        m.matrix_ = std::move(matrix);
        return m;
    }

    Variant variant() const { return variant_; }
    std::size_t input_dim() const { return d_; }
    std::size_t output_dim() const { return d_tilde_; }
    std::uint64_t seed() const { return seed_; }
    ProjectionDescriptor descriptor() const { return {variant_, d_, d_tilde_, seed_}; }

    // Stored operational entries (already scaled); dense variants only.
    const std::vector<double>& matrix() const {
        if (variant_ == Variant::fast)
            throw std::logic_error("ProjectionMap::matrix: the fast variant is matrix-free");
        return matrix_;
    }

    void apply_to(std::span<const double> in, std::span<double> out) const {
        if (in.size() != d_) throw std::invalid_argument("ProjectionMap: input dimension mismatch");
        if (out.size() != d_tilde_) throw std::invalid_argument("ProjectionMap: output dimension mismatch");
        if (variant_ == Variant::fast) {
            std::vector<double> buf(padded_, 0.0);
            for (std::size_t i = 0; i < d_; ++i) buf[i] = in[i] * signs_[i];
            for (std::size_t len = 1; len < padded_; len <<= 1)
                for (std::size_t i = 0; i < padded_; i += len << 1)
                    for (std::size_t j = i; j < i + len; ++j) {
                        const double a = buf[j], b = buf[j + len];
                        buf[j] = a + b;
                        buf[j + len] = a - b;
                    }
            const double scale = 1.0 / std::sqrt(static_cast<double>(d_tilde_));
            for (std::size_t r = 0; r < d_tilde_; ++r) out[r] = buf[rows_[r]] * scale;
        } else {
            for (std::size_t r = 0; r < d_tilde_; ++r) {
                const double* row = matrix_.data() + r * d_;
                double s = 0.0;
                for (std::size_t i = 0; i < d_; ++i) s += row[i] * in[i];
                out[r] = s;
            }
        }
    }

    Point apply_vector(std::span<const double> in) const {
        Point out(d_tilde_);
        apply_to(in, out);
        return out;
    }

    // Maps every row; row i of the result is the image of row i.
    PointSet apply(const PointSet& pts) const {
        if (pts.dim() != d_) throw std::invalid_argument("ProjectionMap::apply: point dimension mismatch");
        std::vector<double> flat(pts.size() * d_tilde_);
        for (std::size_t i = 0; i < pts.size(); ++i)
            apply_to(pts[i], std::span<double>(flat.data() + i * d_tilde_, d_tilde_));
        return PointSet::from_rows(d_tilde_, std::move(flat));
    }

private:
    ProjectionMap(Variant v, std::size_t d, std::size_t d_tilde, std::uint64_t seed)
        : variant_(v), d_(d), d_tilde_(d_tilde), seed_(seed) {
        if (d == 0) throw std::invalid_argument("ProjectionMap: d must be positive");
        if (d_tilde == 0 || d_tilde > d)
            throw std::invalid_argument("ProjectionMap: need 1 <= d_tilde <= d (got d_tilde=" +
                                        std::to_string(d_tilde) + ", d=" + std::to_string(d) + ")");
    }

    Variant variant_;
    std::size_t d_, d_tilde_;
    std::uint64_t seed_;
    std::vector<double> matrix_;      // dense variants
    std::vector<double> signs_;       // fast variant
    std::vector<std::size_t> rows_;   // fast variant
    std::size_t padded_ = 0;          // fast variant
};

inline PointSet apply(const ProjectionMap& map, const PointSet& pts) { return map.apply(pts); }

struct DistortionReport {
    double max_rel = 0.0;       // max |delta| / original squared distance
    double mean_rel = 0.0;
    double frac_within = 1.0;   // fraction of pairs with |delta| <= eps * original
    std::size_t pairs = 0;
};

// Relative squared-distance distortion over sampled pairs (pair_sample == 0
// means every pair). Pairs at distance zero count as undistorted: a linear
// map sends equal points to equal points.
inline DistortionReport distortion_report(const PointSet& pts, const ProjectionMap& map,
                                          std::size_t pair_sample, double eps, std::uint64_t seed) {
    if (pts.size() < 2) throw std::invalid_argument("distortion_report: need at least two points");
    if (!(eps > 0.0)) throw std::invalid_argument("distortion_report: eps must be positive");
    const PointSet mapped = map.apply(pts);
    DistortionReport rep;
    double sum = 0.0;
    std::size_t within = 0;
    auto one_pair = [&](std::size_t i, std::size_t j) {
        const double orig = squared_distance(pts[i], pts[j]);
        const double red = squared_distance(mapped[i], mapped[j]);
        const double rel = orig > 0.0 ? std::abs(red - orig) / orig : 0.0;
        rep.max_rel = std::max(rep.max_rel, rel);
        sum += rel;
        if (rel <= eps) ++within;
        ++rep.pairs;
    };
    if (pair_sample == 0) {
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j) one_pair(i, j);
    } else {
        SplitRng rng = SplitRng(seed).split(0x70616972);  // independent pair-sampling stream
        for (std::size_t t = 0; t < pair_sample; ++t) {
            const std::size_t i = static_cast<std::size_t>(rng.below(pts.size()));
            std::size_t j = static_cast<std::size_t>(rng.below(pts.size() - 1));
            if (j >= i) ++j;
            one_pair(i, j);
        }
    }
    rep.mean_rel = sum / static_cast<double>(rep.pairs);
    rep.frac_within = static_cast<double>(within) / static_cast<double>(rep.pairs);
    return rep;
}

}  // namespace jlrobust
