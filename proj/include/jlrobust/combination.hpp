#pragma once

// Sparse convex combinations over an indexed point set. Solvers that work in
// a reduced space report their answer in this form; recover() lifts it back
// to the original space by taking the same combination of original points,
// which commutes with any linear map.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "jlrobust/geometry.hpp"

namespace jlrobust {

struct ConvexCombination {
    std::vector<std::size_t> indices;
    std::vector<double> weights;

    std::size_t support_size() const { return indices.size(); }

    // Distinct indices, nonnegative weights summing to 1 within tol.
    void validate(double tol = 1e-9) const {
        if (indices.size() != weights.size())
            throw std::invalid_argument("ConvexCombination: indices/weights size mismatch");
        if (indices.empty()) throw std::invalid_argument("ConvexCombination: empty combination");
        double sum = 0.0;
        for (std::size_t i = 0; i < indices.size(); ++i) {
            if (weights[i] < -tol)
                throw std::invalid_argument("ConvexCombination: negative weight at slot " + std::to_string(i));
            sum += weights[i];
            for (std::size_t j = i + 1; j < indices.size(); ++j)
                if (indices[i] == indices[j])
                    throw std::invalid_argument("ConvexCombination: duplicate index " +
                                                std::to_string(indices[i]));
        }
        if (std::abs(sum - 1.0) > tol)
            throw std::invalid_argument("ConvexCombination: weights sum to " + std::to_string(sum));
    }

    // Rewrites local indices through a lookup table (local -> global), keeping weights.
    ConvexCombination remapped(std::span<const std::size_t> table) const {
        ConvexCombination out;
        out.weights = weights;
        out.indices.reserve(indices.size());
        for (std::size_t i : indices) {
            if (i >= table.size()) throw std::out_of_range("ConvexCombination::remapped: index out of table");
            out.indices.push_back(table[i]);
        }
        return out;
    }
};

// Weighted sum of original points; with weights from a solver that ran on
// linearly mapped points, this is the preimage of the solver's answer.
inline Point recover(const ConvexCombination& comb, const PointSet& originals) {
    comb.validate();
    Point out(originals.dim(), 0.0);
    for (std::size_t i = 0; i < comb.indices.size(); ++i) {
        if (comb.indices[i] >= originals.size())
            throw std::out_of_range("recover: combination index out of range");
        const auto row = originals[comb.indices[i]];
        const double w = comb.weights[i];
        for (std::size_t t = 0; t < out.size(); ++t) out[t] += w * row[t];
    }
    return out;
}

}  // namespace jlrobust
