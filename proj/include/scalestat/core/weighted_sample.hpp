#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>
#include <unordered_set>
#include <vector>

namespace scalestat {

/// A conceptual size-`nominal_size` resample stored as weights on a small set
/// of distinct row indices. Weights are reals even when integer-valued so the
/// Poisson and multinomial paths share one representation.
struct WeightedSample {
    std::vector<Eigen::Index> indices;  // m distinct row indices
    Eigen::VectorXd weights;            // length m, nonnegative
    std::int64_t nominal_size = 0;      // the conceptual resample size n

    Eigen::Index size() const { return static_cast<Eigen::Index>(indices.size()); }

    void validate(Eigen::Index n_rows) const {
        if (indices.empty()) throw std::invalid_argument("WeightedSample: empty index list");
        if (weights.size() != size())
            throw std::invalid_argument("WeightedSample: weights length != indices length");
        if (nominal_size < 1) throw std::invalid_argument("WeightedSample: nominal_size must be >= 1");
        std::unordered_set<Eigen::Index> seen;
        for (const auto idx : indices) {
            if (idx < 0 || idx >= n_rows)
                throw std::invalid_argument("WeightedSample: index out of range");
            if (!seen.insert(idx).second)
                throw std::invalid_argument("WeightedSample: duplicate index");
        }
        if ((weights.array() < 0.0).any())
            throw std::invalid_argument("WeightedSample: negative weight");
    }
};

}  // namespace scalestat
