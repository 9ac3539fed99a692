#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "scalestat/core/dataset.hpp"
#include "scalestat/core/rng.hpp"

namespace scalestat {

namespace detail {

/// Partial Fisher-Yates over the virtual range [0, n): draws m distinct
/// values uniformly over size-m subsets using O(m) memory (a hash map of
/// pending swaps), never materializing the range.
inline std::vector<std::int64_t> sample_without_replacement(std::int64_t n, std::int64_t m,
                                                            RngStream& rng) {
    std::vector<std::int64_t> out;
    out.reserve(static_cast<std::size_t>(m));
    std::unordered_map<std::int64_t, std::int64_t> swaps;
    swaps.reserve(static_cast<std::size_t>(m) * 2);
    for (std::int64_t i = 0; i < m; ++i) {
        const std::int64_t j =
            i + static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(n - i)));
        auto it = swaps.find(j);
        const std::int64_t value = (it == swaps.end()) ? j : it->second;
        auto it_i = swaps.find(i);
        swaps[j] = (it_i == swaps.end()) ? i : it_i->second;
        out.push_back(value);
    }
    return out;
}

}  // namespace detail

/// Uniform subsample of m row indices. Without replacement by default; the
/// with-replacement variant exists for comparison runs.
inline std::vector<Eigen::Index> subsample_indices(Eigen::Index n, Eigen::Index m, RngStream& rng,
                                                   bool with_replacement = false) {
    if (m < 1 || m > n)
        throw std::invalid_argument("subsample: m must satisfy 1 <= m <= n");
    std::vector<Eigen::Index> out;
    out.reserve(static_cast<std::size_t>(m));
    if (with_replacement) {
        for (Eigen::Index i = 0; i < m; ++i)
            out.push_back(static_cast<Eigen::Index>(rng.uniform_below(static_cast<std::uint64_t>(n))));
        return out;
    }
    for (const auto v : detail::sample_without_replacement(n, m, rng))
        out.push_back(static_cast<Eigen::Index>(v));
    return out;
}

inline std::vector<Eigen::Index> subsample(const Dataset& data, Eigen::Index m, RngStream& rng,
                                           bool with_replacement = false) {
    return subsample_indices(data.n(), m, rng, with_replacement);
}

/// Multinomial(nominal; 1/m, ..., 1/m) weight vector: m nonnegative integers
/// summing to `nominal` exactly.
inline Eigen::VectorXd multinomial_weights(Eigen::Index m, std::int64_t nominal, RngStream& rng) {
    if (m < 1) throw std::invalid_argument("multinomial_weights: m must be >= 1");
    if (nominal < 1) throw std::invalid_argument("multinomial_weights: nominal must be >= 1");
    Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
    for (std::int64_t t = 0; t < nominal; ++t)
        w[static_cast<Eigen::Index>(rng.uniform_below(static_cast<std::uint64_t>(m)))] += 1.0;
    return w;
}

/// m independent Poisson(nominal/m) weights. Sums are random, unlike the
/// multinomial version.
inline Eigen::VectorXd poisson_weights(Eigen::Index m, std::int64_t nominal, RngStream& rng) {
    if (m < 1) throw std::invalid_argument("poisson_weights: m must be >= 1");
    if (nominal < 1) throw std::invalid_argument("poisson_weights: nominal must be >= 1");
    const double rate = static_cast<double>(nominal) / static_cast<double>(m);
    Eigen::VectorXd w(m);
    for (Eigen::Index i = 0; i < m; ++i) w[i] = static_cast<double>(rng.poisson(rate));
    return w;
}

/// s distinct (i, j) pairs uniform over size-s subsets of the m x n grid.
/// Runs the partial Fisher-Yates over the linearized grid, so memory is O(s).
inline std::vector<std::pair<Eigen::Index, Eigen::Index>> sample_omega(Eigen::Index m,
                                                                       Eigen::Index n,
                                                                       std::int64_t s,
                                                                       RngStream& rng) {
    if (m < 1 || n < 1) throw std::invalid_argument("sample_omega: empty grid");
    const std::int64_t total = static_cast<std::int64_t>(m) * static_cast<std::int64_t>(n);
    if (s < 1 || s > total)
        throw std::invalid_argument("sample_omega: s must satisfy 1 <= s <= m*n");
    std::vector<std::pair<Eigen::Index, Eigen::Index>> out;
    out.reserve(static_cast<std::size_t>(s));
    for (const auto lin : detail::sample_without_replacement(total, s, rng))
        out.emplace_back(static_cast<Eigen::Index>(lin / n), static_cast<Eigen::Index>(lin % n));
    return out;
}

}  // namespace scalestat
