#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "scalestat/core/error.hpp"
#include "scalestat/core/rng.hpp"
#include "scalestat/core/sampling.hpp"
#include "scalestat/convex/polytope.hpp"

namespace scalestat {

enum class SignalKind { sparse_pca, cut_matrix };

/// Finite signal sets over sqrt(p) x sqrt(p) matrices, vectorized
/// column-major into R^p. sparse_pca: a k x k block of value sqrt(p)/k placed
/// at any row/column subset. cut_matrix: sign matrices a a^T.
struct SignalSpec {
    SignalKind kind = SignalKind::cut_matrix;
    Eigen::Index p = 16;
    Eigen::Index k = 1;  // sparse_pca block size

    Eigen::Index side() const {
        const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(p))));
        if (d * d != p) throw std::invalid_argument("SignalSpec: p must be a perfect square");
        return d;
    }

    void validate() const {
        const Eigen::Index d = side();
        if (kind == SignalKind::sparse_pca && (k < 1 || k > d))
            throw std::invalid_argument("SignalSpec: k must satisfy 1 <= k <= sqrt(p)");
    }
};

namespace detail {

inline Eigen::VectorXd vectorize(const Eigen::MatrixXd& m) {
    return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

inline void combinations_rec(Eigen::Index n, Eigen::Index k, Eigen::Index start,
                             std::vector<Eigen::Index>& cur,
                             std::vector<std::vector<Eigen::Index>>& out) {
    if (static_cast<Eigen::Index>(cur.size()) == k) {
        out.push_back(cur);
        return;
    }
    for (Eigen::Index i = start; i <= n - (k - static_cast<Eigen::Index>(cur.size())); ++i) {
        cur.push_back(i);
        combinations_rec(n, k, i + 1, cur, out);
        cur.pop_back();
    }
}

inline std::vector<std::vector<Eigen::Index>> combinations(Eigen::Index n, Eigen::Index k) {
    std::vector<std::vector<Eigen::Index>> out;
    std::vector<Eigen::Index> cur;
    combinations_rec(n, k, 0, cur, out);
    return out;
}

}  // namespace detail

/// All distinct cut matrices a a^T, a in {-1,+1}^sqrt(p). Deduplicated by
/// fixing a_1 = +1 (a a^T = (-a)(-a)^T), so there are 2^(sqrt(p)-1) of them.
inline std::vector<Eigen::VectorXd> cut_matrix_vertices(Eigen::Index p,
                                                        std::size_t vertex_cap = kDefaultVertexCap) {
    SignalSpec spec{SignalKind::cut_matrix, p, 1};
    const Eigen::Index d = spec.side();
    const std::size_t count = std::size_t{1} << (d - 1);
    if (count > vertex_cap)
        throw InfeasibleScaleError("cut_matrix_vertices: 2^(sqrt(p)-1) = " + std::to_string(count) +
                                   " exceeds the enumeration budget");
    std::vector<Eigen::VectorXd> out;
    out.reserve(count);
    Eigen::VectorXd a(d);
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        a[0] = 1.0;
        for (Eigen::Index i = 1; i < d; ++i) a[i] = (mask >> (i - 1)) & 1 ? -1.0 : 1.0;
        out.push_back(detail::vectorize(a * a.transpose()));
    }
    return out;
}

/// All distinct placements of the k x k block of value sqrt(p)/k: one matrix
/// per (row subset, column subset) pair, C(sqrt(p),k)^2 in total.
inline std::vector<Eigen::VectorXd> sparse_pca_vertices(Eigen::Index p, Eigen::Index k,
                                                        std::size_t vertex_cap = kDefaultVertexCap) {
    SignalSpec spec{SignalKind::sparse_pca, p, k};
    spec.validate();
    const Eigen::Index d = spec.side();
    const auto subsets = detail::combinations(d, k);
    const std::size_t count = subsets.size() * subsets.size();
    if (count > vertex_cap)
        throw InfeasibleScaleError("sparse_pca_vertices: C(sqrt(p),k)^2 = " + std::to_string(count) +
                                   " exceeds the enumeration budget");
    const double value = std::sqrt(static_cast<double>(p)) / static_cast<double>(k);
    std::vector<Eigen::VectorXd> out;
    out.reserve(count);
    for (const auto& rows : subsets) {
        for (const auto& cols : subsets) {
            Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
            for (const auto i : rows)
                for (const auto j : cols) m(i, j) = value;
            out.push_back(detail::vectorize(m));
        }
    }
    return out;
}

inline std::vector<Eigen::VectorXd> signal_vertices(const SignalSpec& spec,
                                                    std::size_t vertex_cap = kDefaultVertexCap) {
    spec.validate();
    return spec.kind == SignalKind::cut_matrix ? cut_matrix_vertices(spec.p, vertex_cap)
                                               : sparse_pca_vertices(spec.p, spec.k, vertex_cap);
}

/// Uniformly sampled element of the signal set, drawn directly (no
/// enumeration, so this works even when the full vertex list would exceed the
/// budget).
inline Eigen::VectorXd sample_signal(const SignalSpec& spec, RngStream& rng) {
    spec.validate();
    const Eigen::Index d = spec.side();
    if (spec.kind == SignalKind::cut_matrix) {
        Eigen::VectorXd a(d);
        a[0] = 1.0;
        for (Eigen::Index i = 1; i < d; ++i) a[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
        return detail::vectorize(a * a.transpose());
    }
    const auto rows = detail::sample_without_replacement(d, spec.k, rng);
    const auto cols = detail::sample_without_replacement(d, spec.k, rng);
    const double value = std::sqrt(static_cast<double>(spec.p)) / static_cast<double>(spec.k);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    for (const auto i : rows)
        for (const auto j : cols) m(i, j) = value;
    return detail::vectorize(m);
}

}  // namespace scalestat
