#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "scalestat/core/error.hpp"
#include "scalestat/matcomp/svd.hpp"

namespace scalestat {

namespace detail {

inline LowRankEstimate soft_threshold(LowRankEstimate est, double tau) {
    Eigen::Index k = 0;
    while (k < est.sv.size() && est.sv[k] - tau > 0.0) ++k;
    LowRankEstimate out;
    out.U = est.U.leftCols(k);
    out.sv = est.sv.head(k).array() - tau;
    out.V = est.V.leftCols(k);
    return out;
}

}  // namespace detail

/// Singular value thresholding: the proximal operator of tau * nuclear norm.
/// Singular values are shrunk by tau and zeros dropped from the factors.
inline LowRankEstimate svt(const Eigen::MatrixXd& x, double tau) {
    if (tau < 0.0) throw std::invalid_argument("svt: tau must be nonnegative");
    return detail::soft_threshold(dense_svd(x), tau);
}

/// svt for an implicit operator with the rank capped at opts.k; uses the full
/// dense SVD for small shapes and block power iteration otherwise.
template <class Op>
LowRankEstimate svt_operator(const Op& op, double tau, const PartialSvdOptions& opts) {
    if (tau < 0.0) throw std::invalid_argument("svt: tau must be nonnegative");
    const Eigen::Index m = op.rows();
    const Eigen::Index n = op.cols();
    LowRankEstimate out;
    if (std::min(m, n) < 500 && m * n <= 1'000'000) {
        const Eigen::MatrixXd dense = op.multiply(Eigen::MatrixXd::Identity(n, n));
        out = detail::soft_threshold(dense_svd(dense), tau);
    } else {
        out = detail::soft_threshold(partial_svd(op, opts), tau);
    }
    if (out.rank() > opts.k) {
        out.U = out.U.leftCols(opts.k).eval();
        out.sv = out.sv.head(opts.k).eval();
        out.V = out.V.leftCols(opts.k).eval();
    }
    return out;
}

}  // namespace scalestat
