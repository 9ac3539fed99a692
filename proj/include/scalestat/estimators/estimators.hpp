#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "scalestat/core/dataset.hpp"
#include "scalestat/core/error.hpp"
#include "scalestat/core/weighted_sample.hpp"

namespace scalestat {

enum class EstimatorKind { mean, linear_regression, logistic_regression };

struct EstimatorSpec {
    EstimatorKind kind = EstimatorKind::mean;
    Eigen::Index dim = 0;
    // IRLS controls (logistic only). The ridge jitter keeps the normal
    // equations solvable when a resample concentrates weight on few rows.
    double tol = 1e-8;
    int max_iters = 100;
    double ridge = 1e-8;

    bool needs_response() const { return kind != EstimatorKind::mean; }
};

namespace detail {

inline double sigmoid(double t) {
    if (t >= 0.0) {
        const double e = std::exp(-t);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(t);
    return e / (1.0 + e);
}

struct Restricted {
    Eigen::MatrixXd x;  // k x d rows of the design at the sampled indices
    Eigen::VectorXd y;  // empty when no response needed
    Eigen::VectorXd w;
};

inline Restricted restrict_rows(const EstimatorSpec& spec, const Dataset& data,
                                const WeightedSample& sample) {
    sample.validate(data.n());
    if (data.dim() != spec.dim)
        throw std::invalid_argument("fit: dataset dimension does not match spec");
    if (spec.needs_response() && !data.response)
        throw std::invalid_argument("fit: estimator requires a response column");
    if (!(sample.weights.array() > 0.0).any())
        throw std::invalid_argument("fit: weights must not all be zero");
    Restricted r;
    const Eigen::Index k = sample.size();
    r.x.resize(k, data.dim());
    r.w = sample.weights;
    if (spec.needs_response()) r.y.resize(k);
    for (Eigen::Index t = 0; t < k; ++t) {
        const Eigen::Index row = sample.indices[static_cast<std::size_t>(t)];
        r.x.row(t) = data.features.row(row);
        if (spec.needs_response()) r.y[t] = (*data.response)[row];
    }
    return r;
}

inline void require_full_rank(const Eigen::MatrixXd& x, const Eigen::VectorXd& w) {
    const Eigen::MatrixXd wx = w.array().sqrt().matrix().asDiagonal() * x;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(wx);
    if (qr.rank() < x.cols())
        throw SingularDesignError("fit: weighted design matrix is rank deficient");
}

}  // namespace detail

/// Weighted point estimator: the plug-in functional applied to a weighted
/// resample. Mean and weighted least squares are closed form; logistic
/// regression runs IRLS to gradient norm <= spec.tol.
inline Eigen::VectorXd fit(const EstimatorSpec& spec, const Dataset& data,
                           const WeightedSample& sample) {
    const auto r = detail::restrict_rows(spec, data, sample);
    switch (spec.kind) {
        case EstimatorKind::mean: {
            return (r.x.transpose() * r.w) / r.w.sum();
        }
        case EstimatorKind::linear_regression: {
            detail::require_full_rank(r.x, r.w);
            const Eigen::VectorXd sw = r.w.array().sqrt();
            const Eigen::MatrixXd wx = sw.asDiagonal() * r.x;
            const Eigen::VectorXd wy = sw.asDiagonal() * r.y;
            return wx.colPivHouseholderQr().solve(wy);
        }
        case EstimatorKind::logistic_regression: {
            if (((r.y.array() != 0.0) && (r.y.array() != 1.0)).any())
                throw std::invalid_argument("fit: logistic response must be 0/1");
            detail::require_full_rank(r.x, r.w);
            const Eigen::Index d = r.x.cols();
            Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
            for (int it = 0; it < spec.max_iters; ++it) {
                const Eigen::VectorXd eta = r.x * beta;
                Eigen::VectorXd p(eta.size());
                for (Eigen::Index i = 0; i < eta.size(); ++i) p[i] = detail::sigmoid(eta[i]);
                const Eigen::VectorXd grad = r.x.transpose() * (r.w.array() * (r.y - p).array()).matrix();
                if (grad.norm() <= spec.tol) return beta;
                const Eigen::VectorXd s = r.w.array() * p.array() * (1.0 - p.array());
                Eigen::MatrixXd h = r.x.transpose() * s.asDiagonal() * r.x;
                h.diagonal().array() += spec.ridge;
                beta += h.ldlt().solve(grad);
            }
            throw NonConvergenceError("fit: IRLS did not reach gradient tolerance", beta);
        }
    }
    throw std::logic_error("fit: unknown estimator kind");
}

}  // namespace scalestat
