#pragma once

#include <Eigen/Core>
#include <cmath>
#include <utility>

#include "scalestat/core/dataset.hpp"
#include "scalestat/core/observed_matrix.hpp"
#include "scalestat/core/rng.hpp"
#include "scalestat/core/sampling.hpp"
#include "scalestat/estimators/estimators.hpp"
#include "scalestat/matcomp/low_rank.hpp"
#include "scalestat/matcomp/svd.hpp"

namespace scalestat {

/// Fixed, dimension-dependent coefficient pattern used for synthetic
/// regression problems: alternating signs, magnitudes spread over [0.5, 1.5].
inline Eigen::VectorXd synthetic_coefficients(Eigen::Index d) {
    Eigen::VectorXd beta(d);
    for (Eigen::Index j = 0; j < d; ++j) {
        const double mag = 0.5 + static_cast<double>(j % 5) * 0.25;
        beta[j] = (j % 2 == 0) ? mag : -mag;
    }
    return beta;
}

/// Synthetic logistic-regression dataset: standard normal design, Bernoulli
/// response with success probability sigmoid(x . beta).
inline Dataset make_logistic_dataset(Eigen::Index n, Eigen::Index d, RngStream rng) {
    const Eigen::VectorXd beta = synthetic_coefficients(d);
    Dataset ds;
    ds.features = rng.normal_matrix(n, d);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double prob = detail::sigmoid(ds.features.row(i).dot(beta));
        y[i] = rng.uniform() < prob ? 1.0 : 0.0;
    }
    ds.response = std::move(y);
    return ds;
}

/// Synthetic one-dimensional standard normal dataset (for mean estimators).
inline Dataset make_normal_dataset(Eigen::Index n, RngStream rng) {
    Dataset ds;
    ds.features = rng.normal_vector(n);
    return ds;
}

/// Low-rank-plus-noise completion instance: L0 = A B^T / sqrt(rank) has
/// entries of unit variance; a uniformly sampled fraction of the entries is
/// observed with N(0, noise_sigma^2) noise.
struct LowRankProblem {
    Eigen::MatrixXd left;   // m x rank, L0 = left * right^T
    Eigen::MatrixXd right;  // n x rank
    ObservedMatrix observed;

    double l0_frob_sq() const {
        return ((left.transpose() * left) * (right.transpose() * right)).trace();
    }
};

inline LowRankProblem make_low_rank_problem(Eigen::Index m, Eigen::Index n, Eigen::Index rank,
                                            double noise_sigma, double observed_fraction,
                                            RngStream rng) {
    if (!(observed_fraction > 0.0 && observed_fraction <= 1.0))
        throw std::invalid_argument("make_low_rank_problem: observed_fraction in (0,1]");
    LowRankProblem prob;
    const double scale = 1.0 / std::sqrt(std::sqrt(static_cast<double>(rank)));
    prob.left = rng.normal_matrix(m, rank) * scale;
    prob.right = rng.normal_matrix(n, rank) * scale;

    const auto total = static_cast<std::int64_t>(m) * static_cast<std::int64_t>(n);
    auto s = static_cast<std::int64_t>(std::llround(observed_fraction * static_cast<double>(total)));
    if (s < 1) s = 1;
    const auto omega = sample_omega(m, n, s, rng);
    prob.observed.rows = m;
    prob.observed.cols = n;
    prob.observed.values.resize(static_cast<Eigen::Index>(omega.size()));
    prob.observed.omega_i.reserve(omega.size());
    prob.observed.omega_j.reserve(omega.size());
    for (std::size_t t = 0; t < omega.size(); ++t) {
        const auto [i, j] = omega[t];
        prob.observed.omega_i.push_back(i);
        prob.observed.omega_j.push_back(j);
        prob.observed.values[static_cast<Eigen::Index>(t)] =
            prob.left.row(i).dot(prob.right.row(j)) + noise_sigma * rng.normal();
    }
    return prob;
}

/// Benchmark solver policy for noisy completion: penalized mode with the
/// penalty driven to a small fraction of lambda_max under the configured rank
/// cap (the usual accelerated-proximal-gradient default; the residual-budget
/// constrained mode over-shrinks the factors at desk scale).
inline double default_completion_lambda(const ObservedMatrix& observed) {
    return 1e-4 * spectral_norm(observed.to_sparse());
}

/// RMSE of a factored estimate against the factored ground truth, computed
/// through small Gram products (the m x n matrices are never formed).
inline double rmse_against_truth(const LowRankEstimate& est, const LowRankProblem& prob) {
    const double est_sq = est.frob_norm_sq();
    const double truth_sq = prob.l0_frob_sq();
    double cross = 0.0;
    if (est.rank() > 0) {
        const Eigen::MatrixXd ua = est.U.transpose() * prob.left;    // k x r
        const Eigen::MatrixXd vb = est.V.transpose() * prob.right;   // k x r
        cross = (est.sv.asDiagonal() * ua).cwiseProduct(vb).sum();
    }
    const double total = static_cast<double>(est.rows()) * static_cast<double>(est.cols());
    const double frob_sq = std::max(0.0, est_sq + truth_sq - 2.0 * cross);
    return std::sqrt(frob_sq / total);
}

}  // namespace scalestat
