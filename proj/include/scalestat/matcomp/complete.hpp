#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "scalestat/core/observed_matrix.hpp"
#include "scalestat/matcomp/svd.hpp"
#include "scalestat/matcomp/svt.hpp"

namespace scalestat {

/// Configuration for nuclear-norm matrix completion. Exactly one of the two
/// modes is active: penalized (lambda > 0) or constrained (delta >= 0, solved
/// by bisecting lambda until the omega residual matches delta^2).
struct CompletionConfig {
    double lambda = 0.0;  // penalized mode when > 0
    double delta = -1.0;  // constrained mode when >= 0
    int max_iters = 500;
    double tol = 1e-7;  // relative objective change
    Eigen::Index k_max = 60;
    double bisect_rel_tol = 0.05;  // on |residual^2 - delta^2| / delta^2
    int bisect_max_evals = 24;

    void validate() const {
        const bool lambda_mode = lambda > 0.0;
        const bool delta_mode = delta >= 0.0;
        if (lambda_mode == delta_mode)
            throw std::invalid_argument("CompletionConfig: exactly one of lambda/delta modes");
        if (max_iters < 1 || k_max < 1)
            throw std::invalid_argument("CompletionConfig: bad iteration limits");
    }
};

struct CompletionResult {
    LowRankEstimate estimate;
    bool converged = false;
    bool delta_tol_met = true;  // only meaningful in delta mode
    int iterations = 0;         // APG iterations, summed over all stages
    double lambda = 0.0;        // penalty actually used for the returned estimate
    double objective = 0.0;     // lambda * ||L||_* + 0.5 * residual_sq
    double residual_sq = 0.0;   // sum over omega of (L - M)^2
    std::vector<double> restart_objectives;  // objective at each momentum restart
};

namespace detail {

struct CompletionWorkspace {
    const ObservedMatrix* observed = nullptr;
    Eigen::SparseMatrix<double> grad_sparse;  // structure of omega, values rewritten per step

    explicit CompletionWorkspace(const ObservedMatrix& obs) : observed(&obs) {
        grad_sparse = obs.to_sparse();
    }

    // Overwrites the sparse gradient holder with the given omega values.
    void set_sparse_values(const Eigen::VectorXd& vals) {
        // to_sparse() orders entries column-major; rebuild with triplets to
        // keep the mapping from omega order stable instead.
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(static_cast<std::size_t>(vals.size()));
        for (std::size_t k = 0; k < observed->omega_i.size(); ++k)
            trips.emplace_back(static_cast<int>(observed->omega_i[k]),
                               static_cast<int>(observed->omega_j[k]),
                               vals[static_cast<Eigen::Index>(k)]);
        grad_sparse.setFromTriplets(trips.begin(), trips.end());
    }
};

/// Accelerated proximal gradient (FISTA with restart on objective increase)
/// for min over L of lambda * ||L||_* + 0.5 * sum_omega (L - M)^2. The
/// iterate stays factored; the SVT of the momentum point is computed through
/// an implicit factored-plus-sparse operator. Step size 1 is valid because
/// the omega-restriction gradient is 1-Lipschitz.
inline CompletionResult apg_solve(CompletionWorkspace& ws, double lambda,
                                  const CompletionConfig& cfg, LowRankEstimate init) {
    const ObservedMatrix& obs = *ws.observed;
    const Eigen::Index m = obs.rows;
    const Eigen::Index n = obs.cols;
    PartialSvdOptions svd_opts;
    svd_opts.k = cfg.k_max;

    auto objective_of = [&](const LowRankEstimate& est, Eigen::VectorXd* res_out) {
        const Eigen::VectorXd vals = est.values_at(obs.omega_i, obs.omega_j);
        const Eigen::VectorXd res = vals - obs.values;
        if (res_out) *res_out = res;
        return lambda * est.nuclear_norm() + 0.5 * res.squaredNorm();
    };

    CompletionResult out;
    out.lambda = lambda;
    LowRankEstimate cur = std::move(init);
    LowRankEstimate prev = cur;
    Eigen::VectorXd res_cur;
    double obj_cur = objective_of(cur, &res_cur);
    double t_prev = 1.0, t_cur = 1.0;

    for (int it = 0; it < cfg.max_iters; ++it) {
        ++out.iterations;
        const double beta = (t_prev - 1.0) / t_cur;

        // Residual of the momentum point Y = (1+beta)*cur - beta*prev on omega.
        Eigen::VectorXd y_vals = (1.0 + beta) * cur.values_at(obs.omega_i, obs.omega_j);
        if (beta != 0.0) y_vals -= beta * prev.values_at(obs.omega_i, obs.omega_j);
        ws.set_sparse_values(y_vals - obs.values);

        FactoredPlusSparseOp op(m, n);
        op.add_term(1.0 + beta, &cur);
        op.add_term(-beta, &prev);
        op.set_sparse(-1.0, &ws.grad_sparse);

        LowRankEstimate next = svt_operator(op, lambda, svd_opts);
        Eigen::VectorXd res_next;
        const double obj_next = objective_of(next, &res_next);

        if (obj_next > obj_cur) {
            if (beta != 0.0) {
                // Momentum overshoot: restart from the current iterate.
                out.restart_objectives.push_back(obj_cur);
                t_prev = 1.0;
                t_cur = 1.0;
                prev = cur;
                continue;
            }
            // A plain prox step cannot increase the objective except through
            // the rank cap; the iterate is stationary under that cap.
            out.converged = true;
            break;
        }

        const double change = std::abs(obj_next - obj_cur);
        prev = std::move(cur);
        cur = std::move(next);
        res_cur = std::move(res_next);
        obj_cur = obj_next;
        t_prev = t_cur;
        t_cur = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_cur * t_cur));

        if (it > 0 && change <= cfg.tol * std::max(1.0, std::abs(obj_next))) {
            out.converged = true;
            break;
        }
    }

    out.estimate = std::move(cur);
    out.objective = obj_cur;
    out.residual_sq = res_cur.squaredNorm();
    return out;
}

}  // namespace detail

/// Nuclear-norm matrix completion. Penalized mode minimizes
/// lambda * ||L||_* + 0.5 * sum_omega (L - M)^2 directly; constrained mode
/// bisects lambda until the omega residual is within bisect_rel_tol of
/// delta^2 (delta = 0 runs a warm-started continuation of lambda toward 0).
/// On iteration-cap exhaustion the best iterate is returned flagged
/// non-converged.
inline CompletionResult complete(const ObservedMatrix& observed, const CompletionConfig& cfg) {
    cfg.validate();
    observed.validate();
    detail::CompletionWorkspace ws(observed);
    const Eigen::Index m = observed.rows;
    const Eigen::Index n = observed.cols;

    if (cfg.lambda > 0.0)
        return detail::apg_solve(ws, cfg.lambda, cfg, LowRankEstimate::zero(m, n));

    // Constrained (delta) mode.
    const double delta_sq = cfg.delta * cfg.delta;
    const double norm_m_sq = observed.values.squaredNorm();
    if (delta_sq >= norm_m_sq) {
        // L = 0 is feasible with zero nuclear norm, hence optimal.
        CompletionResult out;
        out.estimate = LowRankEstimate::zero(m, n);
        out.converged = true;
        out.residual_sq = norm_m_sq;
        out.lambda = spectral_norm(ws.grad_sparse);
        out.objective = 0.0;
        return out;
    }

    const double lam_max = spectral_norm(observed.to_sparse());
    int total_iters = 0;

    if (cfg.delta == 0.0) {
        // Continuation toward the minimum-nuclear-norm interpolant.
        const double lam_floor = lam_max * 1e-7;
        double lam = lam_max * 0.25;
        CompletionResult r;
        LowRankEstimate warm = LowRankEstimate::zero(m, n);
        for (;;) {
            r = detail::apg_solve(ws, lam, cfg, std::move(warm));
            total_iters += r.iterations;
            warm = r.estimate;
            if (lam <= lam_floor) break;
            lam = std::max(lam * 0.25, lam_floor);
        }
        r.iterations = total_iters;
        r.delta_tol_met = true;
        return r;
    }

    // Walk lambda down until the residual constraint is met, then bisect.
    double hi = lam_max;  // residual_sq(hi) = ||M||^2 > delta^2
    double lo = -1.0;
    double lam = lam_max * 0.25;
    CompletionResult best;
    LowRankEstimate warm = LowRankEstimate::zero(m, n);
    for (int eval = 0; eval < cfg.bisect_max_evals; ++eval) {
        CompletionResult r = detail::apg_solve(ws, lam, cfg, std::move(warm));
        total_iters += r.iterations;
        warm = r.estimate;
        best = r;
        const double rel = std::abs(r.residual_sq - delta_sq) / delta_sq;
        if (rel <= cfg.bisect_rel_tol) {
            best.iterations = total_iters;
            best.delta_tol_met = true;
            return best;
        }
        if (r.residual_sq > delta_sq) {
            hi = lam;
            lam = (lo > 0.0) ? std::sqrt(lo * hi) : lam * 0.25;
        } else {
            lo = lam;
            lam = std::sqrt(lo * hi);
        }
    }
    best.iterations = total_iters;
    best.delta_tol_met = false;
    return best;
}

/// Required sample count from the exact-recovery theorem for nuclear-norm
/// completion: 32 * mu * r * (m + n) * ln^2(m + n). Asymptotic -- routinely
/// exceeds m*n at desk scale.
inline double theorem1_sample_bound(Eigen::Index m, Eigen::Index n, double mu, Eigen::Index r) {
    if (m < 1 || n < 1 || mu <= 0.0 || r < 1)
        throw std::invalid_argument("theorem1_sample_bound: arguments must be positive");
    const double mn = static_cast<double>(m + n);
    const double lg = std::log(mn);
    return 32.0 * mu * static_cast<double>(r) * mn * lg * lg;
}

}  // namespace scalestat
