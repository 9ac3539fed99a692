#pragma once

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "scalestat/core/parallel.hpp"
#include "scalestat/core/rng.hpp"
#include "scalestat/core/timer.hpp"
#include "scalestat/convex/body.hpp"

namespace scalestat {

/// Denoising instance: observe n i.i.d. copies of x_star + sigma * z. The
/// estimator only sees data through the sufficient statistic
/// ybar ~ N(x_star, (sigma^2/n) I), which is how trials are simulated.
struct DenoiseProblem {
    Eigen::VectorXd x_star;
    double sigma = 1.0;
    Eigen::Index n = 1;
    const ConvexBody* body = nullptr;

    void validate() const {
        if (sigma <= 0.0) throw std::invalid_argument("DenoiseProblem: sigma must be > 0");
        if (n < 1) throw std::invalid_argument("DenoiseProblem: n must be >= 1");
        if (body == nullptr) throw std::invalid_argument("DenoiseProblem: body missing");
        if (body->dim() != x_star.size())
            throw std::invalid_argument("DenoiseProblem: dimension mismatch");
    }
};

/// Shrinkage estimator: project the sufficient statistic onto the constraint
/// set. Non-convergent projections come back flagged with the achieved
/// certificate.
inline Projection shrink(const Eigen::VectorXd& ybar, const ConvexBody& body) {
    if (ybar.size() != body.dim()) throw std::invalid_argument("shrink: dimension mismatch");
    return body.project(ybar);
}

struct RiskEstimate {
    double risk = 0.0;  // Monte Carlo E ||x_star - shrink(ybar)||^2
    double std_error = 0.0;
    int trials = 0;
    int flagged_projections = 0;      // projections that exited non-converged
    double projection_seconds = 0.0;  // summed over trials
    long long projection_iterations = 0;
};

/// Monte Carlo risk of the shrinkage estimator at the given sample size.
inline RiskEstimate risk_mc(const DenoiseProblem& problem, int trials, RngStream rng,
                            int threads = 1) {
    if (trials < 1) throw std::invalid_argument("risk_mc: trials must be >= 1");
    problem.validate();
    const double noise_scale = problem.sigma / std::sqrt(static_cast<double>(problem.n));
    const Eigen::Index p = problem.x_star.size();

    std::vector<double> sq_err(static_cast<std::size_t>(trials));
    std::vector<double> proj_secs(static_cast<std::size_t>(trials));
    std::vector<int> proj_iters(static_cast<std::size_t>(trials));
    std::vector<char> flagged(static_cast<std::size_t>(trials), 0);
    parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t i) {
        RngStream task = rng.child(i);
        const Eigen::VectorXd ybar = problem.x_star + noise_scale * task.normal_vector(p);
        Stopwatch clock;
        const Projection pr = shrink(ybar, *problem.body);
        proj_secs[i] = clock.seconds();
        proj_iters[i] = pr.iterations;
        if (!pr.converged) flagged[i] = 1;
        sq_err[i] = (pr.point - problem.x_star).squaredNorm();
    });

    RiskEstimate out;
    out.trials = trials;
    double sum = 0.0, sq_sum = 0.0;
    for (std::size_t i = 0; i < sq_err.size(); ++i) {
        sum += sq_err[i];
        sq_sum += sq_err[i] * sq_err[i];
        out.projection_seconds += proj_secs[i];
        out.projection_iterations += proj_iters[i];
        out.flagged_projections += flagged[i];
    }
    const double n = static_cast<double>(trials);
    out.risk = sum / n;
    if (trials > 1) {
        const double var = std::max(0.0, (sq_sum - n * out.risk * out.risk) / (n - 1.0));
        out.std_error = std::sqrt(var / n);
    }
    return out;
}

}  // namespace scalestat
