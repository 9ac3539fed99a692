#pragma once

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>

#include "scalestat/core/error.hpp"
#include "scalestat/core/parallel.hpp"
#include "scalestat/core/rng.hpp"
#include "scalestat/convex/tangent_cone.hpp"

namespace scalestat {

struct ComplexityEstimate {
    double value = 0.0;      // Monte Carlo estimate of G(T cap B)
    double std_error = 0.0;
    int trials = 0;          // trials that produced a value
    int dropped = 0;         // trials dropped for NNLS non-convergence
};

/// Gaussian squared-complexity of (cone cap unit ball): for a cone T the
/// supremum of <delta, z> over T cap B equals the norm of the cone projection
/// of z, so G = E ||Pi_T(z)||^2, estimated by Monte Carlo with the cone
/// projection computed by NNLS over the generators.
inline ComplexityEstimate gaussian_sq_complexity(const ConeModel& cone, int trials,
                                                 RngStream rng, int threads = 1,
                                                 double nnls_tol = 1e-8) {
    if (trials < 2) throw std::invalid_argument("gaussian_sq_complexity: trials must be >= 2");
    const Eigen::Index p = cone.dim();
    std::vector<double> values(static_cast<std::size_t>(trials));
    std::vector<char> ok(static_cast<std::size_t>(trials), 0);
    parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t i) {
        RngStream task = rng.child(i);
        const Eigen::VectorXd z = task.normal_vector(p);
        const ConeProjection pr = cone.project(z, nnls_tol);
        if (!pr.converged) return;
        ok[i] = 1;
        values[i] = pr.point.squaredNorm();
    });

    ComplexityEstimate out;
    double sum = 0.0, sq_sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!ok[i]) {
            ++out.dropped;
            continue;
        }
        sum += values[i];
        sq_sum += values[i] * values[i];
        ++out.trials;
    }
    if (out.trials < 2) throw NumericalError("gaussian_sq_complexity: too many dropped trials");
    const double n = static_cast<double>(out.trials);
    out.value = sum / n;
    const double var = std::max(0.0, (sq_sum - n * out.value * out.value) / (n - 1.0));
    out.std_error = std::sqrt(var / n);
    return out;
}

/// Sample size at which the projection estimator's risk bound drops to 1:
/// n >= sigma^2 * G(T cap B).
inline Eigen::Index sample_size_for_unit_risk(double sigma, double complexity) {
    if (sigma <= 0.0 || complexity < 0.0)
        throw std::invalid_argument("sample_size_for_unit_risk: inputs must be positive");
    return static_cast<Eigen::Index>(std::ceil(sigma * sigma * complexity));
}

}  // namespace scalestat
