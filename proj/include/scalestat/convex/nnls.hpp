#pragma once

#include <Eigen/Core>
#include <cmath>

namespace scalestat {

struct ConeProjection {
    Eigen::VectorXd point;       // G * coeffs, the cone projection of z
    Eigen::VectorXd coeffs;      // nonnegative generator coefficients
    bool converged = false;
    int iterations = 0;
    double kkt_residual = 0.0;
};

/// Projects z onto the cone {G c : c >= 0} by solving the NNLS problem
/// min_{c >= 0} 0.5 * ||G c - z||^2 with accelerated projected gradient
/// (FISTA on the nonnegative orthant, restarted on objective increase).
/// Products are kept implicit (2 p N flops per iteration).
inline ConeProjection nnls_cone_project(const Eigen::MatrixXd& generators,
                                        const Eigen::VectorXd& z, double tol = 1e-8,
                                        int max_iters = 20000) {
    ConeProjection out;
    const Eigen::Index n_gen = generators.cols();
    if (n_gen == 0) {
        out.point = Eigen::VectorXd::Zero(z.size());
        out.coeffs.resize(0);
        out.converged = true;
        return out;
    }

    // Lipschitz constant of the gradient: ||G||_2^2 by power iteration with a
    // pseudo-random start (a structured start can lock onto a non-top
    // eigenvector of the Gram matrix), plus a safety margin.
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (Eigen::Index i = 0; i < n_gen; ++i) {
        h ^= h >> 30;
        h *= 0xbf58476d1ce4e5b9ULL;
    }
    Eigen::VectorXd v(n_gen);
    std::uint64_t state = h | 1;
    for (Eigen::Index i = 0; i < n_gen; ++i) {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        v[i] = static_cast<double>(state >> 11) * 0x1.0p-53 - 0.5;
    }
    v.normalize();
    double lip = 1.0;
    for (int it = 0; it < 200; ++it) {
        Eigen::VectorXd w = generators.transpose() * (generators * v);
        const double nw = w.norm();
        if (nw <= 0.0) break;
        w /= nw;
        const bool settled = std::abs(nw - lip) <= 1e-12 * std::max(1.0, nw);
        lip = nw;
        v = w;
        if (settled) break;
    }
    if (lip <= 0.0) lip = 1.0;
    double step = 1.0 / (1.02 * lip);
    const double scale = std::max(1.0, (generators.transpose() * z).cwiseAbs().maxCoeff());

    Eigen::VectorXd c = Eigen::VectorXd::Zero(n_gen);
    Eigen::VectorXd y = c;
    double t_momentum = 1.0;
    double obj_prev = 0.5 * z.squaredNorm();
    bool restarted_last = false;
    for (int it = 0; it < max_iters; ++it) {
        out.iterations = it + 1;

        // Optimality certificate for the cone projection pi = G c itself
        // (Moreau): the residual z - pi must make a nonpositive inner product
        // with every generator and be orthogonal to pi. This is checkable
        // without the (possibly non-unique) coefficients having settled.
        const Eigen::VectorXd point = generators * c;
        const Eigen::VectorXd resid = z - point;
        const double dual_viol = n_gen > 0
                                     ? (generators.transpose() * resid).maxCoeff()
                                     : 0.0;
        const double compl_viol = std::abs(resid.dot(point)) / std::max(1.0, point.norm());
        out.kkt_residual = std::max(dual_viol, compl_viol);
        if (out.kkt_residual <= tol * scale) {
            out.converged = true;
            break;
        }

        const Eigen::VectorXd grad = generators.transpose() * (generators * y - z);
        Eigen::VectorXd c_next = (y - step * grad).cwiseMax(0.0);
        const double obj = 0.5 * (generators * c_next - z).squaredNorm();
        if (obj > obj_prev + 1e-12 * std::max(1.0, obj_prev)) {
            if (restarted_last) step *= 0.5;  // step still too long without momentum
            y = c;
            t_momentum = 1.0;
            restarted_last = true;
            continue;
        }
        restarted_last = false;
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum));
        y = c_next + ((t_momentum - 1.0) / t_next) * (c_next - c);
        c = std::move(c_next);
        t_momentum = t_next;
        obj_prev = obj;
    }
    out.point = generators * c;
    out.coeffs = std::move(c);
    return out;
}

}  // namespace scalestat
