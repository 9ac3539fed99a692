#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "scalestat/convex/body.hpp"

namespace scalestat {

namespace detail {

inline Eigen::MatrixXd project_psd(const Eigen::MatrixXd& x) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(x);
    const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
    return eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
}

inline Eigen::MatrixXd set_unit_diagonal(Eigen::MatrixXd x) {
    x.diagonal().setOnes();
    return x;
}

}  // namespace detail

struct ElliptopeProjection {
    Eigen::MatrixXd point;
    bool converged = true;
    int iterations = 0;
};

/// Nearest (Frobenius) matrix in the elliptope {Y PSD, diag(Y) = 1} via
/// Dykstra's alternating projections between the PSD cone (eigenvalue
/// clipping) and the unit-diagonal affine set.
inline ElliptopeProjection project_elliptope(const Eigen::MatrixXd& x, double tol = 1e-8,
                                             int max_iters = 20000) {
    if (x.rows() != x.cols()) throw std::invalid_argument("project_elliptope: matrix not square");
    const Eigen::MatrixXd sym = 0.5 * (x + x.transpose());

    Eigen::MatrixXd y = sym;
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(x.rows(), x.cols());
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(x.rows(), x.cols());
    ElliptopeProjection out;
    for (int it = 0; it < max_iters; ++it) {
        const Eigen::MatrixXd ypsd = detail::project_psd(y + p);
        p = y + p - ypsd;
        const Eigen::MatrixXd ydiag = detail::set_unit_diagonal(ypsd + q);
        q = ypsd + q - ydiag;
        const double change = (ydiag - y).cwiseAbs().maxCoeff();
        // The returned iterate has an exact unit diagonal; its PSD violation
        // is bounded by how far ypsd's diagonal still is from one (Weyl).
        const double psd_gap = (ypsd.diagonal().array() - 1.0).abs().maxCoeff();
        y = ydiag;
        out.iterations = it + 1;
        if (change <= tol && psd_gap <= tol) {
            out.point = y;
            return out;
        }
    }
    out.point = y;
    out.converged = false;
    return out;
}

/// The elliptope over d x d symmetric matrices, vectorized column-major into
/// R^(d*d). Nonsymmetric inputs are symmetrized first (the projection onto a
/// set of symmetric matrices factors through the symmetric part).
class ElliptopeBody final : public ConvexBody {
public:
    explicit ElliptopeBody(Eigen::Index d, double tol = 1e-8, int max_iters = 20000)
        : d_(d), tol_(tol), max_iters_(max_iters) {}

    Eigen::Index dim() const override { return d_ * d_; }

    Projection project(const Eigen::VectorXd& x) const override {
        const Eigen::Map<const Eigen::MatrixXd> mat(x.data(), d_, d_);
        const ElliptopeProjection ep = project_elliptope(mat, tol_, max_iters_);
        Projection out;
        out.point = Eigen::Map<const Eigen::VectorXd>(ep.point.data(), ep.point.size());
        out.converged = ep.converged;
        out.iterations = ep.iterations;
        out.gap = ep.converged ? tol_ : 0.0;
        return out;
    }

    /// Iterative boundary maximizer: projected ascent on the linear
    /// objective. Returns a feasible near-maximal point (the elliptope's
    /// extreme points have no closed-form oracle).
    Eigen::VectorXd linear_max(const Eigen::VectorXd& direction) const override {
        Eigen::VectorXd cur = project(Eigen::VectorXd::Zero(d_ * d_)).point;
        const double scale = std::max(1.0, direction.norm());
        for (int it = 0; it < 50; ++it) {
            const Eigen::VectorXd next =
                project(cur + (static_cast<double>(d_) / scale) * direction).point;
            if ((next - cur).norm() <= 1e-9) return next;
            cur = next;
        }
        return cur;
    }

    bool contains(const Eigen::VectorXd& x, double tol) const override {
        const Eigen::Map<const Eigen::MatrixXd> mat(x.data(), d_, d_);
        if ((mat - mat.transpose()).cwiseAbs().maxCoeff() > tol) return false;
        if ((mat.diagonal().array() - 1.0).abs().maxCoeff() > tol) return false;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (mat + mat.transpose()));
        return eig.eigenvalues().minCoeff() >= -tol;
    }

private:
    Eigen::Index d_;
    double tol_;
    int max_iters_;
};

}  // namespace scalestat
