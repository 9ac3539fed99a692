#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <stdexcept>
#include <vector>

#include "scalestat/convex/body.hpp"

namespace scalestat {

/// Projection of a nonnegative vector onto {x >= 0, sum(x) <= radius}
/// (Duchi et al. simplex projection when the budget is exceeded).
inline Eigen::VectorXd project_simplex_budget(const Eigen::VectorXd& v, double radius) {
    if (radius <= 0.0) throw std::invalid_argument("project_simplex_budget: radius must be > 0");
    Eigen::VectorXd clipped = v.cwiseMax(0.0);
    if (clipped.sum() <= radius) return clipped;
    std::vector<double> sorted(clipped.data(), clipped.data() + clipped.size());
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double cumsum = 0.0;
    double theta = 0.0;
    for (std::size_t j = 0; j < sorted.size(); ++j) {
        cumsum += sorted[j];
        const double candidate = (cumsum - radius) / static_cast<double>(j + 1);
        if (sorted[j] - candidate > 0.0)
            theta = candidate;
        else
            break;
    }
    return (clipped.array() - theta).cwiseMax(0.0);
}

/// Euclidean projection onto the nuclear-norm ball of the given radius: SVD,
/// project the singular values onto the simplex budget, reconstruct.
inline Eigen::MatrixXd project_nuclear_ball(const Eigen::MatrixXd& x, double radius) {
    if (radius <= 0.0) throw std::invalid_argument("project_nuclear_ball: radius must be > 0");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    if (s.sum() <= radius) return x;
    const Eigen::VectorXd shrunk = project_simplex_budget(s, radius);
    return svd.matrixU() * shrunk.asDiagonal() * svd.matrixV().transpose();
}

/// Nuclear-norm ball over rows x cols matrices, vectorized column-major into
/// R^(rows*cols).
class NuclearBallBody final : public ConvexBody {
public:
    NuclearBallBody(Eigen::Index rows, Eigen::Index cols, double radius)
        : rows_(rows), cols_(cols), radius_(radius) {
        if (radius <= 0.0) throw std::invalid_argument("NuclearBallBody: radius must be > 0");
    }

    Eigen::Index dim() const override { return rows_ * cols_; }
    double radius() const { return radius_; }

    Projection project(const Eigen::VectorXd& x) const override {
        const Eigen::Map<const Eigen::MatrixXd> mat(x.data(), rows_, cols_);
        const Eigen::MatrixXd proj = project_nuclear_ball(mat, radius_);
        Projection out;
        out.point = Eigen::Map<const Eigen::VectorXd>(proj.data(), proj.size());
        return out;
    }

    Eigen::VectorXd linear_max(const Eigen::VectorXd& direction) const override {
        // Extreme point radius * u1 v1^T along the top singular pair.
        const Eigen::Map<const Eigen::MatrixXd> mat(direction.data(), rows_, cols_);
        Eigen::BDCSVD<Eigen::MatrixXd> svd(mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Eigen::MatrixXd v =
            radius_ * svd.matrixU().col(0) * svd.matrixV().col(0).transpose();
        return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
    }

    bool contains(const Eigen::VectorXd& x, double tol) const override {
        const Eigen::Map<const Eigen::MatrixXd> mat(x.data(), rows_, cols_);
        Eigen::BDCSVD<Eigen::MatrixXd> svd(mat);
        return svd.singularValues().sum() <= radius_ + tol;
    }

private:
    Eigen::Index rows_, cols_;
    double radius_;
};

}  // namespace scalestat
