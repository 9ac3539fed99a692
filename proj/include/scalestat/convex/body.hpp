#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

namespace scalestat {

/// Result of a Euclidean projection. Iterative projections report their
/// convergence state and the certificate they achieved (duality gap or
/// iterate change, method dependent).
struct Projection {
    Eigen::VectorXd point;
    bool converged = true;
    double gap = 0.0;
    int iterations = 0;
};

/// Abstract convex set in R^p exposing Euclidean projection, a
/// linear-maximization (extreme point) oracle and membership testing.
class ConvexBody {
public:
    virtual ~ConvexBody() = default;

    virtual Eigen::Index dim() const = 0;
    virtual Projection project(const Eigen::VectorXd& x) const = 0;
    virtual Eigen::VectorXd linear_max(const Eigen::VectorXd& direction) const = 0;
    virtual bool contains(const Eigen::VectorXd& x, double tol) const = 0;
};

/// All of R^p. Projection is the identity; linear maximization is unbounded.
class FullSpaceBody final : public ConvexBody {
public:
    explicit FullSpaceBody(Eigen::Index p) : p_(p) {}

    Eigen::Index dim() const override { return p_; }

    Projection project(const Eigen::VectorXd& x) const override {
        return Projection{x, true, 0.0, 0};
    }

    Eigen::VectorXd linear_max(const Eigen::VectorXd&) const override {
        throw std::logic_error("FullSpaceBody: linear maximization is unbounded");
    }

    bool contains(const Eigen::VectorXd& x, double) const override { return x.size() == p_; }

private:
    Eigen::Index p_;
};

class SingletonBody final : public ConvexBody {
public:
    explicit SingletonBody(Eigen::VectorXd point) : point_(std::move(point)) {}

    Eigen::Index dim() const override { return point_.size(); }

    Projection project(const Eigen::VectorXd&) const override {
        return Projection{point_, true, 0.0, 0};
    }

    Eigen::VectorXd linear_max(const Eigen::VectorXd&) const override { return point_; }

    bool contains(const Eigen::VectorXd& x, double tol) const override {
        return (x - point_).norm() <= tol;
    }

private:
    Eigen::VectorXd point_;
};

class L2BallBody final : public ConvexBody {
public:
    L2BallBody(Eigen::Index p, double radius) : p_(p), radius_(radius) {
        if (radius <= 0.0) throw std::invalid_argument("L2BallBody: radius must be positive");
    }

    Eigen::Index dim() const override { return p_; }

    Projection project(const Eigen::VectorXd& x) const override {
        const double nx = x.norm();
        if (nx <= radius_) return Projection{x, true, 0.0, 0};
        return Projection{x * (radius_ / nx), true, 0.0, 0};
    }

    Eigen::VectorXd linear_max(const Eigen::VectorXd& direction) const override {
        const double nd = direction.norm();
        if (nd == 0.0) return Eigen::VectorXd::Zero(p_);
        return direction * (radius_ / nd);
    }

    bool contains(const Eigen::VectorXd& x, double tol) const override {
        return x.norm() <= radius_ + tol;
    }

private:
    Eigen::Index p_;
    double radius_;
};

/// Axis-aligned box [lo, hi]^p (default the unit hypercube [0,1]^p).
class BoxBody final : public ConvexBody {
public:
    explicit BoxBody(Eigen::Index p, double lo = 0.0, double hi = 1.0)
        : p_(p), lo_(lo), hi_(hi) {
        if (!(lo < hi)) throw std::invalid_argument("BoxBody: lo must be < hi");
    }

    Eigen::Index dim() const override { return p_; }

    Projection project(const Eigen::VectorXd& x) const override {
        return Projection{x.cwiseMax(lo_).cwiseMin(hi_), true, 0.0, 0};
    }

    Eigen::VectorXd linear_max(const Eigen::VectorXd& direction) const override {
        Eigen::VectorXd v(p_);
        for (Eigen::Index i = 0; i < p_; ++i) v[i] = direction[i] > 0.0 ? hi_ : lo_;
        return v;
    }

    bool contains(const Eigen::VectorXd& x, double tol) const override {
        return (x.array() >= lo_ - tol).all() && (x.array() <= hi_ + tol).all();
    }

    /// All 2^p corners; p is capped because the count is exponential.
    std::vector<Eigen::VectorXd> vertices() const {
        if (p_ > 20) throw std::invalid_argument("BoxBody: too many vertices to enumerate");
        std::vector<Eigen::VectorXd> out;
        out.reserve(std::size_t{1} << p_);
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << p_); ++mask) {
            Eigen::VectorXd v(p_);
            for (Eigen::Index i = 0; i < p_; ++i) v[i] = (mask >> i) & 1 ? hi_ : lo_;
            out.push_back(std::move(v));
        }
        return out;
    }

private:
    Eigen::Index p_;
    double lo_, hi_;
};

}  // namespace scalestat
