#pragma once

#include <Eigen/Core>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "scalestat/core/error.hpp"
#include "scalestat/convex/body.hpp"

namespace scalestat {

inline constexpr std::size_t kDefaultVertexCap = 1u << 16;

/// Euclidean projection onto conv(vertices) by Frank-Wolfe with pairwise
/// steps and exact line search. The linear-maximization oracle is a brute
/// scan over the vertex list, and the standard Frank-Wolfe duality gap is the
/// stopping certificate.
inline Projection project_polytope(const Eigen::VectorXd& x,
                                   const std::vector<Eigen::VectorXd>& vertices,
                                   double gap_tol = 1e-6, int max_iters = 200000,
                                   std::size_t vertex_cap = kDefaultVertexCap) {
    if (vertices.empty()) throw std::invalid_argument("project_polytope: empty vertex list");
    if (vertices.size() > vertex_cap)
        throw InfeasibleScaleError(
            "project_polytope: vertex count " + std::to_string(vertices.size()) +
            " exceeds the enumeration budget " + std::to_string(vertex_cap) +
            "; use a tractable relaxation of the set instead");

    const Eigen::Index p = x.size();
    for (const auto& v : vertices)
        if (v.size() != p) throw std::invalid_argument("project_polytope: dimension mismatch");

    // Start from the vertex nearest to x.
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const double d = (vertices[i] - x).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }

    std::map<std::size_t, double> active;  // vertex index -> convex weight
    active[best] = 1.0;
    Eigen::VectorXd cur = vertices[best];

    Projection out;
    for (int it = 0; it < max_iters; ++it) {
        const Eigen::VectorXd grad = cur - x;

        // Frank-Wolfe vertex: minimizes <grad, v>.
        std::size_t fw = 0;
        double fw_val = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < vertices.size(); ++i) {
            const double val = grad.dot(vertices[i]);
            if (val < fw_val) {
                fw_val = val;
                fw = i;
            }
        }
        const double gap = grad.dot(cur) - fw_val;
        out.iterations = it;
        out.gap = gap;
        if (gap <= gap_tol) {
            out.converged = true;
            break;
        }

        // Away vertex: maximizes <grad, v> over the active set.
        auto away_it = active.begin();
        double away_val = -std::numeric_limits<double>::infinity();
        for (auto a = active.begin(); a != active.end(); ++a) {
            const double val = grad.dot(vertices[a->first]);
            if (val > away_val) {
                away_val = val;
                away_it = a;
            }
        }

        // Pairwise step: move weight from the away vertex to the FW vertex.
        // Falls back to a plain FW step when the pairwise direction stalls.
        bool stepped = false;
        if (fw != away_it->first) {
            const Eigen::VectorXd dir = vertices[fw] - vertices[away_it->first];
            const double dn = dir.squaredNorm();
            if (dn > 0.0) {
                double step = -grad.dot(dir) / dn;
                const double max_step = away_it->second;
                if (step > max_step) step = max_step;
                if (step > 0.0) {
                    cur += step * dir;
                    active[fw] += step;
                    away_it->second -= step;
                    if (away_it->second <= 1e-15) active.erase(away_it);
                    stepped = true;
                }
            }
        }
        if (!stepped) {
            const Eigen::VectorXd dir = vertices[fw] - cur;
            const double dn = dir.squaredNorm();
            if (dn <= 0.0) break;
            double step = -grad.dot(dir) / dn;
            if (step <= 0.0) break;
            if (step > 1.0) step = 1.0;
            cur += step * dir;
            for (auto& [idx, wgt] : active) wgt *= (1.0 - step);
            active[fw] += step;
        }
    }
    out.point = std::move(cur);
    return out;
}

/// Convex hull of an explicit vertex list. Exact oracles by brute force;
/// practical only while the vertex count stays within the enumeration budget.
class VertexHullBody final : public ConvexBody {
public:
    explicit VertexHullBody(std::vector<Eigen::VectorXd> vertices,
                            std::size_t vertex_cap = kDefaultVertexCap, double gap_tol = 1e-6)
        : vertices_(std::move(vertices)), vertex_cap_(vertex_cap), gap_tol_(gap_tol) {
        if (vertices_.empty()) throw std::invalid_argument("VertexHullBody: empty vertex list");
        if (vertices_.size() > vertex_cap_)
            throw InfeasibleScaleError(
                "VertexHullBody: vertex count " + std::to_string(vertices_.size()) +
                " exceeds the enumeration budget " + std::to_string(vertex_cap_) +
                "; use a tractable relaxation of the set instead");
    }

    Eigen::Index dim() const override { return vertices_.front().size(); }

    Projection project(const Eigen::VectorXd& x) const override {
        return project_polytope(x, vertices_, gap_tol_, 200000, vertex_cap_);
    }

    Eigen::VectorXd linear_max(const Eigen::VectorXd& direction) const override {
        std::size_t best = 0;
        double best_val = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < vertices_.size(); ++i) {
            const double val = direction.dot(vertices_[i]);
            if (val > best_val) {
                best_val = val;
                best = i;
            }
        }
        return vertices_[best];
    }

    bool contains(const Eigen::VectorXd& x, double tol) const override {
        const Projection pr = project_polytope(x, vertices_, std::min(tol * tol, gap_tol_),
                                               200000, vertex_cap_);
        return (pr.point - x).norm() <= tol;
    }

    const std::vector<Eigen::VectorXd>& vertices() const { return vertices_; }

private:
    std::vector<Eigen::VectorXd> vertices_;
    std::size_t vertex_cap_;
    double gap_tol_;
};

}  // namespace scalestat
