#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <vector>

#include "scalestat/convex/body.hpp"
#include "scalestat/convex/nnls.hpp"
#include "scalestat/convex/polytope.hpp"
#include "scalestat/core/rng.hpp"

namespace scalestat {

/// Tangent cone model at an apex point: the conic hull of the stored
/// generator directions {b - apex}. Generators are normalized to unit length
/// (the cone is scale invariant) and near-zero directions are dropped.
struct ConeModel {
    Eigen::VectorXd apex;
    Eigen::MatrixXd generators;  // p x N, unit columns
    bool sampled = false;        // true when generators only approximate the cone

    Eigen::Index dim() const { return apex.size(); }
    Eigen::Index generator_count() const { return generators.cols(); }

    ConeProjection project(const Eigen::VectorXd& z, double tol = 1e-8,
                           int max_iters = 20000) const {
        return nnls_cone_project(generators, z, tol, max_iters);
    }

    static ConeModel from_directions(const Eigen::VectorXd& apex,
                                     const std::vector<Eigen::VectorXd>& directions,
                                     bool sampled_flag = false, double drop_tol = 1e-12) {
        ConeModel cone;
        cone.apex = apex;
        cone.sampled = sampled_flag;
        std::vector<Eigen::VectorXd> kept;
        kept.reserve(directions.size());
        for (const auto& d : directions) {
            const double nd = d.norm();
            if (nd > drop_tol) kept.push_back(d / nd);
        }
        cone.generators.resize(apex.size(), static_cast<Eigen::Index>(kept.size()));
        for (std::size_t i = 0; i < kept.size(); ++i)
            cone.generators.col(static_cast<Eigen::Index>(i)) = kept[i];
        return cone;
    }

    /// The full space R^p as a cone (generators +-e_i); projection is exact.
    static ConeModel full_space(Eigen::Index p) {
        ConeModel cone;
        cone.apex = Eigen::VectorXd::Zero(p);
        cone.generators.resize(p, 2 * p);
        cone.generators.leftCols(p) = Eigen::MatrixXd::Identity(p, p);
        cone.generators.rightCols(p) = -Eigen::MatrixXd::Identity(p, p);
        return cone;
    }
};

/// Exact tangent cone of a polytope at a point of it: generators are the
/// directions from x_star to every vertex.
inline ConeModel tangent_cone_polytopal(const std::vector<Eigen::VectorXd>& vertices,
                                        const Eigen::VectorXd& x_star,
                                        double membership_tol = 1e-6) {
    bool member = false;
    for (const auto& v : vertices) {
        if ((v - x_star).norm() <= membership_tol) {
            member = true;
            break;
        }
    }
    if (!member) {
        // Not a vertex: fall back to a full hull membership test.
        const Projection pr = project_polytope(x_star, vertices);
        if ((pr.point - x_star).norm() > membership_tol)
            throw std::invalid_argument("tangent_cone: x_star not in the body");
    }
    std::vector<Eigen::VectorXd> dirs;
    dirs.reserve(vertices.size());
    for (const auto& v : vertices) dirs.push_back(v - x_star);
    return ConeModel::from_directions(x_star, dirs, /*sampled=*/false);
}

/// Sampled tangent cone of a general convex body at x_star: boundary points
/// are obtained by projecting x_star + scale * g for random Gaussian
/// directions g; extra known member points of the body may be supplied
/// (e.g. the other signal vertices, or a tighter body's generators when
/// testing a nested hierarchy). The result is an inner approximation of the
/// true cone, so complexity estimates built from it are lower bounds.
inline ConeModel tangent_cone_sampled(const ConvexBody& body, const Eigen::VectorXd& x_star,
                                      int n_gen, RngStream rng, double scale = 0.0,
                                      const std::vector<Eigen::VectorXd>& extra_points = {},
                                      double membership_tol = 1e-6) {
    if (!body.contains(x_star, membership_tol))
        throw std::invalid_argument("tangent_cone: x_star not in the body");
    if (scale <= 0.0) scale = 1.0 + x_star.norm();
    std::vector<Eigen::VectorXd> dirs;
    dirs.reserve(static_cast<std::size_t>(n_gen) + extra_points.size());
    for (int i = 0; i < n_gen; ++i) {
        const Eigen::VectorXd g = rng.normal_vector(body.dim());
        dirs.push_back(body.project(x_star + scale * g).point - x_star);
    }
    for (const auto& b : extra_points) dirs.push_back(b - x_star);
    return ConeModel::from_directions(x_star, dirs, /*sampled=*/true);
}

/// True when the cone's generators positively span R^p, i.e. the apex is an
/// interior point and the tangent cone is the full space. Checked by NNLS
/// feasibility on the +- basis vectors.
inline bool positively_spans(const ConeModel& cone, double tol = 1e-6) {
    const Eigen::Index p = cone.dim();
    for (Eigen::Index i = 0; i < p; ++i) {
        for (const double sign : {1.0, -1.0}) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(p);
            e[i] = sign;
            const ConeProjection pr = cone.project(e);
            if ((pr.point - e).norm() > tol) return false;
        }
    }
    return true;
}

}  // namespace scalestat
