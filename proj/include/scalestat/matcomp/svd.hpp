#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <algorithm>
#include <vector>

#include "scalestat/core/rng.hpp"
#include "scalestat/matcomp/low_rank.hpp"

namespace scalestat {

struct PartialSvdOptions {
    Eigen::Index k = 40;         // singular triplets wanted
    Eigen::Index oversample = 10;
    double tol = 1e-8;           // relative change in singular values
    int max_power_iters = 100;
};

/// Implicit m x n operator built from factored low-rank terms plus one
/// optional sparse term: A = sum coef_i * Li + sparse_coef * S.
class FactoredPlusSparseOp {
public:
    FactoredPlusSparseOp(Eigen::Index rows, Eigen::Index cols) : rows_(rows), cols_(cols) {}

    void add_term(double coef, const LowRankEstimate* est) {
        if (coef != 0.0 && est->rank() > 0) terms_.emplace_back(coef, est);
    }

    void set_sparse(double coef, const Eigen::SparseMatrix<double>* sp) {
        sparse_coef_ = coef;
        sparse_ = sp;
    }

    Eigen::Index rows() const { return rows_; }
    Eigen::Index cols() const { return cols_; }

    Eigen::MatrixXd multiply(const Eigen::MatrixXd& x) const {
        Eigen::MatrixXd y = Eigen::MatrixXd::Zero(rows_, x.cols());
        for (const auto& [coef, est] : terms_) y.noalias() += coef * est->apply(x);
        if (sparse_ && sparse_coef_ != 0.0) y.noalias() += sparse_coef_ * (*sparse_ * x);
        return y;
    }

    Eigen::MatrixXd multiply_transpose(const Eigen::MatrixXd& x) const {
        Eigen::MatrixXd y = Eigen::MatrixXd::Zero(cols_, x.cols());
        for (const auto& [coef, est] : terms_) y.noalias() += coef * est->apply_transpose(x);
        if (sparse_ && sparse_coef_ != 0.0)
            y.noalias() += sparse_coef_ * (sparse_->transpose() * x);
        return y;
    }

private:
    Eigen::Index rows_, cols_;
    std::vector<std::pair<double, const LowRankEstimate*>> terms_;
    double sparse_coef_ = 0.0;
    const Eigen::SparseMatrix<double>* sparse_ = nullptr;
};

class DenseOp {
public:
    explicit DenseOp(const Eigen::MatrixXd& a) : a_(a) {}
    Eigen::Index rows() const { return a_.rows(); }
    Eigen::Index cols() const { return a_.cols(); }
    Eigen::MatrixXd multiply(const Eigen::MatrixXd& x) const { return a_ * x; }
    Eigen::MatrixXd multiply_transpose(const Eigen::MatrixXd& x) const {
        return a_.transpose() * x;
    }

private:
    const Eigen::MatrixXd& a_;
};

/// Thin SVD of a dense matrix as a LowRankEstimate, dropping singular values
/// below drop_tol * sigma_max.
inline LowRankEstimate dense_svd(const Eigen::MatrixXd& a, double drop_tol = 0.0) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    const double cutoff = s.size() > 0 ? std::max(drop_tol * s[0], 0.0) : 0.0;
    Eigen::Index k = 0;
    while (k < s.size() && s[k] > cutoff && s[k] > 0.0) ++k;
    LowRankEstimate est;
    est.U = svd.matrixU().leftCols(k);
    est.sv = s.head(k);
    est.V = svd.matrixV().leftCols(k);
    return est;
}

/// Truncated SVD of an implicit operator by randomized block power
/// (subspace) iteration with oversampling. The starting block is seeded
/// deterministically from the operator shape so results are reproducible.
template <class Op>
LowRankEstimate partial_svd(const Op& op, const PartialSvdOptions& opts) {
    const Eigen::Index m = op.rows();
    const Eigen::Index n = op.cols();
    const Eigen::Index q = std::min(opts.k + opts.oversample, std::min(m, n));
    RngStream rng(0x5CA1E57AULL, static_cast<std::uint64_t>(m) * 131071ULL + static_cast<std::uint64_t>(n));
    Eigen::MatrixXd g = rng.normal_matrix(n, q);

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(op.multiply(g));
    Eigen::MatrixXd qmat = qr.householderQ() * Eigen::MatrixXd::Identity(m, q);
    Eigen::VectorXd prev_sv;
    Eigen::MatrixXd b;
    for (int it = 0; it < opts.max_power_iters; ++it) {
        Eigen::MatrixXd w = op.multiply_transpose(qmat);  // n x q
        Eigen::HouseholderQR<Eigen::MatrixXd> qrw(w);
        const Eigen::MatrixXd qw = qrw.householderQ() * Eigen::MatrixXd::Identity(n, q);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr2(op.multiply(qw));
        qmat = qr2.householderQ() * Eigen::MatrixXd::Identity(m, q);

        b = op.multiply_transpose(qmat).transpose();  // q x n
        Eigen::BDCSVD<Eigen::MatrixXd> bs(b);
        const Eigen::VectorXd sv = bs.singularValues();
        if (prev_sv.size() == sv.size()) {
            const double denom = std::max(1.0, sv[0]);
            if ((sv - prev_sv).cwiseAbs().maxCoeff() <= opts.tol * denom) break;
        }
        prev_sv = sv;
    }

    Eigen::BDCSVD<Eigen::MatrixXd> bs(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = bs.singularValues();
    Eigen::Index k = std::min<Eigen::Index>(opts.k, s.size());
    while (k > 0 && s[k - 1] <= 0.0) --k;
    LowRankEstimate est;
    est.U = qmat * bs.matrixU().leftCols(k);
    est.sv = s.head(k);
    est.V = bs.matrixV().leftCols(k);
    return est;
}

/// Spectral norm by power iteration (deterministic start).
inline double spectral_norm(const Eigen::SparseMatrix<double>& a, int iters = 60) {
    RngStream rng(0x0E57B4ADULL, static_cast<std::uint64_t>(a.rows()) ^
                                     (static_cast<std::uint64_t>(a.cols()) << 20));
    Eigen::VectorXd v = rng.normal_vector(a.cols());
    v.normalize();
    double sigma = 0.0;
    for (int it = 0; it < iters; ++it) {
        Eigen::VectorXd u = a * v;
        const double nu = u.norm();
        if (nu == 0.0) return 0.0;
        v = a.transpose() * (u / nu);
        const double next = v.norm();
        v /= next;
        if (std::abs(next - sigma) <= 1e-12 * std::max(1.0, next)) {
            sigma = next;
            break;
        }
        sigma = next;
    }
    return sigma;
}

}  // namespace scalestat
