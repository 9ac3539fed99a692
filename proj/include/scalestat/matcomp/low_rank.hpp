#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "scalestat/core/error.hpp"

namespace scalestat {

/// Rank-k estimate in factored form U diag(sv) V^T with orthonormal factor
/// columns and positive, nonincreasing singular values. The dense matrix is
/// only ever formed for small shapes.
struct LowRankEstimate {
    Eigen::MatrixXd U;   // m x k
    Eigen::VectorXd sv;  // k, descending, > 0
    Eigen::MatrixXd V;   // n x k

    Eigen::Index rows() const { return U.rows(); }
    Eigen::Index cols() const { return V.rows(); }
    Eigen::Index rank() const { return sv.size(); }

    static LowRankEstimate zero(Eigen::Index m, Eigen::Index n) {
        LowRankEstimate z;
        z.U.resize(m, 0);
        z.sv.resize(0);
        z.V.resize(n, 0);
        return z;
    }

    double nuclear_norm() const { return sv.sum(); }
    double frob_norm_sq() const { return sv.squaredNorm(); }

    Eigen::MatrixXd reconstruct() const {
        if (rows() * cols() > 1'000'000)
            throw std::logic_error("LowRankEstimate::reconstruct: matrix too large to materialize");
        if (rank() == 0) return Eigen::MatrixXd::Zero(rows(), cols());
        return U * sv.asDiagonal() * V.transpose();
    }

    /// Values at a list of entries, O(|omega| * k).
    Eigen::VectorXd values_at(const std::vector<Eigen::Index>& oi,
                              const std::vector<Eigen::Index>& oj) const {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(oi.size()));
        if (rank() == 0) return out;
        const Eigen::MatrixXd Us = U * sv.asDiagonal();
        for (std::size_t t = 0; t < oi.size(); ++t)
            out[static_cast<Eigen::Index>(t)] = Us.row(oi[t]).dot(V.row(oj[t]));
        return out;
    }

    Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const {
        if (rank() == 0) return Eigen::MatrixXd::Zero(rows(), x.cols());
        return U * (sv.asDiagonal() * (V.transpose() * x));
    }

    Eigen::MatrixXd apply_transpose(const Eigen::MatrixXd& x) const {
        if (rank() == 0) return Eigen::MatrixXd::Zero(cols(), x.cols());
        return V * (sv.asDiagonal() * (U.transpose() * x));
    }

    /// Frobenius inner product with another factored estimate, never forming
    /// either matrix.
    double frob_inner(const LowRankEstimate& other) const {
        if (rank() == 0 || other.rank() == 0) return 0.0;
        const Eigen::MatrixXd xu = U.transpose() * other.U;  // k1 x k2
        const Eigen::MatrixXd xv = V.transpose() * other.V;  // k1 x k2
        return (sv.asDiagonal() * xu * other.sv.asDiagonal()).cwiseProduct(xv).sum();
    }

    void validate(double tol = 1e-8) const {
        if (U.cols() != sv.size() || V.cols() != sv.size())
            throw std::invalid_argument("LowRankEstimate: factor shape mismatch");
        for (Eigen::Index i = 0; i + 1 < sv.size(); ++i)
            if (sv[i] < sv[i + 1]) throw std::invalid_argument("LowRankEstimate: sv not sorted");
        if (sv.size() > 0 && sv[sv.size() - 1] <= 0.0)
            throw std::invalid_argument("LowRankEstimate: nonpositive singular value");
        if (rank() > 0) {
            const double du = (U.transpose() * U - Eigen::MatrixXd::Identity(rank(), rank()))
                                  .cwiseAbs()
                                  .maxCoeff();
            const double dv = (V.transpose() * V - Eigen::MatrixXd::Identity(rank(), rank()))
                                  .cwiseAbs()
                                  .maxCoeff();
            if (du > tol || dv > tol)
                throw std::invalid_argument("LowRankEstimate: factors not orthonormal");
        }
    }
};

/// Subspace coherence of a factorization: mu = max over the two factors of
/// (dim / r) * max squared row norm. 1 for perfectly flat leverage, up to
/// max(m,n)/r for a spiky basis.
struct CoherenceResult {
    double mu = 0.0;
    Eigen::Index r = 0;
};

inline CoherenceResult coherence(const LowRankEstimate& est) {
    CoherenceResult out;
    out.r = est.rank();
    if (out.r == 0) return out;
    const double mu_u = est.U.rowwise().squaredNorm().maxCoeff() *
                        static_cast<double>(est.rows()) / static_cast<double>(out.r);
    const double mu_v = est.V.rowwise().squaredNorm().maxCoeff() *
                        static_cast<double>(est.cols()) / static_cast<double>(out.r);
    out.mu = std::max(mu_u, mu_v);
    return out;
}

// Plain binary array layout: 8-byte magic "SSTATBIN", two little-endian
// uint64 (rows, cols), then rows*cols row-major doubles.
inline void save_matrix_binary(const std::string& path, const Eigen::MatrixXd& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write binary file: " + path);
    const char magic[8] = {'S', 'S', 'T', 'A', 'T', 'B', 'I', 'N'};
    out.write(magic, 8);
    const std::uint64_t rows = static_cast<std::uint64_t>(m.rows());
    const std::uint64_t cols = static_cast<std::uint64_t>(m.cols());
    out.write(reinterpret_cast<const char*>(&rows), 8);
    out.write(reinterpret_cast<const char*>(&cols), 8);
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const RowMajor rm = m;
    out.write(reinterpret_cast<const char*>(rm.data()),
              static_cast<std::streamsize>(sizeof(double) * rows * cols));
}

inline Eigen::MatrixXd load_matrix_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open binary file: " + path);
    char magic[8];
    in.read(magic, 8);
    if (std::string(magic, 8) != "SSTATBIN")
        throw ConfigError("bad magic in binary file: " + path);
    std::uint64_t rows = 0, cols = 0;
    in.read(reinterpret_cast<char*>(&rows), 8);
    in.read(reinterpret_cast<char*>(&cols), 8);
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    RowMajor rm(rows, cols);
    in.read(reinterpret_cast<char*>(rm.data()),
            static_cast<std::streamsize>(sizeof(double) * rows * cols));
    if (!in) throw ConfigError("truncated binary file: " + path);
    return rm;
}

/// Exports the three factor arrays as <base>.U.bin / <base>.S.bin /
/// <base>.V.bin in the plain binary layout above.
inline void save_low_rank(const std::string& base, const LowRankEstimate& est) {
    save_matrix_binary(base + ".U.bin", est.U);
    save_matrix_binary(base + ".S.bin", est.sv);
    save_matrix_binary(base + ".V.bin", est.V);
}

inline LowRankEstimate load_low_rank(const std::string& base) {
    LowRankEstimate est;
    est.U = load_matrix_binary(base + ".U.bin");
    est.sv = load_matrix_binary(base + ".S.bin");
    est.V = load_matrix_binary(base + ".V.bin");
    return est;
}

}  // namespace scalestat
