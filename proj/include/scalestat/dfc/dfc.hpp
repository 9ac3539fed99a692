#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "scalestat/core/error.hpp"
#include "scalestat/core/parallel.hpp"
#include "scalestat/core/rng.hpp"
#include "scalestat/core/timer.hpp"
#include "scalestat/matcomp/complete.hpp"

namespace scalestat {

/// Divide-Factor-Combine configuration: partition the columns into t
/// submatrices, factor each with the nuclear-norm base algorithm, combine by
/// projection onto one block's column space (or the average over all blocks
/// when ensemble is set).
struct DfcConfig {
    int t = 4;
    bool ensemble = false;
    CompletionConfig base;
    int parallelism = 1;

    void validate(Eigen::Index ncols) const {
        if (t < 1 || static_cast<Eigen::Index>(t) > ncols)
            throw std::invalid_argument("DfcConfig: t must satisfy 1 <= t <= ncols");
        base.validate();
    }
};

struct ColumnBlock {
    ObservedMatrix observed;
    std::vector<Eigen::Index> column_map;  // block column -> original column
};

struct BlockDiagnostics {
    Eigen::Index rank = 0;
    double residual_sq = 0.0;
    double wallclock_seconds = 0.0;
    int iterations = 0;
    bool converged = false;
    bool failed = false;
};

struct DfcResult {
    LowRankEstimate estimate;
    std::vector<BlockDiagnostics> blocks;
    double combine_wallclock_seconds = 0.0;
    std::vector<int> failed_blocks;
};

/// Randomly permutes the columns and splits them into t contiguous blocks
/// with sizes differing by at most one. Each block carries its omega
/// restricted and reindexed plus the map back to original column ids.
inline std::vector<ColumnBlock> partition_columns(const ObservedMatrix& observed, int t,
                                                  RngStream rng) {
    observed.validate();
    const Eigen::Index n = observed.cols;
    if (t < 1 || static_cast<Eigen::Index>(t) > n)
        throw std::invalid_argument("partition_columns: t must satisfy 1 <= t <= ncols");

    std::vector<Eigen::Index> perm(n);
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    for (Eigen::Index i = n - 1; i > 0; --i) {
        const Eigen::Index j =
            static_cast<Eigen::Index>(rng.uniform_below(static_cast<std::uint64_t>(i + 1)));
        std::swap(perm[i], perm[j]);
    }

    // Balanced block sizes: the first (n mod t) blocks get one extra column.
    std::vector<ColumnBlock> blocks(static_cast<std::size_t>(t));
    std::vector<int> block_of(n);
    std::vector<Eigen::Index> col_in_block(n);
    const Eigen::Index base_size = n / t;
    const Eigen::Index extra = n % t;
    Eigen::Index pos = 0;
    for (int b = 0; b < t; ++b) {
        const Eigen::Index size = base_size + (static_cast<Eigen::Index>(b) < extra ? 1 : 0);
        auto& block = blocks[static_cast<std::size_t>(b)];
        block.observed.rows = observed.rows;
        block.observed.cols = size;
        block.column_map.reserve(static_cast<std::size_t>(size));
        for (Eigen::Index c = 0; c < size; ++c, ++pos) {
            const Eigen::Index orig = perm[pos];
            block.column_map.push_back(orig);
            block_of[orig] = b;
            col_in_block[orig] = c;
        }
    }

    std::vector<std::vector<double>> vals(static_cast<std::size_t>(t));
    for (std::size_t k = 0; k < observed.omega_i.size(); ++k) {
        const Eigen::Index j = observed.omega_j[k];
        const int b = block_of[j];
        auto& block = blocks[static_cast<std::size_t>(b)];
        block.observed.omega_i.push_back(observed.omega_i[k]);
        block.observed.omega_j.push_back(col_in_block[j]);
        vals[static_cast<std::size_t>(b)].push_back(observed.values[static_cast<Eigen::Index>(k)]);
    }
    for (int b = 0; b < t; ++b) {
        auto& block = blocks[static_cast<std::size_t>(b)];
        block.observed.values =
            Eigen::Map<Eigen::VectorXd>(vals[static_cast<std::size_t>(b)].data(),
                                        static_cast<Eigen::Index>(vals[static_cast<std::size_t>(b)].size()));
    }
    return blocks;
}

namespace detail {

/// Column-space basis of a factored estimate, dropping directions whose
/// singular value falls below the pseudoinverse tolerance.
inline Eigen::MatrixXd colspace_basis(const LowRankEstimate& est, double rel_tol = 1e-10) {
    if (est.rank() == 0) return est.U;
    const double cutoff = rel_tol * est.sv[0];
    Eigen::Index k = 0;
    while (k < est.sv.size() && est.sv[k] > cutoff) ++k;
    return est.U.leftCols(k);
}

/// W = basis^T * [C_1 ... C_t] assembled in original column order, computed
/// blockwise from the factored estimates (never materializing m x n).
inline Eigen::MatrixXd project_rows(const Eigen::MatrixXd& basis,
                                    const std::vector<LowRankEstimate>& estimates,
                                    const std::vector<ColumnBlock>& blocks,
                                    const std::vector<char>& usable, Eigen::Index ncols) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(basis.cols(), ncols);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        if (!usable[b]) continue;
        const auto& est = estimates[b];
        if (est.rank() == 0) continue;
        const Eigen::MatrixXd wb =
            (basis.transpose() * est.U) * est.sv.asDiagonal() * est.V.transpose();
        for (std::size_t c = 0; c < blocks[b].column_map.size(); ++c)
            w.col(blocks[b].column_map[c]) = wb.col(static_cast<Eigen::Index>(c));
    }
    return w;
}

inline LowRankEstimate factor_from_projection(const Eigen::MatrixXd& basis,
                                              const Eigen::MatrixXd& w, double drop_tol = 1e-12) {
    LowRankEstimate small = dense_svd(w, drop_tol);
    LowRankEstimate out;
    out.U = basis * small.U;
    out.sv = small.sv;
    out.V = small.V;
    return out;
}

}  // namespace detail

/// Projects a factored estimate onto the column space spanned by `basis`
/// (orthonormal columns). Exposed separately so the combine step's
/// idempotence is directly testable.
inline LowRankEstimate project_onto_colspace(const Eigen::MatrixXd& basis,
                                             const LowRankEstimate& est) {
    if (est.rank() == 0) return est;
    const Eigen::MatrixXd w = (basis.transpose() * est.U) * est.sv.asDiagonal() * est.V.transpose();
    return detail::factor_from_projection(basis, w);
}

/// DFC-Proj: factor the column blocks in parallel with the base algorithm,
/// then project every block onto the column space of the first usable block
/// (ensemble: average the projections onto each block's column space).
/// t = 1 short-circuits to the base algorithm -- projecting a factorization
/// onto its own column space is the identity.
inline DfcResult dfc_proj(const ObservedMatrix& observed, const DfcConfig& cfg, RngStream rng) {
    observed.validate();
    cfg.validate(observed.cols);

    DfcResult result;
    if (cfg.t == 1) {
        Stopwatch clock;
        CompletionResult base = complete(observed, cfg.base);
        BlockDiagnostics diag;
        diag.rank = base.estimate.rank();
        diag.residual_sq = base.residual_sq;
        diag.converged = base.converged;
        diag.iterations = base.iterations;
        diag.wallclock_seconds = clock.seconds();
        result.blocks.push_back(diag);
        result.estimate = std::move(base.estimate);
        return result;
    }

    const auto blocks = partition_columns(observed, cfg.t, rng.child(0));
    const double total_omega = static_cast<double>(observed.nnz());

    std::vector<LowRankEstimate> estimates(blocks.size());
    std::vector<BlockDiagnostics> diags(blocks.size());
    parallel_for(blocks.size(), cfg.parallelism, [&](std::size_t b) {
        Stopwatch clock;
        CompletionConfig block_cfg = cfg.base;
        if (block_cfg.delta >= 0.0) {
            // Proportional noise budget: delta_b^2 = delta^2 * |omega_b| / |omega|.
            const double frac = static_cast<double>(blocks[b].observed.nnz()) / total_omega;
            block_cfg.delta = cfg.base.delta * std::sqrt(frac);
        }
        try {
            if (blocks[b].observed.nnz() == 0) {
                // Nothing observed in this block: zero is the minimizer.
                estimates[b] = LowRankEstimate::zero(blocks[b].observed.rows,
                                                     blocks[b].observed.cols);
                diags[b].converged = true;
            } else {
                CompletionResult r = complete(blocks[b].observed, block_cfg);
                estimates[b] = std::move(r.estimate);
                diags[b].rank = estimates[b].rank();
                diags[b].residual_sq = r.residual_sq;
                diags[b].converged = r.converged;
                diags[b].iterations = r.iterations;
            }
        } catch (const NumericalError&) {
            diags[b].failed = true;
        }
        diags[b].wallclock_seconds = clock.seconds();
    });

    std::vector<char> usable(blocks.size(), 1);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        if (diags[b].failed) {
            usable[b] = 0;
            result.failed_blocks.push_back(static_cast<int>(b));
        }
    }
    if (std::none_of(usable.begin(), usable.end(), [](char u) { return u != 0; }))
        throw NumericalError("dfc_proj: every submatrix factorization failed");

    Stopwatch combine_clock;
    if (!cfg.ensemble) {
        std::size_t target = 0;
        while (!usable[target]) ++target;
        const Eigen::MatrixXd basis = detail::colspace_basis(estimates[target]);
        const Eigen::MatrixXd w =
            detail::project_rows(basis, estimates, blocks, usable, observed.cols);
        result.estimate = detail::factor_from_projection(basis, w);
    } else {
        // Average of the projections onto each usable block's column space:
        // stack the per-target factored pieces and recompress once.
        const int usable_count =
            static_cast<int>(std::count(usable.begin(), usable.end(), char{1}));
        std::vector<Eigen::MatrixXd> bases;
        std::vector<Eigen::MatrixXd> ws;
        Eigen::Index total_rank = 0;
        for (std::size_t k = 0; k < blocks.size(); ++k) {
            if (!usable[k]) continue;
            Eigen::MatrixXd basis = detail::colspace_basis(estimates[k]);
            if (basis.cols() == 0) continue;
            ws.push_back(detail::project_rows(basis, estimates, blocks, usable, observed.cols));
            bases.push_back(std::move(basis));
            total_rank += bases.back().cols();
        }
        if (total_rank == 0) {
            result.estimate = LowRankEstimate::zero(observed.rows, observed.cols);
        } else {
            Eigen::MatrixXd u_cat(observed.rows, total_rank);
            Eigen::MatrixXd w_cat(total_rank, observed.cols);
            Eigen::Index at = 0;
            for (std::size_t k = 0; k < bases.size(); ++k) {
                u_cat.middleCols(at, bases[k].cols()) = bases[k];
                w_cat.middleRows(at, bases[k].cols()) =
                    ws[k] / static_cast<double>(usable_count);
                at += bases[k].cols();
            }
            Eigen::HouseholderQR<Eigen::MatrixXd> qr(u_cat);
            const Eigen::MatrixXd q =
                qr.householderQ() * Eigen::MatrixXd::Identity(observed.rows, total_rank);
            const Eigen::MatrixXd r_factor =
                qr.matrixQR().topRows(total_rank).triangularView<Eigen::Upper>();
            result.estimate = detail::factor_from_projection(q, r_factor * w_cat);
        }
    }
    result.combine_wallclock_seconds = combine_clock.seconds();
    result.blocks = std::move(diags);
    return result;
}

/// Column requirement from the DFC-Proj guarantee:
/// l >= c * mu^2 * r^2 * (m+n) * n * ln^2(m+n) / (s * eps^2). The constant c
/// is unspecified by the theory and must be supplied.
inline double theorem2_column_bound(Eigen::Index m, Eigen::Index n, double s, double mu,
                                    Eigen::Index r, double eps, double c) {
    if (m < 1 || n < 1 || s <= 0.0 || mu <= 0.0 || r < 1 || eps <= 0.0 || c <= 0.0)
        throw std::invalid_argument("theorem2_column_bound: arguments must be positive");
    const double mn = static_cast<double>(m + n);
    const double lg = std::log(mn);
    return c * mu * mu * static_cast<double>(r) * static_cast<double>(r) * mn *
           static_cast<double>(n) * lg * lg / (s * eps * eps);
}

}  // namespace scalestat
