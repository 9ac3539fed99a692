#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <set>

#include "scalestat/bench/synthetic.hpp"
#include "scalestat/dfc/dfc.hpp"

using namespace scalestat;

namespace {

CompletionConfig quick_base(double delta) {
    CompletionConfig cfg;
    cfg.delta = delta;
    cfg.max_iters = 250;
    cfg.k_max = 15;
    return cfg;
}

}  // namespace

TEST_CASE("partition_columns: t=1 is the whole matrix modulo a recorded permutation") {
    RngStream rng(1, 0);
    const LowRankProblem prob = make_low_rank_problem(20, 15, 2, 0.0, 0.4, rng);
    const auto blocks = partition_columns(prob.observed, 1, RngStream(5, 0));
    REQUIRE(blocks.size() == 1);
    REQUIRE(blocks[0].observed.cols == 15);
    REQUIRE(blocks[0].observed.nnz() == prob.observed.nnz());
    std::set<Eigen::Index> cols(blocks[0].column_map.begin(), blocks[0].column_map.end());
    REQUIRE(cols.size() == 15);
}

TEST_CASE("partition_columns: t=n gives single-column problems") {
    RngStream rng(2, 0);
    const LowRankProblem prob = make_low_rank_problem(10, 8, 2, 0.0, 0.9, rng);
    const auto blocks = partition_columns(prob.observed, 8, RngStream(6, 0));
    REQUIRE(blocks.size() == 8);
    for (const auto& b : blocks) REQUIRE(b.observed.cols == 1);
}

TEST_CASE("partition_columns: mapped-back omegas reunite to the original omega exactly") {
    RngStream rng(3, 0);
    for (int rep = 0; rep < 10; ++rep) {
        const auto t = static_cast<int>(1 + rng.uniform_below(7));
        const LowRankProblem prob = make_low_rank_problem(15, 13, 2, 0.1, 0.5, rng);
        const auto blocks = partition_columns(prob.observed, t, rng.child(rep));

        std::set<std::pair<Eigen::Index, Eigen::Index>> original;
        std::map<std::pair<Eigen::Index, Eigen::Index>, double> value_of;
        for (std::size_t k = 0; k < prob.observed.omega_i.size(); ++k) {
            const auto key = std::make_pair(prob.observed.omega_i[k], prob.observed.omega_j[k]);
            original.insert(key);
            value_of[key] = prob.observed.values[static_cast<Eigen::Index>(k)];
        }
        std::set<std::pair<Eigen::Index, Eigen::Index>> mapped;
        for (const auto& b : blocks) {
            for (std::size_t k = 0; k < b.observed.omega_i.size(); ++k) {
                const auto key = std::make_pair(b.observed.omega_i[k],
                                                b.column_map[static_cast<std::size_t>(
                                                    b.observed.omega_j[k])]);
                REQUIRE(mapped.insert(key).second);
                REQUIRE(value_of.at(key) == b.observed.values[static_cast<Eigen::Index>(k)]);
            }
        }
        REQUIRE(mapped == original);

        // Block sizes are balanced to within one column.
        Eigen::Index lo = prob.observed.cols, hi = 0;
        for (const auto& b : blocks) {
            lo = std::min(lo, b.observed.cols);
            hi = std::max(hi, b.observed.cols);
        }
        REQUIRE(hi - lo <= 1);
    }
}

TEST_CASE("dfc_proj: t=1 equals the base algorithm bit for bit") {
    RngStream rng(4, 0);
    const LowRankProblem prob = make_low_rank_problem(30, 24, 2, 0.05, 0.5, rng);
    DfcConfig cfg;
    cfg.t = 1;
    cfg.base = quick_base(0.05 * std::sqrt(static_cast<double>(prob.observed.nnz())));
    const DfcResult dfc = dfc_proj(prob.observed, cfg, RngStream(9, 9));
    const CompletionResult base = complete(prob.observed, cfg.base);
    REQUIRE(dfc.estimate.rank() == base.estimate.rank());
    REQUIRE((dfc.estimate.U - base.estimate.U).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE((dfc.estimate.sv - base.estimate.sv).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE((dfc.estimate.V - base.estimate.V).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dfc_proj: combine step is idempotent and bounds the rank") {
    RngStream rng(5, 0);
    const LowRankProblem prob = make_low_rank_problem(40, 32, 3, 0.05, 0.5, rng);
    DfcConfig cfg;
    cfg.t = 4;
    cfg.base = quick_base(0.05 * std::sqrt(static_cast<double>(prob.observed.nnz())));
    cfg.parallelism = 2;
    const DfcResult res = dfc_proj(prob.observed, cfg, RngStream(10, 0));
    REQUIRE(res.failed_blocks.empty());
    REQUIRE(res.blocks.size() == 4);

    // rank(L_proj) <= rank  of the projection target (first block).
    REQUIRE(res.estimate.rank() <= res.blocks[0].rank);

    // Projecting the result onto the target colspace again changes nothing.
    const Eigen::MatrixXd basis = res.estimate.U;
    const LowRankEstimate again = project_onto_colspace(basis, res.estimate);
    REQUIRE((again.reconstruct() - res.estimate.reconstruct()).norm() < 1e-8);
}

TEST_CASE("dfc_proj: ensemble rank bounded by the sum of block ranks") {
    RngStream rng(6, 0);
    const LowRankProblem prob = make_low_rank_problem(36, 30, 3, 0.1, 0.6, rng);
    DfcConfig cfg;
    cfg.t = 3;
    cfg.ensemble = true;
    cfg.base = quick_base(0.1 * std::sqrt(static_cast<double>(prob.observed.nnz())));
    const DfcResult res = dfc_proj(prob.observed, cfg, RngStream(11, 0));
    Eigen::Index rank_sum = 0;
    for (const auto& b : res.blocks) rank_sum += b.rank;
    REQUIRE(res.estimate.rank() <= rank_sum);
    REQUIRE_NOTHROW(res.estimate.validate(1e-7));
}

TEST_CASE("dfc_proj: deterministic under fixed stream regardless of parallelism") {
    RngStream rng(7, 0);
    const LowRankProblem prob = make_low_rank_problem(30, 30, 2, 0.05, 0.5, rng);
    DfcConfig cfg;
    cfg.t = 3;
    cfg.base = quick_base(0.05 * std::sqrt(static_cast<double>(prob.observed.nnz())));
    cfg.parallelism = 1;
    const DfcResult a = dfc_proj(prob.observed, cfg, RngStream(3, 1));
    cfg.parallelism = 4;
    const DfcResult b = dfc_proj(prob.observed, cfg, RngStream(3, 1));
    REQUIRE((a.estimate.reconstruct() - b.estimate.reconstruct()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("theorem2_column_bound: doubling s halves the requirement; desk-scale vacuity") {
    const double l1 = theorem2_column_bound(200, 200, 1e4, 1.0, 5, 1.0, 1.0);
    const double l2 = theorem2_column_bound(200, 200, 2e4, 1.0, 5, 1.0, 1.0);
    REQUIRE(l1 == Catch::Approx(2.0 * l2));
    const double expected =
        1.0 * 1.0 * 25.0 * 400.0 * 200.0 * std::pow(std::log(400.0), 2) / (1e4 * 1.0);
    REQUIRE(l1 == Catch::Approx(expected));
    REQUIRE(l1 > 200.0);  // bound asymptotic only at this scale

    // s growing faster than (m+n) log^2(m+n) sends l/n -> 0.
    const double l_fast = theorem2_column_bound(200, 200, 1e8, 1.0, 5, 1.0, 1.0);
    REQUIRE(l_fast / 200.0 < 0.01);
    REQUIRE_THROWS_AS(theorem2_column_bound(200, 200, 0.0, 1.0, 5, 1.0, 1.0),
                      std::invalid_argument);
}
