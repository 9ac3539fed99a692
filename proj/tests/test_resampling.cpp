#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "scalestat/bench/synthetic.hpp"
#include "scalestat/resampling/resampling.hpp"

using namespace scalestat;

namespace {

Dataset scalar_dataset(std::initializer_list<double> values) {
    Dataset ds;
    ds.features.resize(static_cast<Eigen::Index>(values.size()), 1);
    Eigen::Index i = 0;
    for (const double v : values) ds.features(i++, 0) = v;
    return ds;
}

EstimatorSpec mean_spec(Eigen::Index d = 1) {
    EstimatorSpec s;
    s.kind = EstimatorKind::mean;
    s.dim = d;
    return s;
}

// Two-sample Kolmogorov-Smirnov statistic (test oracle).
double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        const double fa = static_cast<double>(i) / a.size();
        const double fb = static_cast<double>(j) / b.size();
        d = std::max(d, std::abs(fa - fb));
    }
    return d;
}

// Exhaustive enumeration of all n^n with-replacement resamples of a tiny
// dataset; returns the exact SD of the resampled mean.
double exact_bootstrap_sd(const std::vector<double>& data) {
    const std::size_t n = data.size();
    std::vector<std::size_t> pick(n, 0);
    double sum = 0.0, sq = 0.0;
    std::size_t count = 0;
    for (;;) {
        double mean = 0.0;
        for (const auto idx : pick) mean += data[idx];
        mean /= static_cast<double>(n);
        sum += mean;
        sq += mean * mean;
        ++count;
        std::size_t c = 0;
        while (c < n && ++pick[c] == n) pick[c++] = 0;
        if (c == n) break;
    }
    const double m = sum / count;
    return std::sqrt(sq / count - m * m);
}

}  // namespace

TEST_CASE("bootstrap: enumeration oracle on {1,2,3} (27 resamples)") {
    const std::vector<double> data{1, 2, 3};
    const double exact = exact_bootstrap_sd(data);
    REQUIRE(exact == Catch::Approx(std::sqrt(2.0 / 9.0)).epsilon(1e-12));

    const Dataset ds = scalar_dataset({1, 2, 3});
    const ResampleRun run = bootstrap(ds, mean_spec(), 100000, RngStream(1234, 0), 0.05, 2);
    double sum = 0.0, sq = 0.0;
    for (const auto& e : run.estimates) {
        sum += e[0];
        sq += e[0] * e[0];
    }
    const double mc_sd = std::sqrt(sq / run.estimates.size() -
                                   (sum / run.estimates.size()) * (sum / run.estimates.size()));
    REQUIRE(std::abs(mc_sd - exact) / exact < 0.01);
}

TEST_CASE("bootstrap: degenerate dataset of identical rows gives zero widths") {
    const Dataset ds = scalar_dataset({4, 4, 4, 4});
    const ResampleRun run = bootstrap(ds, mean_spec(), 50, RngStream(9, 0));
    REQUIRE(run.quality.widths.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("bootstrap: work units are exactly B * n") {
    const Dataset ds = scalar_dataset({1, 2, 3, 4, 5});
    const ResampleRun run = bootstrap(ds, mean_spec(), 64, RngStream(2, 0));
    REQUIRE(run.quality.work_units == 64.0 * 5.0);
}

TEST_CASE("blb: work units are exactly s * r * m; averaging is the exact mean") {
    RngStream rng(77, 0);
    Dataset ds;
    ds.features = rng.normal_matrix(200, 2);
    BlbConfig cfg;
    cfg.gamma = 0.6;
    cfg.s = 7;
    cfg.r = 25;
    cfg.threads = 3;
    const BlbRun run = blb(ds, mean_spec(2), cfg, RngStream(5, 0));
    const Eigen::Index m = cfg.subsample_size(200);
    REQUIRE(run.m == m);
    REQUIRE(run.quality.work_units == 7.0 * 25.0 * static_cast<double>(m));
    REQUIRE(run.quality.dropped_subsamples == 0);
    REQUIRE(static_cast<int>(run.subsample_widths.size()) == cfg.s);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(2);
    for (const auto& w : run.subsample_widths) acc += w;
    REQUIRE((run.quality.widths - acc / 7.0).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("blb: s=1, r=2 on a constant dataset gives zero widths") {
    const Dataset ds = scalar_dataset({2, 2, 2, 2, 2, 2});
    BlbConfig cfg;
    cfg.s = 1;
    cfg.r = 2;
    const BlbRun run = blb(ds, mean_spec(), cfg, RngStream(3, 0));
    REQUIRE(run.quality.widths.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("blb: m=n, s=1, multinomial reduction equals bootstrap in law (KS oracle)") {
    RngStream data_rng(41, 0);
    Dataset ds;
    ds.features = data_rng.normal_vector(20);

    BlbConfig cfg;
    cfg.m_explicit = 20;
    cfg.s = 1;
    cfg.r = 4000;
    cfg.weighting = Weighting::multinomial;

    // Capture the inner estimates by running the subsample quality helper the
    // same way blb() does.
    RngStream rng(1212, 0);
    RngStream outer = rng.child(0);
    const auto indices = subsample_indices(20, 20, outer);
    std::vector<double> blb_means;
    for (int j = 0; j < cfg.r; ++j) {
        RngStream inner = outer.child(1).child(static_cast<std::uint64_t>(j));
        WeightedSample sample;
        sample.indices = indices;
        sample.weights = multinomial_weights(20, 20, inner);
        sample.nominal_size = 20;
        blb_means.push_back(fit(mean_spec(), ds, sample)[0]);
    }

    const ResampleRun boot = bootstrap(ds, mean_spec(), 4000, RngStream(777, 0));
    std::vector<double> boot_means;
    for (const auto& e : boot.estimates) boot_means.push_back(e[0]);

    REQUIRE(ks_statistic(blb_means, boot_means) < 0.035);
}

TEST_CASE("blb: deterministic under fixed stream regardless of thread count") {
    RngStream data_rng(51, 0);
    Dataset ds;
    ds.features = data_rng.normal_matrix(300, 2);
    BlbConfig cfg;
    cfg.gamma = 0.7;
    cfg.s = 6;
    cfg.r = 12;
    cfg.threads = 1;
    const BlbRun a = blb(ds, mean_spec(2), cfg, RngStream(8, 8));
    cfg.threads = 4;
    const BlbRun b = blb(ds, mean_spec(2), cfg, RngStream(8, 8));
    REQUIRE((a.quality.widths - b.quality.widths).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("bootstrap: deterministic and schedule independent") {
    RngStream data_rng(52, 0);
    Dataset ds;
    ds.features = data_rng.normal_vector(50);
    const ResampleRun a = bootstrap(ds, mean_spec(), 40, RngStream(6, 0), 0.05, 1);
    const ResampleRun b = bootstrap(ds, mean_spec(), 40, RngStream(6, 0), 0.05, 4);
    for (std::size_t i = 0; i < a.estimates.size(); ++i)
        REQUIRE(a.estimates[i][0] == b.estimates[i][0]);
}

TEST_CASE("m_out_of_n: m=n with replacement has correction factor 1") {
    RngStream data_rng(53, 0);
    Dataset ds;
    ds.features = data_rng.normal_vector(30);
    const ResampleRun run = m_out_of_n(ds, mean_spec(), 30, 500, true, RngStream(4, 0));
    // Correction sqrt(m/n) = 1: corrected widths equal the raw interval widths.
    REQUIRE((run.quality.widths - run.quality.interval->widths()).cwiseAbs().maxCoeff() == 0.0);

    // Same law as the bootstrap: KS between the two estimate clouds is small.
    const ResampleRun boot = bootstrap(ds, mean_spec(), 500, RngStream(44, 0));
    std::vector<double> a, b;
    for (const auto& e : run.estimates) a.push_back(e[0]);
    for (const auto& e : boot.estimates) b.push_back(e[0]);
    double ks = 0.0;
    {
        std::vector<double> sa = a, sb = b;
        std::sort(sa.begin(), sa.end());
        std::sort(sb.begin(), sb.end());
        std::size_t i = 0, j = 0;
        while (i < sa.size() && j < sb.size()) {
            if (sa[i] <= sb[j])
                ++i;
            else
                ++j;
            ks = std::max(ks, std::abs(static_cast<double>(i) / sa.size() -
                                       static_cast<double>(j) / sb.size()));
        }
    }
    REQUIRE(ks < 0.1);
}

TEST_CASE("m_out_of_n: CLT scaling oracle on the sample mean") {
    // n=10^4 N(0,1) rows, m=100: uncorrected widths are ~ sqrt(n/m) = 10x the
    // bootstrap widths; corrected widths land within 10%.
    RngStream data_rng(54, 0);
    Dataset ds;
    ds.features = data_rng.normal_vector(10000);
    const int B = 1000;
    const ResampleRun moon = m_out_of_n(ds, mean_spec(), 100, B, true, RngStream(11, 0), 0.05, 2);
    const ResampleRun boot = bootstrap(ds, mean_spec(), B, RngStream(12, 0), 0.05, 2);
    const double corrected = moon.quality.widths[0];
    const double uncorrected = moon.quality.interval->widths()[0];
    const double boot_width = boot.quality.widths[0];
    REQUIRE(uncorrected / boot_width == Catch::Approx(10.0).epsilon(0.15));
    REQUIRE(std::abs(corrected - boot_width) / boot_width < 0.10);
}

TEST_CASE("m_out_of_n: m=1 degenerates to single points scaled by sqrt(1/n)") {
    const Dataset ds = scalar_dataset({0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
    const ResampleRun run = m_out_of_n(ds, mean_spec(), 1, 400, true, RngStream(21, 0));
    // Estimates are raw data points; corrected width = raw spread x sqrt(1/10).
    const double raw_width = run.quality.interval->widths()[0];
    REQUIRE(run.quality.widths[0] == Catch::Approx(raw_width * std::sqrt(0.1)));
    for (const auto& e : run.estimates)
        REQUIRE(std::abs(e[0] - std::round(e[0])) < 1e-12);
}

TEST_CASE("blb-style procedures propagate fit failures per policy") {
    // A dataset whose regressions are always rank deficient: bootstrap
    // propagates the error, BLB drops subsamples and reports.
    Dataset ds;
    ds.features = Eigen::MatrixXd::Zero(10, 2);  // identically zero design
    Eigen::VectorXd y(10);
    for (Eigen::Index i = 0; i < 10; ++i) y[i] = static_cast<double>(i % 2);
    ds.response = y;
    EstimatorSpec logit;
    logit.kind = EstimatorKind::logistic_regression;
    logit.dim = 2;

    REQUIRE_THROWS_AS(bootstrap(ds, logit, 4, RngStream(2, 2)), NumericalError);

    BlbConfig cfg;
    cfg.s = 2;
    cfg.r = 3;
    REQUIRE_THROWS_WITH(blb(ds, logit, cfg, RngStream(2, 2)), "blb: every subsample failed");
}
