#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "scalestat/bench/config.hpp"
#include "scalestat/bench/csv.hpp"
#include "scalestat/bench/synthetic.hpp"
#include "scalestat/convex/complexity.hpp"
#include "scalestat/convex/denoise.hpp"
#include "scalestat/convex/elliptope.hpp"
#include "scalestat/convex/nuclear_ball.hpp"
#include "scalestat/convex/polytope.hpp"
#include "scalestat/convex/signals.hpp"
#include "scalestat/convex/tangent_cone.hpp"
#include "scalestat/core/timer.hpp"
#include "scalestat/dfc/dfc.hpp"
#include "scalestat/resampling/resampling.hpp"

namespace scalestat {

struct ExperimentReport {
    std::string experiment;
    std::vector<ResultRow> results;
    std::vector<TimingRow> timings;
};

/// Writes <out_dir>/<experiment>.csv (deterministic results) and
/// <out_dir>/<experiment>_timings.csv (measured wallclock).
inline void write_report(const std::string& out_dir, const ExperimentReport& report) {
    std::filesystem::create_directories(out_dir);
    const auto base = std::filesystem::path(out_dir) / report.experiment;
    write_results_csv(base.string() + ".csv", report.results);
    write_timings_csv(base.string() + "_timings.csv", report.timings);
}

namespace detail {

class ParamSnapshot {
public:
    ParamSnapshot& add(const std::string& key, const std::string& value) {
        if (!text_.empty()) text_ += ';';
        text_ += key + "=" + value;
        return *this;
    }
    ParamSnapshot& add(const std::string& key, std::int64_t value) {
        return add(key, std::to_string(value));
    }
    ParamSnapshot& add(const std::string& key, double value) {
        std::ostringstream os;
        os.precision(12);
        os << value;
        return add(key, os.str());
    }
    ParamSnapshot& merge(const ParamSnapshot& other) {
        if (other.text_.empty()) return *this;
        if (!text_.empty()) text_ += ';';
        text_ += other.text_;
        return *this;
    }
    const std::string& str() const { return text_; }

private:
    std::string text_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// blb-curve: relative CI error versus cumulative time, bootstrap vs BLB on the
// same synthetic logistic dataset, against a Monte Carlo ground truth.
// ---------------------------------------------------------------------------

struct CurvePoint {
    int step = 0;             // resamples (bootstrap) or completed subsamples (BLB)
    double error = 0.0;       // relative CI width error against ground truth
    double work_units = 0.0;
    double seconds = 0.0;     // cumulative wallclock within the procedure
};

struct BlbCurveReport {
    ExperimentReport report;
    std::vector<CurvePoint> bootstrap_curve;
    std::vector<CurvePoint> blb_curve;
    Eigen::Index subsample_size = 0;
};

inline BlbCurveReport run_blb_curve(const Config& cfg, std::uint64_t seed, int threads) {
    validate_experiment_config("blb-curve", cfg);
    const auto n = static_cast<Eigen::Index>(cfg.get_int("data.n", 20000));
    const auto d = static_cast<Eigen::Index>(cfg.get_int("data.d", 10));
    const double alpha = cfg.get_double("alpha", 0.05);
    const double gamma = cfg.get_double("blb.gamma", 0.7);
    const int s = static_cast<int>(cfg.get_int("blb.s", 10));
    const int r = static_cast<int>(cfg.get_int("blb.r", 50));
    const Weighting weighting = cfg.get_string("blb.weighting", "poisson") == "multinomial"
                                    ? Weighting::multinomial
                                    : Weighting::poisson;
    const int boot_b = static_cast<int>(cfg.get_int("bootstrap.B", 100));
    const int truth_reps = static_cast<int>(cfg.get_int("truth.replicates", 2000));

    RngStream rng(seed, 0);
    EstimatorSpec spec;
    spec.kind = EstimatorKind::logistic_regression;
    spec.dim = d;

    const Dataset data = make_logistic_dataset(n, d, rng.child(1));

    // Ground truth: the estimator's sampling distribution over fresh datasets.
    std::vector<Eigen::VectorXd> truth_estimates(static_cast<std::size_t>(truth_reps));
    parallel_for(static_cast<std::size_t>(truth_reps), threads, [&](std::size_t rep) {
        const Dataset fresh = make_logistic_dataset(n, d, rng.child(1000).child(rep));
        WeightedSample all;
        all.indices.resize(static_cast<std::size_t>(n));
        std::iota(all.indices.begin(), all.indices.end(), Eigen::Index{0});
        all.weights = Eigen::VectorXd::Ones(n);
        all.nominal_size = n;
        truth_estimates[rep] = fit(spec, fresh, all);
    });
    const Eigen::VectorXd truth_widths = percentile_interval(truth_estimates, alpha).widths();

    BlbCurveReport out;
    out.report.experiment = "blb-curve";
    detail::ParamSnapshot base_params;
    base_params.add("n", static_cast<std::int64_t>(n))
        .add("d", static_cast<std::int64_t>(d))
        .add("alpha", alpha)
        .add("seed", static_cast<std::int64_t>(seed));

    // Bootstrap: sequential resamples, error after each one.
    {
        RngStream boot_rng = rng.child(2);
        std::vector<Eigen::Index> all(static_cast<std::size_t>(n));
        std::iota(all.begin(), all.end(), Eigen::Index{0});
        std::vector<Eigen::VectorXd> estimates;
        estimates.reserve(static_cast<std::size_t>(boot_b));
        double cum_seconds = 0.0;
        for (int b = 0; b < boot_b; ++b) {
            Stopwatch clock;
            RngStream task = boot_rng.child(static_cast<std::uint64_t>(b));
            WeightedSample sample;
            sample.indices = all;
            sample.weights = multinomial_weights(n, n, task);
            sample.nominal_size = n;
            estimates.push_back(fit(spec, data, sample));
            cum_seconds += clock.seconds();
            if (b < 1) continue;
            const Eigen::VectorXd widths = percentile_interval(estimates, alpha).widths();
            CurvePoint pt;
            pt.step = b + 1;
            pt.error = relative_width_error(widths, truth_widths);
            pt.work_units = static_cast<double>(b + 1) * static_cast<double>(n);
            pt.seconds = cum_seconds;
            out.bootstrap_curve.push_back(pt);
        }
    }

    // BLB: parallel subsample tasks; error after each completed prefix of the
    // deterministic outer order, timed at the moment the prefix is complete.
    {
        RngStream blb_rng = rng.child(3);
        BlbConfig blb_cfg;
        blb_cfg.gamma = gamma;
        blb_cfg.s = s;
        blb_cfg.r = r;
        blb_cfg.weighting = weighting;
        blb_cfg.alpha = alpha;
        const Eigen::Index m = blb_cfg.subsample_size(n);
        out.subsample_size = m;

        std::vector<Eigen::VectorXd> widths(static_cast<std::size_t>(s));
        std::vector<char> usable(static_cast<std::size_t>(s), 0);
        std::vector<double> finish(static_cast<std::size_t>(s), 0.0);
        Stopwatch blb_clock;
        parallel_for(static_cast<std::size_t>(s), threads, [&](std::size_t i) {
            RngStream outer = blb_rng.child(i);
            RngStream pick = outer.child(0);
            const auto indices = subsample_indices(n, m, pick);
            const auto q = detail::blb_subsample_quality(data, spec, indices, n, r, weighting,
                                                         alpha, outer.child(1));
            if (q.usable) {
                widths[i] = q.widths;
                usable[i] = 1;
            }
            finish[i] = blb_clock.seconds();
        });

        Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
        int used = 0;
        double prefix_seconds = 0.0;
        for (int k = 0; k < s; ++k) {
            prefix_seconds = std::max(prefix_seconds, finish[static_cast<std::size_t>(k)]);
            if (usable[static_cast<std::size_t>(k)]) {
                acc += widths[static_cast<std::size_t>(k)];
                ++used;
            }
            if (used < 1) continue;
            CurvePoint pt;
            pt.step = k + 1;
            pt.error = relative_width_error(acc / used, truth_widths);
            pt.work_units = static_cast<double>(k + 1) * static_cast<double>(r) *
                            static_cast<double>(m);
            pt.seconds = prefix_seconds;
            out.blb_curve.push_back(pt);
        }
    }

    auto emit = [&](const std::vector<CurvePoint>& curve, const std::string& procedure,
                    const detail::ParamSnapshot& extra) {
        for (const auto& pt : curve) {
            detail::ParamSnapshot params = base_params;
            params.add("procedure", procedure)
                .add("step", static_cast<std::int64_t>(pt.step))
                .merge(extra);
            out.report.results.push_back(
                {"blb-curve", params.str(), "rel_ci_error", pt.error, pt.work_units});
            out.report.timings.push_back(
                {"blb-curve", params.str(), "cumulative_wallclock", pt.seconds});
        }
    };
    detail::ParamSnapshot boot_extra;
    boot_extra.add("B", static_cast<std::int64_t>(boot_b));
    emit(out.bootstrap_curve, "bootstrap", boot_extra);
    detail::ParamSnapshot blb_extra;
    blb_extra.add("gamma", gamma)
        .add("s", static_cast<std::int64_t>(s))
        .add("r", static_cast<std::int64_t>(r))
        .add("m", static_cast<std::int64_t>(out.subsample_size));
    emit(out.blb_curve, "blb", blb_extra);
    return out;
}

// ---------------------------------------------------------------------------
// dfc-accuracy / dfc-runtime: base nuclear-norm completion against DFC-Proj
// and its ensemble variant on synthetic low-rank-plus-noise instances.
// ---------------------------------------------------------------------------

struct DfcCell {
    std::string variant;  // base | dfc-proj | dfc-ens
    double rmse = 0.0;
    double seconds = 0.0;
    double iterations = 0.0;
};

struct DfcReport {
    ExperimentReport report;
    std::vector<DfcCell> cells;
};

namespace detail {

inline void run_dfc_cell(const Config& cfg, const LowRankProblem& prob, Eigen::Index rank,
                         int t, int threads, RngStream rng, const std::string& experiment,
                         const detail::ParamSnapshot& cell_params, DfcReport& out) {
    CompletionConfig base_cfg;
    base_cfg.lambda = default_completion_lambda(prob.observed);
    base_cfg.max_iters = static_cast<int>(cfg.get_int("complete.max_iters", 200));
    base_cfg.tol = cfg.get_double("complete.tol", 1e-8);
    base_cfg.k_max = static_cast<Eigen::Index>(
        cfg.get_int("complete.k_max", static_cast<std::int64_t>(rank)));

    struct Variant {
        std::string name;
        int t;
        bool ensemble;
    };
    const std::vector<Variant> variants = {
        {"base", 1, false}, {"dfc-proj", t, false}, {"dfc-ens", t, true}};
    for (const auto& variant : variants) {
        DfcConfig dfc_cfg;
        dfc_cfg.t = variant.t;
        dfc_cfg.ensemble = variant.ensemble;
        dfc_cfg.base = base_cfg;
        dfc_cfg.parallelism = threads;
        Stopwatch clock;
        const DfcResult res = dfc_proj(prob.observed, dfc_cfg, rng);
        DfcCell cell;
        cell.variant = variant.name;
        cell.seconds = clock.seconds();
        cell.rmse = rmse_against_truth(res.estimate, prob);
        for (const auto& b : res.blocks) cell.iterations += static_cast<double>(b.iterations);
        out.cells.push_back(cell);

        detail::ParamSnapshot params = cell_params;
        params.add("variant", variant.name);
        out.report.results.push_back(
            {experiment, params.str(), "rmse", cell.rmse, cell.iterations});
        out.report.timings.push_back({experiment, params.str(), "wallclock", cell.seconds});
    }
}

}  // namespace detail

inline DfcReport run_dfc_accuracy(const Config& cfg, std::uint64_t seed, int threads) {
    validate_experiment_config("dfc-accuracy", cfg);
    const auto rows = static_cast<Eigen::Index>(cfg.get_int("mat.rows", 400));
    const auto cols = static_cast<Eigen::Index>(cfg.get_int("mat.cols", 400));
    const auto rank = static_cast<Eigen::Index>(cfg.get_int("mat.rank", 5));
    const double noise_sigma = cfg.get_double("mat.noise_sigma", 0.1);
    const int t = static_cast<int>(cfg.get_int("dfc.t", 4));
    const auto percents = cfg.get_double_list("observed.percents", {5.0, 10.0, 15.0, 25.0, 50.0});

    RngStream rng(seed, 0);
    DfcReport out;
    out.report.experiment = "dfc-accuracy";
    for (std::size_t g = 0; g < percents.size(); ++g) {
        const LowRankProblem prob = make_low_rank_problem(rows, cols, rank, noise_sigma,
                                                          percents[g] / 100.0, rng.child(g));
        detail::ParamSnapshot params;
        params.add("rows", static_cast<std::int64_t>(rows))
            .add("cols", static_cast<std::int64_t>(cols))
            .add("rank", static_cast<std::int64_t>(rank))
            .add("noise", noise_sigma)
            .add("observed_pct", percents[g])
            .add("t", static_cast<std::int64_t>(t))
            .add("seed", static_cast<std::int64_t>(seed));
        detail::run_dfc_cell(cfg, prob, rank, t, threads, rng.child(1000 + g),
                             "dfc-accuracy", params, out);
    }
    return out;
}

inline DfcReport run_dfc_runtime(const Config& cfg, std::uint64_t seed, int threads) {
    validate_experiment_config("dfc-runtime", cfg);
    const auto rank = static_cast<Eigen::Index>(cfg.get_int("mat.rank", 5));
    const double noise_sigma = cfg.get_double("mat.noise_sigma", 0.1);
    const int t = static_cast<int>(cfg.get_int("dfc.t", 4));
    const double percent = cfg.get_double("observed.percent", 25.0);
    const auto dims = cfg.get_double_list("mat.dims", {200.0, 400.0, 800.0});

    RngStream rng(seed, 0);
    DfcReport out;
    out.report.experiment = "dfc-runtime";
    for (std::size_t g = 0; g < dims.size(); ++g) {
        const auto dim = static_cast<Eigen::Index>(dims[g]);
        const LowRankProblem prob =
            make_low_rank_problem(dim, dim, rank, noise_sigma, percent / 100.0, rng.child(g));
        detail::ParamSnapshot params;
        params.add("dim", static_cast<std::int64_t>(dim))
            .add("rank", static_cast<std::int64_t>(rank))
            .add("noise", noise_sigma)
            .add("observed_pct", percent)
            .add("t", static_cast<std::int64_t>(t))
            .add("seed", static_cast<std::int64_t>(seed));
        detail::run_dfc_cell(cfg, prob, rank, t, threads, rng.child(1000 + g),
                             "dfc-runtime", params, out);
    }
    return out;
}

// ---------------------------------------------------------------------------
// tradeoff-sparse-pca / tradeoff-cut-matrix: per-relaxation Gaussian
// squared-complexity, sample size for unit risk, Monte Carlo risk at that
// sample size, and measured projection cost.
// ---------------------------------------------------------------------------

struct TradeoffRow {
    std::string body;
    bool feasible = true;
    double complexity = 0.0;
    double complexity_se = 0.0;
    Eigen::Index n_unit = 0;
    double risk = 0.0;
    double risk_se = 0.0;
    double mean_projection_seconds = 0.0;
    double projection_iterations = 0.0;  // deterministic cost proxy
};

struct TradeoffReport {
    ExperimentReport report;
    std::vector<TradeoffRow> rows;
};

inline TradeoffReport run_tradeoff(const Config& cfg, const std::string& experiment,
                                   std::uint64_t seed, int threads) {
    validate_experiment_config(experiment, cfg);
    const bool cut = experiment == "tradeoff-cut-matrix";
    const auto p = static_cast<Eigen::Index>(cfg.get_int("p", cut ? 16 : 64));
    const auto k = static_cast<Eigen::Index>(cfg.get_int("k", 2));
    const double sigma = cfg.get_double("sigma", 1.0);
    const int complexity_trials = static_cast<int>(cfg.get_int("trials.complexity", 10000));
    const int risk_trials = static_cast<int>(cfg.get_int("trials.risk", 10000));
    const int n_gen = static_cast<int>(cfg.get_int("cone.n_gen", 512));
    const auto vertex_cap =
        static_cast<std::size_t>(cfg.get_int("vertex_cap", static_cast<std::int64_t>(kDefaultVertexCap)));

    SignalSpec spec;
    spec.kind = cut ? SignalKind::cut_matrix : SignalKind::sparse_pca;
    spec.p = p;
    spec.k = k;
    const Eigen::Index side = spec.side();

    RngStream rng(seed, 0);
    TradeoffReport out;
    out.report.experiment = experiment;

    detail::ParamSnapshot base_params;
    base_params.add("p", static_cast<std::int64_t>(p)).add("sigma", sigma);
    if (!cut) base_params.add("k", static_cast<std::int64_t>(k));
    base_params.add("seed", static_cast<std::int64_t>(seed));

    RngStream pick = rng.child(0);
    const Eigen::VectorXd x_star = sample_signal(spec, pick);

    std::vector<Eigen::VectorXd> vertices;
    bool hull_feasible = true;
    std::string hull_note;
    try {
        vertices = signal_vertices(spec, vertex_cap);
    } catch (const InfeasibleScaleError& e) {
        // The exact hull is out of enumeration reach at this p: emit a
        // footnote row and continue with the tractable relaxations.
        hull_feasible = false;
        hull_note = e.what();
    }

    // Bodies from tightest to loosest plus the singleton control. The nuclear
    // ball of radius sqrt(p) is an outer approximation of both signal sets:
    // every signal matrix has nuclear norm exactly sqrt(p).
    struct BodyRow {
        std::string name;
        const ConvexBody* body;
        bool polytopal;
    };
    SingletonBody singleton(x_star);
    std::unique_ptr<VertexHullBody> hull;
    if (hull_feasible) hull = std::make_unique<VertexHullBody>(vertices, vertex_cap);
    ElliptopeBody elliptope(side);
    NuclearBallBody nuclear(side, side, std::sqrt(static_cast<double>(p)));

    const std::string hull_name = cut ? "cut-polytope" : "signal-hull";
    std::vector<BodyRow> body_rows;
    body_rows.push_back({"singleton", &singleton, false});
    if (hull_feasible) body_rows.push_back({hull_name, hull.get(), true});
    if (cut) body_rows.push_back({"elliptope", &elliptope, false});
    body_rows.push_back({"nuclear-ball", &nuclear, false});

    if (!hull_feasible) {
        detail::ParamSnapshot params = base_params;
        params.add("body", hull_name).add("note", "infeasible_scale");
        out.report.results.push_back({experiment, params.str(), "infeasible_scale", 1.0, 0.0});
        TradeoffRow tr;
        tr.body = hull_name;
        tr.feasible = false;
        out.rows.push_back(tr);
    }

    // Tangent cones. Sampled cones pool the tighter bodies' directions: any
    // direction into a subset is a direction into the superset, so pooling
    // keeps the estimated cones nested the way the true ones are.
    std::vector<ConeModel> cones;
    std::vector<Eigen::VectorXd> pooled_dirs;
    for (std::size_t i = 0; i < body_rows.size(); ++i) {
        const auto& row = body_rows[i];
        if (row.name == "singleton") {
            cones.push_back(ConeModel::from_directions(x_star, {}));
            continue;
        }
        if (row.polytopal) {
            ConeModel cone = tangent_cone_polytopal(vertices, x_star);
            for (Eigen::Index c = 0; c < cone.generators.cols(); ++c)
                pooled_dirs.push_back(cone.generators.col(c));
            cones.push_back(std::move(cone));
            continue;
        }
        ConeModel cone = tangent_cone_sampled(*row.body, x_star, n_gen,
                                              rng.child(100 + i), 0.0, pooled_dirs);
        for (Eigen::Index c = 0; c < cone.generators.cols(); ++c)
            pooled_dirs.push_back(cone.generators.col(c));
        cones.push_back(std::move(cone));
    }

    for (std::size_t i = 0; i < body_rows.size(); ++i) {
        const auto& row = body_rows[i];
        TradeoffRow tr;
        tr.body = row.name;
        if (row.name == "singleton") {
            tr.complexity = 0.0;
            tr.complexity_se = 0.0;
            tr.n_unit = 0;
        } else {
            const ComplexityEstimate g =
                gaussian_sq_complexity(cones[i], complexity_trials, rng.child(200 + i), threads);
            tr.complexity = g.value;
            tr.complexity_se = g.std_error;
            tr.n_unit = sample_size_for_unit_risk(sigma, g.value);
        }

        DenoiseProblem problem;
        problem.x_star = x_star;
        problem.sigma = sigma;
        problem.n = std::max<Eigen::Index>(1, tr.n_unit);
        problem.body = row.body;
        const RiskEstimate risk = risk_mc(problem, risk_trials, rng.child(300 + i), threads);
        tr.risk = risk.risk;
        tr.risk_se = risk.std_error;
        tr.mean_projection_seconds = risk.projection_seconds / risk.trials;
        tr.projection_iterations =
            static_cast<double>(risk.projection_iterations) / risk.trials;
        out.rows.push_back(tr);

        detail::ParamSnapshot params = base_params;
        params.add("body", row.name);
        const std::string& ps = params.str();
        out.report.results.push_back(
            {experiment, ps, "complexity", tr.complexity, tr.projection_iterations});
        out.report.results.push_back(
            {experiment, ps, "complexity_se", tr.complexity_se, tr.projection_iterations});
        out.report.results.push_back({experiment, ps, "n_unit_risk",
                                      static_cast<double>(tr.n_unit), tr.projection_iterations});
        out.report.results.push_back({experiment, ps, "risk", tr.risk, tr.projection_iterations});
        out.report.results.push_back(
            {experiment, ps, "risk_se", tr.risk_se, tr.projection_iterations});
        out.report.timings.push_back(
            {experiment, ps, "mean_projection_wallclock", tr.mean_projection_seconds});
    }
    return out;
}

/// Dispatch by experiment name; returns the report (the caller writes it).
inline ExperimentReport run_experiment(const std::string& experiment, const Config& cfg,
                                       std::uint64_t seed, int threads) {
    if (experiment == "blb-curve") return run_blb_curve(cfg, seed, threads).report;
    if (experiment == "dfc-accuracy") return run_dfc_accuracy(cfg, seed, threads).report;
    if (experiment == "dfc-runtime") return run_dfc_runtime(cfg, seed, threads).report;
    if (experiment == "tradeoff-sparse-pca" || experiment == "tradeoff-cut-matrix")
        return run_tradeoff(cfg, experiment, seed, threads).report;
    throw ConfigError("unknown experiment: " + experiment);
}

}  // namespace scalestat
