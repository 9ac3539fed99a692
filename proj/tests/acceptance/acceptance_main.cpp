// Acceptance suite: one criterion per check, one PASS/FAIL line each.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <utility>
#include <string>
#include <vector>

#include "scalestat/scalestat.hpp"

using namespace scalestat;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
    std::printf("[%s] criterion %2d: %s (%s; %.1f s)\n", pass ? "PASS" : "FAIL", criterion,
                name.c_str(), detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

void run_criterion(int criterion, const std::string& name,
                   const std::function<std::pair<bool, std::string>()>& body) {
    Stopwatch clock;
    bool pass = false;
    std::string detail;
    try {
        const auto [ok, msg] = body();
        pass = ok;
        detail = msg;
    } catch (const std::exception& e) {
        pass = false;
        detail = std::string("exception: ") + e.what();
    }
    report(criterion, name, pass, detail, clock.seconds());
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

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
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                                 static_cast<double>(j) / b.size()));
    }
    return d;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// --------------------------------------------------------------------------

void criterion1_bootstrap_oracle() {
    run_criterion(1, "bootstrap matches exhaustive enumeration on {1,2,3}", [] {
        // Exact SD of the resampled mean over all 27 with-replacement draws.
        const double exact = std::sqrt(2.0 / 9.0);
        const Dataset ds = scalar_dataset({1, 2, 3});
        const ResampleRun run = bootstrap(ds, mean_spec(), 100000, RngStream(1001, 0), 0.05, 4);
        double sum = 0.0, sq = 0.0;
        for (const auto& e : run.estimates) {
            sum += e[0];
            sq += e[0] * e[0];
        }
        const double n = static_cast<double>(run.estimates.size());
        const double sd = std::sqrt(sq / n - (sum / n) * (sum / n));
        const double rel = std::abs(sd - exact) / exact;
        return std::make_pair(rel < 0.01,
                              "mc sd " + fmt(sd) + " vs exact " + fmt(exact) + ", rel err " +
                                  fmt(rel));
    });
}

void criterion2_blb_reduction() {
    run_criterion(2, "BLB(m=n, s=1, multinomial) equals bootstrap in law (KS < 0.02)", [] {
        RngStream data_rng(1002, 0);
        Dataset ds;
        ds.features = data_rng.normal_vector(20);
        const int r = 10000;

        // Inner BLB estimates: the one subsample is the full dataset.
        RngStream blb_rng(2002, 0);
        RngStream outer = blb_rng.child(0);
        const auto indices = subsample_indices(20, 20, outer);
        std::vector<double> blb_means;
        blb_means.reserve(r);
        for (int j = 0; j < r; ++j) {
            RngStream inner = outer.child(1).child(static_cast<std::uint64_t>(j));
            WeightedSample sample;
            sample.indices = indices;
            sample.weights = multinomial_weights(20, 20, inner);
            sample.nominal_size = 20;
            blb_means.push_back(fit(mean_spec(), ds, sample)[0]);
        }

        const ResampleRun boot = bootstrap(ds, mean_spec(), r, RngStream(3002, 0), 0.05, 4);
        std::vector<double> boot_means;
        boot_means.reserve(r);
        for (const auto& e : boot.estimates) boot_means.push_back(e[0]);

        const double ks = ks_statistic(blb_means, boot_means);
        return std::make_pair(ks < 0.02, "two-sample KS " + fmt(ks) + " at r=B=1e4");
    });
}

void criterion3_blb_time_error() {
    run_criterion(3, "BLB reaches rel CI error <= 0.1 before bootstrap (Fig. 2 shape)", [] {
        Config cfg = Config::parse(
            "data.n = 20000\ndata.d = 10\nblb.gamma = 0.7\nblb.s = 10\nblb.r = 50\n"
            "bootstrap.B = 100\ntruth.replicates = 2000\n");
        const BlbCurveReport rep = run_blb_curve(cfg, 42, 4);

        const double target = 0.1;
        auto time_to_reach = [&](const std::vector<CurvePoint>& curve) {
            for (const auto& pt : curve)
                if (pt.error <= target) return pt.seconds;
            return std::numeric_limits<double>::infinity();
        };
        const double t_blb = time_to_reach(rep.blb_curve);
        double t_boot = time_to_reach(rep.bootstrap_curve);
        if (!std::isfinite(t_boot) && !rep.bootstrap_curve.empty())
            t_boot = rep.bootstrap_curve.back().seconds;  // never reached: use total

        const double final_err = rep.blb_curve.back().error;
        const bool pass = std::isfinite(t_blb) && t_blb < t_boot && final_err <= target;
        return std::make_pair(pass, "blb t(0.1)=" + fmt(t_blb) + "s vs bootstrap " +
                                        fmt(t_boot) + "s; final blb err " + fmt(final_err) +
                                        " (m=" + std::to_string(rep.subsample_size) + ")");
    });
}

void criterion4_m_out_of_n() {
    run_criterion(4, "m-out-of-n sqrt(m/n) correction within 10% of bootstrap widths", [] {
        RngStream data_rng(1004, 0);
        Dataset ds;
        ds.features = data_rng.normal_vector(10000);
        const ResampleRun moon =
            m_out_of_n(ds, mean_spec(), 100, 1000, true, RngStream(2004, 0), 0.05, 4);
        const ResampleRun boot = bootstrap(ds, mean_spec(), 1000, RngStream(3004, 0), 0.05, 4);
        const double rel =
            std::abs(moon.quality.widths[0] - boot.quality.widths[0]) / boot.quality.widths[0];
        return std::make_pair(rel < 0.10, "corrected width " + fmt(moon.quality.widths[0]) +
                                              " vs bootstrap " + fmt(boot.quality.widths[0]) +
                                              ", rel diff " + fmt(rel));
    });
}

void criterion5_exact_recovery() {
    run_criterion(5, "matrix completion exact recovery (200x200, rank 5, 25%)", [] {
        const LowRankProblem prob = make_low_rank_problem(200, 200, 5, 0.0, 0.25, RngStream(1005, 0));
        CompletionConfig cfg;
        cfg.delta = 0.0;
        cfg.max_iters = 400;
        cfg.k_max = 20;
        const CompletionResult res = complete(prob.observed, cfg);
        const double rel = rmse_against_truth(res.estimate, prob) /
                           std::sqrt(prob.l0_frob_sq() / (200.0 * 200.0));
        return std::make_pair(rel < 1e-3, "relative Frobenius error " + fmt(rel));
    });
}

void criterion6_dfc_reduction() {
    run_criterion(6, "DFC t=1 equals the base algorithm exactly", [] {
        const LowRankProblem prob = make_low_rank_problem(80, 60, 3, 0.05, 0.4, RngStream(1006, 0));
        CompletionConfig base_cfg;
        base_cfg.delta = 0.05 * std::sqrt(static_cast<double>(prob.observed.nnz()));
        base_cfg.k_max = 15;
        DfcConfig cfg;
        cfg.t = 1;
        cfg.base = base_cfg;
        const DfcResult dfc = dfc_proj(prob.observed, cfg, RngStream(2006, 0));
        const CompletionResult base = complete(prob.observed, base_cfg);
        const bool equal = dfc.estimate.rank() == base.estimate.rank() &&
                           (dfc.estimate.U - base.estimate.U).cwiseAbs().maxCoeff() == 0.0 &&
                           (dfc.estimate.sv - base.estimate.sv).cwiseAbs().maxCoeff() == 0.0 &&
                           (dfc.estimate.V - base.estimate.V).cwiseAbs().maxCoeff() == 0.0;
        return std::make_pair(equal, "factors bit-identical at rank " +
                                         std::to_string(base.estimate.rank()));
    });
}

void criterion7_dfc_accuracy_runtime() {
    run_criterion(7, "DFC 400x400: ensemble RMSE <= 1.5x base; DFC faster (4 threads)", [] {
        const LowRankProblem prob =
            make_low_rank_problem(400, 400, 5, 0.1, 0.25, RngStream(1007, 0));
        CompletionConfig base_cfg;
        base_cfg.lambda = default_completion_lambda(prob.observed);
        base_cfg.k_max = 5;
        base_cfg.max_iters = 200;
        base_cfg.tol = 1e-8;

        Stopwatch base_clock;
        const CompletionResult base = complete(prob.observed, base_cfg);
        const double base_seconds = base_clock.seconds();
        const double base_rmse = rmse_against_truth(base.estimate, prob);

        DfcConfig cfg;
        cfg.t = 4;
        cfg.ensemble = true;
        cfg.base = base_cfg;
        cfg.parallelism = 4;
        Stopwatch dfc_clock;
        const DfcResult dfc = dfc_proj(prob.observed, cfg, RngStream(2007, 0));
        const double dfc_seconds = dfc_clock.seconds();
        const double dfc_rmse = rmse_against_truth(dfc.estimate, prob);

        const bool pass = dfc_rmse <= 1.5 * base_rmse && dfc_seconds < base_seconds;
        return std::make_pair(pass, "rmse " + fmt(dfc_rmse) + " vs base " + fmt(base_rmse) +
                                        " (ratio " + fmt(dfc_rmse / base_rmse) + "); time " +
                                        fmt(dfc_seconds) + "s vs " + fmt(base_seconds) + "s");
    });
}

struct BodyCase {
    std::string name;
    const ConvexBody* body;
    ConeModel cone;
    Eigen::VectorXd x_star;
};

void criterion8_theorem3() {
    static const int kTrials = 10000;
    RngStream rng(1008, 0);

    run_criterion(8, "Theorem-3 bound: risk <= (sigma^2/n) G + 3 SE on all bodies", [&] {
        const double sigma = 1.0;
        std::ostringstream detail;
        bool all_pass = true;

        // Bodies: full space (p=10), hypercube corner (p=8), cut polytope,
        // elliptope and nuclear ball at a cut vertex (p=16).
        FullSpaceBody full(10);
        BoxBody box(8);
        const auto cut_verts = cut_matrix_vertices(16);
        VertexHullBody cut_hull(cut_verts);
        ElliptopeBody elliptope(4);
        NuclearBallBody nuclear(4, 4, 4.0);
        const Eigen::VectorXd cut_x = cut_verts[2];

        std::vector<BodyCase> cases;
        cases.push_back({"full-space", &full, ConeModel::full_space(10),
                         Eigen::VectorXd::Zero(10)});
        cases.push_back(
            {"box-corner", &box, tangent_cone_polytopal(box.vertices(), Eigen::VectorXd::Zero(8)),
             Eigen::VectorXd::Zero(8)});
        cases.push_back({"cut-polytope", &cut_hull, tangent_cone_polytopal(cut_verts, cut_x),
                         cut_x});
        // Sampled cones; pool the cut cone's directions (cut is inside both).
        std::vector<Eigen::VectorXd> pooled;
        {
            const ConeModel cut_cone = tangent_cone_polytopal(cut_verts, cut_x);
            for (Eigen::Index c = 0; c < cut_cone.generators.cols(); ++c)
                pooled.push_back(cut_cone.generators.col(c));
        }
        ConeModel ell_cone =
            tangent_cone_sampled(elliptope, cut_x, 1024, rng.child(3), 0.0, pooled);
        for (Eigen::Index c = 0; c < ell_cone.generators.cols(); ++c)
            pooled.push_back(ell_cone.generators.col(c));
        const ConeModel nuc_cone =
            tangent_cone_sampled(nuclear, cut_x, 1024, rng.child(4), 0.0, pooled);
        cases.push_back({"elliptope", &elliptope, std::move(ell_cone), cut_x});
        cases.push_back({"nuclear-ball", &nuclear, nuc_cone, cut_x});

        for (std::size_t i = 0; i < cases.size(); ++i) {
            const auto& c = cases[i];
            const ComplexityEstimate g =
                gaussian_sq_complexity(c.cone, kTrials, rng.child(10 + i), 4);
            const Eigen::Index n = std::max<Eigen::Index>(
                1, sample_size_for_unit_risk(sigma, g.value));
            DenoiseProblem prob{c.x_star, sigma, n, c.body};
            const RiskEstimate risk = risk_mc(prob, kTrials, rng.child(20 + i), 4);
            const double bound = sigma * sigma / static_cast<double>(n) * g.value;
            const double combined_se =
                3.0 * (risk.std_error +
                       sigma * sigma / static_cast<double>(n) * g.std_error);
            const bool ok = risk.risk <= bound + combined_se;
            all_pass = all_pass && ok;
            detail << c.name << ": risk " << fmt(risk.risk) << " vs bound " << fmt(bound)
                   << (ok ? "; " : " VIOLATED; ");

            if (c.name == "full-space") {
                // Control: risk = sigma^2 p / n exactly.
                const double expected = sigma * sigma * 10.0 / static_cast<double>(n);
                const bool control_ok = std::abs(risk.risk - expected) <= 3.0 * risk.std_error;
                all_pass = all_pass && control_ok;
                if (!control_ok) detail << "full-space control VIOLATED; ";
            }
        }
        return std::make_pair(all_pass, detail.str());
    });
}

void criterion9_calibration() {
    static const int kTrials = 10000;
    RngStream rng(1009, 0);
    run_criterion(9, "complexity calibration: G(R^10)=10, G(orthant R^2)=1", [&] {
        const ComplexityEstimate full =
            gaussian_sq_complexity(ConeModel::full_space(10), kTrials, rng.child(1), 4);
        Eigen::VectorXd e1(2), e2(2), e3(2);
        e1 << 1, 0;
        e2 << 0, 1;
        e3 << 1, 1;
        const ConeModel orthant =
            ConeModel::from_directions(Eigen::VectorXd::Zero(2), {e1, e2, e3});
        const ComplexityEstimate orth =
            gaussian_sq_complexity(orthant, kTrials, rng.child(2), 4);
        const bool pass = std::abs(full.value - 10.0) <= 3.0 * full.std_error &&
                          std::abs(orth.value - 1.0) <= 3.0 * orth.std_error;
        return std::make_pair(pass, "G(R^10) = " + fmt(full.value) + " +- " +
                                        fmt(full.std_error) + "; G(orthant) = " +
                                        fmt(orth.value) + " +- " + fmt(orth.std_error));
    });
}

void criterion10_orderings() {
    run_criterion(10, "Table 1/2 orderings at desk scale", [] {
        std::ostringstream detail;
        bool pass = true;

        // Table 2 at p=16.
        Config cut_cfg = Config::parse(
            "p = 16\nsigma = 1.0\ntrials.complexity = 10000\ntrials.risk = 10000\n"
            "cone.n_gen = 1024\n");
        const TradeoffReport cut = run_tradeoff(cut_cfg, "tradeoff-cut-matrix", 4242, 4);
        const TradeoffRow* rows[3] = {nullptr, nullptr, nullptr};
        for (const auto& r : cut.rows) {
            if (r.body == "cut-polytope") rows[0] = &r;
            if (r.body == "elliptope") rows[1] = &r;
            if (r.body == "nuclear-ball") rows[2] = &r;
        }
        if (!rows[0] || !rows[1] || !rows[2]) return std::make_pair(false, std::string("missing rows"));

        // n ordering within combined MC error on sigma^2 * G.
        const double tol01 = 3.0 * (rows[0]->complexity_se + rows[1]->complexity_se);
        const double tol12 = 3.0 * (rows[1]->complexity_se + rows[2]->complexity_se);
        const bool n_ok = rows[0]->complexity <= rows[1]->complexity + tol01 &&
                          rows[1]->complexity <= rows[2]->complexity + tol12;
        pass = pass && n_ok;
        detail << "n: " << rows[0]->n_unit << " <= " << rows[1]->n_unit << " <= "
               << rows[2]->n_unit << (n_ok ? "" : " VIOLATED") << "; ";

        // Projection runtime ordering reversed: cut >= elliptope >= nuclear.
        const bool rt_ok =
            rows[0]->mean_projection_seconds >= rows[1]->mean_projection_seconds &&
            rows[1]->mean_projection_seconds >= rows[2]->mean_projection_seconds;
        pass = pass && rt_ok;
        detail << "proj us: cut " << fmt(rows[0]->mean_projection_seconds * 1e6) << ", ell "
               << fmt(rows[1]->mean_projection_seconds * 1e6) << ", nuc "
               << fmt(rows[2]->mean_projection_seconds * 1e6) << (rt_ok ? "" : " VIOLATED")
               << "; ";

        // Table 1 at p=64, k=2: hull complexity strictly below the ball's.
        Config pca_cfg = Config::parse(
            "p = 64\nk = 2\nsigma = 1.0\ntrials.complexity = 4000\ntrials.risk = 2000\n"
            "cone.n_gen = 1024\n");
        const TradeoffReport pca = run_tradeoff(pca_cfg, "tradeoff-sparse-pca", 2121, 4);
        const TradeoffRow *hull = nullptr, *ball = nullptr;
        for (const auto& r : pca.rows) {
            if (r.body == "signal-hull") hull = &r;
            if (r.body == "nuclear-ball") ball = &r;
        }
        if (!hull || !ball) return std::make_pair(false, std::string("missing sparse-pca rows"));
        const bool pca_ok = hull->complexity < ball->complexity;
        pass = pass && pca_ok;
        detail << "sparse-pca G: hull " << fmt(hull->complexity) << " < ball "
               << fmt(ball->complexity) << (pca_ok ? "" : " VIOLATED") << "; ";

        // Singleton control row: zero risk at n = 0.
        for (const auto& r : cut.rows)
            if (r.body == "singleton") {
                const bool ctrl = r.risk == 0.0 && r.n_unit == 0;
                pass = pass && ctrl;
                detail << "singleton control" << (ctrl ? " ok" : " VIOLATED");
            }
        return std::make_pair(pass, detail.str());
    });
}

void criterion11_determinism() {
    run_criterion(11, "byte-identical CSVs across reruns and thread counts", [] {
        namespace fs = std::filesystem;
        const fs::path root = fs::temp_directory_path() / "scalestat_acceptance_det";
        fs::remove_all(root);

        struct Job {
            std::string experiment;
            std::string cfg_text;
        };
        const std::vector<Job> jobs = {
            {"blb-curve",
             "data.n = 600\ndata.d = 3\nblb.s = 4\nblb.r = 20\nbootstrap.B = 20\n"
             "truth.replicates = 60\n"},
            {"dfc-accuracy",
             "mat.rows = 30\nmat.cols = 24\nmat.rank = 2\nmat.noise_sigma = 0.1\n"
             "dfc.t = 3\nobserved.percents = 50\ncomplete.k_max = 10\n"},
            {"dfc-runtime",
             "mat.dims = 24,32\nmat.rank = 2\nmat.noise_sigma = 0.1\ndfc.t = 2\n"
             "observed.percent = 50\ncomplete.k_max = 10\n"},
            {"tradeoff-cut-matrix",
             "p = 16\ntrials.complexity = 200\ntrials.risk = 200\ncone.n_gen = 16\n"},
            {"tradeoff-sparse-pca",
             "p = 16\nk = 2\ntrials.complexity = 200\ntrials.risk = 200\ncone.n_gen = 16\n"},
        };

        bool pass = true;
        std::ostringstream detail;
        for (const auto& job : jobs) {
            const Config cfg = Config::parse(job.cfg_text);
            const ExperimentReport a = run_experiment(job.experiment, cfg, 31415, 1);
            const ExperimentReport b = run_experiment(job.experiment, cfg, 31415, 4);
            write_report((root / "a").string(), a);
            write_report((root / "b").string(), b);
            const std::string file = job.experiment + ".csv";
            const bool same = slurp(root / "a" / file) == slurp(root / "b" / file) &&
                              !slurp(root / "a" / file).empty();
            pass = pass && same;
            detail << job.experiment << (same ? " ok; " : " DIFFERS; ");
        }
        fs::remove_all(root);
        return std::make_pair(pass, detail.str());
    });
}

}  // namespace

int main() {
    std::printf("scalestat acceptance suite\n");
    criterion1_bootstrap_oracle();
    criterion2_blb_reduction();
    criterion3_blb_time_error();
    criterion4_m_out_of_n();
    criterion5_exact_recovery();
    criterion6_dfc_reduction();
    criterion7_dfc_accuracy_runtime();
    criterion8_theorem3();
    criterion9_calibration();
    criterion10_orderings();
    criterion11_determinism();
    std::printf("%d of 11 criteria passed\n", 11 - g_failures);
    return g_failures;
}
