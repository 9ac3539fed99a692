#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "scalestat/core/dataset.hpp"
#include "scalestat/core/error.hpp"
#include "scalestat/core/parallel.hpp"
#include "scalestat/core/rng.hpp"
#include "scalestat/core/sampling.hpp"
#include "scalestat/core/timer.hpp"
#include "scalestat/estimators/estimators.hpp"
#include "scalestat/estimators/intervals.hpp"

namespace scalestat {

enum class Weighting { poisson, multinomial };

struct BlbConfig {
    double gamma = 0.7;           // m = ceil(n^gamma) unless m_explicit > 0
    Eigen::Index m_explicit = 0;  // overrides gamma when positive
    int s = 10;                   // outer subsamples
    int r = 50;                   // inner resamples per subsample
    Weighting weighting = Weighting::poisson;
    double alpha = 0.05;
    int threads = 1;

    Eigen::Index subsample_size(Eigen::Index n) const {
        Eigen::Index m = m_explicit > 0
                             ? m_explicit
                             : static_cast<Eigen::Index>(
                                   std::ceil(std::pow(static_cast<double>(n), gamma)));
        if (m > n) m = n;
        return m;
    }

    void validate(Eigen::Index n) const {
        if (s < 1) throw std::invalid_argument("BlbConfig: s must be >= 1");
        if (r < 2) throw std::invalid_argument("BlbConfig: r must be >= 2");
        if (m_explicit == 0 && !(gamma > 0.0 && gamma <= 1.0))
            throw std::invalid_argument("BlbConfig: gamma must be in (0,1]");
        const Eigen::Index m = subsample_size(n);
        if (m < 1 || m > n) throw std::invalid_argument("BlbConfig: subsample size out of range");
    }
};

/// Output of a resampling procedure: the quality assessment (per-coordinate
/// CI widths) plus work/time bookkeeping. work_units accumulates the
/// weighted-sample size of every fit performed.
struct QualityEstimate {
    Eigen::VectorXd widths;
    std::optional<IntervalSet> interval;  // absent when widths were averaged
    std::string procedure;
    double work_units = 0.0;
    double wallclock_seconds = 0.0;
    int failed_fits = 0;
    int dropped_subsamples = 0;
};

struct ResampleRun {
    QualityEstimate quality;
    std::vector<Eigen::VectorXd> estimates;
};

/// Plain bootstrap: B multinomial(n; 1/n,...) weighted fits on the full index
/// set. Fit errors propagate, tagged with the resample id.
inline ResampleRun bootstrap(const Dataset& data, const EstimatorSpec& spec, int B,
                             RngStream rng, double alpha = 0.05, int threads = 1) {
    if (B < 2) throw std::invalid_argument("bootstrap: B must be >= 2");
    data.validate();
    const Eigen::Index n = data.n();
    std::vector<Eigen::Index> all(n);
    std::iota(all.begin(), all.end(), Eigen::Index{0});

    Stopwatch clock;
    std::vector<Eigen::VectorXd> estimates(static_cast<std::size_t>(B));
    parallel_for(static_cast<std::size_t>(B), threads, [&](std::size_t b) {
        RngStream task = rng.child(b);
        WeightedSample sample;
        sample.indices = all;
        sample.weights = multinomial_weights(n, n, task);
        sample.nominal_size = n;
        try {
            estimates[b] = fit(spec, data, sample);
        } catch (const NumericalError& e) {
            throw NumericalError("bootstrap resample " + std::to_string(b) + ": " + e.what());
        }
    });

    ResampleRun run;
    run.estimates = std::move(estimates);
    run.quality.interval = percentile_interval(run.estimates, alpha);
    run.quality.widths = run.quality.interval->widths();
    run.quality.procedure = "bootstrap";
    run.quality.work_units = static_cast<double>(B) * static_cast<double>(n);
    run.quality.wallclock_seconds = clock.seconds();
    return run;
}

namespace detail {

struct SubsampleQuality {
    Eigen::VectorXd widths;
    int failed_fits = 0;
    bool usable = false;
    double wallclock_seconds = 0.0;
};

/// One BLB subsample: draw r weight vectors of nominal size n over the m
/// subsampled points, fit each, and assess quality as percentile CI widths of
/// the r estimates. Individual fit failures are dropped; the subsample is
/// unusable when fewer than two fits survive.
inline SubsampleQuality blb_subsample_quality(const Dataset& data, const EstimatorSpec& spec,
                                              const std::vector<Eigen::Index>& indices,
                                              std::int64_t nominal, int r, Weighting weighting,
                                              double alpha, RngStream rng) {
    Stopwatch clock;
    const Eigen::Index m = static_cast<Eigen::Index>(indices.size());
    SubsampleQuality q;
    std::vector<Eigen::VectorXd> estimates;
    estimates.reserve(static_cast<std::size_t>(r));
    for (int j = 0; j < r; ++j) {
        RngStream inner = rng.child(static_cast<std::uint64_t>(j));
        WeightedSample sample;
        sample.indices = indices;
        sample.weights = (weighting == Weighting::poisson) ? poisson_weights(m, nominal, inner)
                                                           : multinomial_weights(m, nominal, inner);
        sample.nominal_size = nominal;
        if (!(sample.weights.array() > 0.0).any()) {
            ++q.failed_fits;  // all-zero Poisson draw cannot be fit
            continue;
        }
        try {
            estimates.push_back(fit(spec, data, sample));
        } catch (const NumericalError&) {
            ++q.failed_fits;
        }
    }
    if (estimates.size() >= 2) {
        q.widths = percentile_interval(estimates, alpha).widths();
        q.usable = true;
    }
    q.wallclock_seconds = clock.seconds();
    return q;
}

}  // namespace detail

struct BlbRun {
    QualityEstimate quality;
    std::vector<Eigen::VectorXd> subsample_widths;  // usable subsamples, outer order
    Eigen::Index m = 0;
};

/// Bag of Little Bootstraps: s independent subsamples of size m; on each, r
/// nominal-size-n weighted resamples; the s per-subsample width vectors are
/// averaged coordinate-wise. Subsamples whose fits all fail are dropped and
/// reported. Deterministic for a fixed stream regardless of thread schedule.
inline BlbRun blb(const Dataset& data, const EstimatorSpec& spec, const BlbConfig& cfg,
                  RngStream rng) {
    data.validate();
    const Eigen::Index n = data.n();
    cfg.validate(n);
    const Eigen::Index m = cfg.subsample_size(n);

    Stopwatch clock;
    std::vector<detail::SubsampleQuality> results(static_cast<std::size_t>(cfg.s));
    parallel_for(static_cast<std::size_t>(cfg.s), cfg.threads, [&](std::size_t i) {
        RngStream outer = rng.child(i);
        RngStream pick = outer.child(0);
        const auto indices = subsample_indices(n, m, pick);
        results[i] = detail::blb_subsample_quality(data, spec, indices, n, cfg.r, cfg.weighting,
                                                   cfg.alpha, outer.child(1));
    });

    BlbRun run;
    run.m = m;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(spec.dim);
    int usable = 0;
    for (const auto& q : results) {
        run.quality.failed_fits += q.failed_fits;
        if (!q.usable) {
            ++run.quality.dropped_subsamples;
            continue;
        }
        acc += q.widths;
        run.subsample_widths.push_back(q.widths);
        ++usable;
    }
    if (usable == 0) throw NumericalError("blb: every subsample failed");
    run.quality.widths = acc / static_cast<double>(usable);
    run.quality.procedure = "blb";
    run.quality.work_units = static_cast<double>(cfg.s) * static_cast<double>(cfg.r) *
                             static_cast<double>(m);
    run.quality.wallclock_seconds = clock.seconds();
    return run;
}

/// m-out-of-n bootstrap (with replacement) / subsampling (without): B size-m
/// samples, estimator fit on each, widths rescaled by the analytical
/// correction factor sqrt(m/n).
inline ResampleRun m_out_of_n(const Dataset& data, const EstimatorSpec& spec, Eigen::Index m,
                              int B, bool with_replacement, RngStream rng, double alpha = 0.05,
                              int threads = 1) {
    data.validate();
    const Eigen::Index n = data.n();
    if (m < 1 || m > n) throw std::invalid_argument("m_out_of_n: m must satisfy 1 <= m <= n");
    if (B < 2) throw std::invalid_argument("m_out_of_n: B must be >= 2");

    Stopwatch clock;
    std::vector<Eigen::VectorXd> estimates(static_cast<std::size_t>(B));
    std::vector<double> per_fit_rows(static_cast<std::size_t>(B), 0.0);
    parallel_for(static_cast<std::size_t>(B), threads, [&](std::size_t b) {
        RngStream task = rng.child(b);
        WeightedSample sample;
        if (with_replacement) {
            // Aggregate duplicate draws into weights so indices stay distinct.
            std::unordered_map<Eigen::Index, double> counts;
            for (Eigen::Index t = 0; t < m; ++t)
                counts[static_cast<Eigen::Index>(task.uniform_below(static_cast<std::uint64_t>(n)))] += 1.0;
            sample.indices.reserve(counts.size());
            std::vector<std::pair<Eigen::Index, double>> sorted(counts.begin(), counts.end());
            std::sort(sorted.begin(), sorted.end());
            sample.weights.resize(static_cast<Eigen::Index>(sorted.size()));
            for (std::size_t t = 0; t < sorted.size(); ++t) {
                sample.indices.push_back(sorted[t].first);
                sample.weights[static_cast<Eigen::Index>(t)] = sorted[t].second;
            }
        } else {
            sample.indices = subsample_indices(n, m, task);
            sample.weights = Eigen::VectorXd::Ones(m);
        }
        sample.nominal_size = m;
        per_fit_rows[b] = static_cast<double>(sample.indices.size());
        try {
            estimates[b] = fit(spec, data, sample);
        } catch (const NumericalError& e) {
            throw NumericalError("m_out_of_n resample " + std::to_string(b) + ": " + e.what());
        }
    });

    ResampleRun run;
    run.estimates = std::move(estimates);
    const double correction = std::sqrt(static_cast<double>(m) / static_cast<double>(n));
    run.quality.interval = percentile_interval(run.estimates, alpha);
    run.quality.widths = run.quality.interval->widths() * correction;
    run.quality.procedure = with_replacement ? "m_out_of_n" : "subsampling";
    run.quality.work_units = std::accumulate(per_fit_rows.begin(), per_fit_rows.end(), 0.0);
    run.quality.wallclock_seconds = clock.seconds();
    return run;
}

}  // namespace scalestat
