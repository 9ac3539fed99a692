#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "scalestat/core/error.hpp"

namespace scalestat {

/// Per-coordinate confidence intervals at nominal coverage 1 - alpha.
struct IntervalSet {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    double alpha = 0.05;

    Eigen::Index dim() const { return lower.size(); }
    Eigen::VectorXd widths() const { return upper - lower; }

    void validate() const {
        if (lower.size() != upper.size())
            throw std::invalid_argument("IntervalSet: lower/upper length mismatch");
        if (!(alpha > 0.0 && alpha < 1.0))
            throw std::invalid_argument("IntervalSet: alpha must be in (0,1)");
        if ((upper.array() < lower.array()).any())
            throw std::invalid_argument("IntervalSet: upper < lower");
    }
};

/// Type-7 (linear interpolation) quantile of a sorted sample.
inline double quantile_type7_sorted(const std::vector<double>& sorted, double q) {
    const std::size_t n = sorted.size();
    if (n == 0) throw std::invalid_argument("quantile: empty sample");
    if (n == 1) return sorted[0];
    const double h = static_cast<double>(n - 1) * q;
    const double fl = std::floor(h);
    const std::size_t lo = static_cast<std::size_t>(fl);
    if (lo + 1 >= n) return sorted[n - 1];
    return sorted[lo] + (h - fl) * (sorted[lo + 1] - sorted[lo]);
}

/// Per-coordinate empirical (alpha/2, 1-alpha/2) interval over a set of
/// estimates.
inline IntervalSet percentile_interval(const std::vector<Eigen::VectorXd>& estimates,
                                       double alpha) {
    if (estimates.size() < 2)
        throw std::invalid_argument("percentile_interval: need at least 2 estimates");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("percentile_interval: alpha must be in (0,1)");
    const Eigen::Index d = estimates.front().size();
    for (const auto& e : estimates)
        if (e.size() != d)
            throw std::invalid_argument("percentile_interval: inconsistent estimate dimensions");
    IntervalSet out;
    out.alpha = alpha;
    out.lower.resize(d);
    out.upper.resize(d);
    std::vector<double> coord(estimates.size());
    for (Eigen::Index j = 0; j < d; ++j) {
        for (std::size_t b = 0; b < estimates.size(); ++b) coord[b] = estimates[b][j];
        std::sort(coord.begin(), coord.end());
        out.lower[j] = quantile_type7_sorted(coord, alpha / 2.0);
        out.upper[j] = quantile_type7_sorted(coord, 1.0 - alpha / 2.0);
    }
    return out;
}

/// Mean over coordinates of |width(candidate) - width(truth)| / width(truth).
inline double relative_width_error(const Eigen::VectorXd& candidate_widths,
                                   const Eigen::VectorXd& truth_widths) {
    if (candidate_widths.size() != truth_widths.size())
        throw std::invalid_argument("relative_width_error: dimension mismatch");
    double acc = 0.0;
    for (Eigen::Index j = 0; j < truth_widths.size(); ++j) {
        if (truth_widths[j] <= 0.0)
            throw UndefinedMetricError("relative_width_error: zero-width truth coordinate");
        acc += std::abs(candidate_widths[j] - truth_widths[j]) / truth_widths[j];
    }
    return acc / static_cast<double>(truth_widths.size());
}

inline double relative_ci_error(const IntervalSet& candidate, const IntervalSet& truth) {
    if (candidate.dim() != truth.dim() || candidate.alpha != truth.alpha)
        throw std::invalid_argument("relative_ci_error: mismatched interval sets");
    return relative_width_error(candidate.widths(), truth.widths());
}

}  // namespace scalestat
