#pragma once

#include <Eigen/Core>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "scalestat/core/error.hpp"

namespace scalestat {

inline constexpr const char* kCsvSchemaHeader = "# scalestat-schema v1";

/// One deterministic result record. Wallclock measurements are kept apart
/// (TimingRow) so the result files are byte-reproducible across reruns and
/// thread counts.
struct ResultRow {
    std::string experiment;
    std::string params;  // canonical "k=v;k=v" snapshot
    std::string metric;
    double value = 0.0;
    double work_units = 0.0;
};

struct TimingRow {
    std::string experiment;
    std::string params;
    std::string metric;
    double seconds = 0.0;
};

namespace detail {

// Shortest round-trip decimal representation, locale independent.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

inline void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write CSV file: " + path);
    out << kCsvSchemaHeader << '\n';
    out << "experiment,params,metric,value,work_units\n";
    for (const auto& r : rows)
        out << r.experiment << ',' << r.params << ',' << r.metric << ','
            << detail::format_double(r.value) << ',' << detail::format_double(r.work_units)
            << '\n';
}

inline void write_timings_csv(const std::string& path, const std::vector<TimingRow>& rows) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write CSV file: " + path);
    out << kCsvSchemaHeader << '\n';
    out << "experiment,params,metric,wallclock_seconds\n";
    for (const auto& r : rows)
        out << r.experiment << ',' << r.params << ',' << r.metric << ','
            << detail::format_double(r.seconds) << '\n';
}

/// Per-resample estimate export: one row per resample, one column per
/// coordinate.
inline void write_estimates_csv(const std::string& path,
                                const std::vector<Eigen::VectorXd>& estimates) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write CSV file: " + path);
    out << kCsvSchemaHeader << '\n';
    if (estimates.empty()) return;
    const Eigen::Index d = estimates.front().size();
    for (Eigen::Index j = 0; j < d; ++j) out << (j > 0 ? "," : "") << "theta" << j;
    out << '\n';
    for (const auto& e : estimates) {
        for (Eigen::Index j = 0; j < d; ++j)
            out << (j > 0 ? "," : "") << detail::format_double(e[j]);
        out << '\n';
    }
}

}  // namespace scalestat
