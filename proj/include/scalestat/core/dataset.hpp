#pragma once

#include <Eigen/Core>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "scalestat/core/error.hpp"

namespace scalestat {

/// In-memory dataset: n observation rows of d features plus an optional
/// response column. Desk scale only -- everything stays resident.
struct Dataset {
    Eigen::MatrixXd features;                 // n x d
    std::optional<Eigen::VectorXd> response;  // length n when present
    std::vector<std::string> feature_names;   // empty => x0..x{d-1} on store

    Eigen::Index n() const { return features.rows(); }
    Eigen::Index dim() const { return features.cols(); }

    void validate() const {
        if (features.rows() < 1) throw std::invalid_argument("Dataset: n must be >= 1");
        if (response && response->size() != features.rows())
            throw std::invalid_argument("Dataset: response length != n");
        if (!feature_names.empty() &&
            static_cast<Eigen::Index>(feature_names.size()) != features.cols())
            throw std::invalid_argument("Dataset: feature_names length != d");
    }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace detail

/// Loads a dataset from CSV (header row, one observation per line). If
/// `response_column` is nonempty, that column becomes the response and the
/// remaining columns the features, in file order.
inline Dataset load_dataset_csv(const std::string& path, const std::string& response_column = "") {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open dataset file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty dataset file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = detail::split_csv_line(line);
    std::ptrdiff_t response_idx = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (!response_column.empty() && header[c] == response_column)
            response_idx = static_cast<std::ptrdiff_t>(c);
    }
    if (!response_column.empty() && response_idx < 0)
        throw ConfigError("response column '" + response_column + "' not found in " + path);

    std::vector<std::vector<double>> rows;
    std::vector<double> resp;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != header.size())
            throw ConfigError("ragged CSV row in " + path);
        std::vector<double> row;
        row.reserve(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c) {
            double v;
            try {
                v = std::stod(fields[c]);
            } catch (const std::exception&) {
                throw ConfigError("non-numeric CSV field '" + fields[c] + "' in " + path);
            }
            if (static_cast<std::ptrdiff_t>(c) == response_idx)
                resp.push_back(v);
            else
                row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ConfigError("dataset has no observation rows: " + path);

    Dataset ds;
    const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index d = static_cast<Eigen::Index>(rows.front().size());
    ds.features.resize(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(rows[i].size()) != d)
            throw ConfigError("ragged CSV row in " + path);
        for (Eigen::Index j = 0; j < d; ++j) ds.features(i, j) = rows[i][j];
    }
    if (response_idx >= 0) {
        ds.response = Eigen::Map<Eigen::VectorXd>(resp.data(), n);
    }
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (static_cast<std::ptrdiff_t>(c) != response_idx) ds.feature_names.push_back(header[c]);
    }
    ds.validate();
    return ds;
}

inline void store_dataset_csv(const std::string& path, const Dataset& ds,
                              const std::string& response_column = "y") {
    ds.validate();
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write dataset file: " + path);
    out.precision(17);
    for (Eigen::Index j = 0; j < ds.dim(); ++j) {
        if (j > 0) out << ',';
        if (ds.feature_names.empty())
            out << 'x' << j;
        else
            out << ds.feature_names[static_cast<std::size_t>(j)];
    }
    if (ds.response) out << (ds.dim() > 0 ? "," : "") << response_column;
    out << '\n';
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
        for (Eigen::Index j = 0; j < ds.dim(); ++j) {
            if (j > 0) out << ',';
            out << ds.features(i, j);
        }
        if (ds.response) out << (ds.dim() > 0 ? "," : "") << (*ds.response)[i];
        out << '\n';
    }
}

}  // namespace scalestat
