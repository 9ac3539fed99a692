#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "scalestat/core/error.hpp"

namespace scalestat {

/// Partially observed matrix: dimensions plus the observed index set and the
/// values at those entries.
struct ObservedMatrix {
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    std::vector<Eigen::Index> omega_i;  // row index per observed entry
    std::vector<Eigen::Index> omega_j;  // column index per observed entry
    Eigen::VectorXd values;             // aligned with omega

    Eigen::Index nnz() const { return static_cast<Eigen::Index>(omega_i.size()); }

    void validate() const {
        if (rows < 1 || cols < 1) throw std::invalid_argument("ObservedMatrix: empty shape");
        if (omega_i.size() != omega_j.size() ||
            static_cast<Eigen::Index>(omega_i.size()) != values.size())
            throw std::invalid_argument("ObservedMatrix: misaligned omega/values");
        if (omega_i.empty()) throw std::invalid_argument("ObservedMatrix: |omega| must be >= 1");
        std::unordered_set<std::int64_t> seen;
        for (std::size_t k = 0; k < omega_i.size(); ++k) {
            const auto i = omega_i[k];
            const auto j = omega_j[k];
            if (i < 0 || i >= rows || j < 0 || j >= cols)
                throw std::invalid_argument("ObservedMatrix: omega entry out of bounds");
            if (!seen.insert(static_cast<std::int64_t>(i) * cols + j).second)
                throw std::invalid_argument("ObservedMatrix: duplicate omega entry");
        }
    }

    Eigen::SparseMatrix<double> to_sparse() const {
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(omega_i.size());
        for (std::size_t k = 0; k < omega_i.size(); ++k)
            trips.emplace_back(static_cast<int>(omega_i[k]), static_cast<int>(omega_j[k]), values[static_cast<Eigen::Index>(k)]);
        Eigen::SparseMatrix<double> sp(rows, cols);
        sp.setFromTriplets(trips.begin(), trips.end());
        return sp;
    }
};

/// MatrixMarket coordinate-format I/O ("%%MatrixMarket matrix coordinate real
/// general", 1-based indices).
inline ObservedMatrix load_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open MatrixMarket file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty MatrixMarket file: " + path);
    if (line.rfind("%%MatrixMarket", 0) != 0 ||
        line.find("coordinate") == std::string::npos)
        throw ConfigError("unsupported MatrixMarket header in " + path);
    do {
        if (!std::getline(in, line)) throw ConfigError("truncated MatrixMarket file: " + path);
    } while (!line.empty() && line[0] == '%');

    ObservedMatrix m;
    Eigen::Index nnz = 0;
    {
        std::istringstream sz(line);
        if (!(sz >> m.rows >> m.cols >> nnz)) throw ConfigError("bad size line in " + path);
    }
    m.omega_i.reserve(static_cast<std::size_t>(nnz));
    m.omega_j.reserve(static_cast<std::size_t>(nnz));
    m.values.resize(nnz);
    for (Eigen::Index k = 0; k < nnz; ++k) {
        Eigen::Index i, j;
        double v;
        if (!(in >> i >> j >> v)) throw ConfigError("truncated entries in " + path);
        m.omega_i.push_back(i - 1);
        m.omega_j.push_back(j - 1);
        m.values[k] = v;
    }
    m.validate();
    return m;
}

inline void store_matrix_market(const std::string& path, const ObservedMatrix& m) {
    m.validate();
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write MatrixMarket file: " + path);
    out.precision(17);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.rows << ' ' << m.cols << ' ' << m.nnz() << '\n';
    for (Eigen::Index k = 0; k < m.nnz(); ++k)
        out << m.omega_i[static_cast<std::size_t>(k)] + 1 << ' '
            << m.omega_j[static_cast<std::size_t>(k)] + 1 << ' ' << m.values[k] << '\n';
}

}  // namespace scalestat
