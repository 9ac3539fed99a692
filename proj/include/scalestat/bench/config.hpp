#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "scalestat/core/error.hpp"

namespace scalestat {

/// Flat key-value experiment configuration. The file format is one
/// `key = value` pair per line with '#' comments; keys are namespaced with
/// dots (e.g. blb.gamma). Serialization is canonical (sorted keys), so
/// parse -> serialize -> parse is the identity on the key-value map.
class Config {
public:
    Config() = default;

    static Config parse(const std::string& text) {
        Config cfg;
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string trimmed = trim(line);
            if (trimmed.empty()) continue;
            const auto eq = trimmed.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": expected 'key = value'");
            const std::string key = trim(trimmed.substr(0, eq));
            const std::string value = trim(trimmed.substr(eq + 1));
            if (key.empty())
                throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
            cfg.values_[key] = value;
        }
        return cfg;
    }

    static Config load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse(buf.str());
    }

    std::string serialize() const {
        std::ostringstream out;
        for (const auto& [k, v] : values_) out << k << " = " << v << '\n';
        return out.str();
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        const auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    std::string require_string(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("missing required config key: " + key);
        return it->second;
    }

    double get_double(const std::string& key, double fallback) const {
        return has(key) ? to_double(key, values_.at(key)) : fallback;
    }

    std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
        return has(key) ? to_int(key, values_.at(key)) : fallback;
    }

    bool get_bool(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const std::string v = values_.at(key);
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw ConfigError("config key " + key + ": expected boolean, got '" + v + "'");
    }

    std::vector<double> get_double_list(const std::string& key,
                                        const std::vector<double>& fallback) const {
        if (!has(key)) return fallback;
        std::vector<double> out;
        std::istringstream in(values_.at(key));
        std::string item;
        while (std::getline(in, item, ',')) out.push_back(to_double(key, trim(item)));
        if (out.empty()) throw ConfigError("config key " + key + ": empty list");
        return out;
    }

    const std::map<std::string, std::string>& entries() const { return values_; }

    bool operator==(const Config& other) const { return values_ == other.values_; }

private:
    static std::string trim(const std::string& s) {
        const auto begin = s.find_first_not_of(" \t\r\n");
        if (begin == std::string::npos) return "";
        const auto end = s.find_last_not_of(" \t\r\n");
        return s.substr(begin, end - begin + 1);
    }

    static double to_double(const std::string& key, const std::string& v) {
        try {
            std::size_t used = 0;
            const double out = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return out;
        } catch (const std::exception&) {
            throw ConfigError("config key " + key + ": expected number, got '" + v + "'");
        }
    }

    static std::int64_t to_int(const std::string& key, const std::string& v) {
        try {
            std::size_t used = 0;
            const std::int64_t out = std::stoll(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return out;
        } catch (const std::exception&) {
            throw ConfigError("config key " + key + ": expected integer, got '" + v + "'");
        }
    }

    std::map<std::string, std::string> values_;
};

inline const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {
        "blb-curve", "dfc-accuracy", "dfc-runtime", "tradeoff-sparse-pca", "tradeoff-cut-matrix"};
    return names;
}

namespace detail {

inline void require_positive_int(const Config& cfg, const std::string& key,
                                 std::int64_t fallback) {
    const std::int64_t v = cfg.get_int(key, fallback);
    if (v < 1) throw ConfigError("config key " + key + ": must be a positive integer");
}

inline void require_positive_double(const Config& cfg, const std::string& key, double fallback) {
    const double v = cfg.get_double(key, fallback);
    if (!(v > 0.0)) throw ConfigError("config key " + key + ": must be positive");
}

}  // namespace detail

/// Dry-run validation: checks that every experiment-specific parameter that
/// is present (or defaulted) is well formed. Throws ConfigError with the
/// offending key named.
inline void validate_experiment_config(const std::string& experiment, const Config& cfg) {
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), experiment) == names.end())
        throw ConfigError("unknown experiment: " + experiment);

    detail::require_positive_int(cfg, "threads", 4);

    if (experiment == "blb-curve") {
        detail::require_positive_int(cfg, "data.n", 20000);
        detail::require_positive_int(cfg, "data.d", 10);
        detail::require_positive_int(cfg, "blb.s", 10);
        const std::int64_t r = cfg.get_int("blb.r", 50);
        if (r < 2) throw ConfigError("config key blb.r: must be >= 2");
        const double gamma = cfg.get_double("blb.gamma", 0.7);
        if (!(gamma > 0.0 && gamma <= 1.0))
            throw ConfigError("config key blb.gamma: must be in (0,1]");
        const std::string w = cfg.get_string("blb.weighting", "poisson");
        if (w != "poisson" && w != "multinomial")
            throw ConfigError("config key blb.weighting: must be poisson or multinomial");
        const std::int64_t b = cfg.get_int("bootstrap.B", 100);
        if (b < 2) throw ConfigError("config key bootstrap.B: must be >= 2");
        detail::require_positive_int(cfg, "truth.replicates", 2000);
        const double alpha = cfg.get_double("alpha", 0.05);
        if (!(alpha > 0.0 && alpha < 1.0))
            throw ConfigError("config key alpha: must be in (0,1)");
    } else if (experiment == "dfc-accuracy" || experiment == "dfc-runtime") {
        detail::require_positive_int(cfg, "mat.rows", 400);
        detail::require_positive_int(cfg, "mat.cols", 400);
        detail::require_positive_int(cfg, "mat.rank", 5);
        detail::require_positive_double(cfg, "mat.noise_sigma", 0.1);
        detail::require_positive_int(cfg, "dfc.t", 4);
        detail::require_positive_int(cfg, "complete.k_max", 30);
        for (const double f :
             cfg.get_double_list("observed.percents", {5.0, 10.0, 15.0, 25.0, 50.0}))
            if (!(f > 0.0 && f <= 100.0))
                throw ConfigError("config key observed.percents: entries must be in (0,100]");
        if (experiment == "dfc-runtime") {
            for (const double d : cfg.get_double_list("mat.dims", {200.0, 400.0, 800.0}))
                if (!(d >= 2.0)) throw ConfigError("config key mat.dims: entries must be >= 2");
            const double f = cfg.get_double("observed.percent", 25.0);
            if (!(f > 0.0 && f <= 100.0))
                throw ConfigError("config key observed.percent: must be in (0,100]");
        }
    } else {  // tradeoff experiments
        const std::int64_t p = cfg.get_int("p", experiment == "tradeoff-sparse-pca" ? 64 : 16);
        if (p < 4) throw ConfigError("config key p: must be >= 4");
        const auto side = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(p))));
        if (side * side != p) throw ConfigError("config key p: must be a perfect square");
        if (experiment == "tradeoff-cut-matrix" && p > 256)
            throw ConfigError("config key p: cut-matrix vertex enumeration needs p <= 256");
        if (experiment == "tradeoff-sparse-pca") {
            const std::int64_t k = cfg.get_int("k", 2);
            if (k < 1 || k > side)
                throw ConfigError("config key k: must satisfy 1 <= k <= sqrt(p)");
        }
        detail::require_positive_double(cfg, "sigma", 1.0);
        detail::require_positive_int(cfg, "trials.complexity", 10000);
        detail::require_positive_int(cfg, "trials.risk", 10000);
        detail::require_positive_int(cfg, "cone.n_gen", 512);
    }
}

}  // namespace scalestat
