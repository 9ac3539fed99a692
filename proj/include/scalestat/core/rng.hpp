#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace scalestat {

/// Splittable deterministic random stream.
///
/// A stream is identified by a (seed, stream_id) pair. Identical pairs
/// reproduce byte-identical sequences; distinct pairs give statistically
/// independent sequences. Parallel tasks derive their own streams via
/// child(k) without any coordination, so results are independent of the
/// thread schedule.
///
/// The generator is xoshiro256++ with SplitMix64 state initialization
/// (https://prng.di.unimi.it/). Normal and Poisson variates are generated
/// in-house so that sequences do not depend on the standard library
/// implementation.
class RngStream {
public:
    RngStream() : RngStream(0, 0) {}

    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_id_(stream_id) {
        std::uint64_t x = mix64(seed + 0x9e3779b97f4a7c15ULL);
        x = mix64(x ^ mix64(stream_id + 0xbf58476d1ce4e5b9ULL));
        for (auto& s : state_) {
            x += 0x9e3779b97f4a7c15ULL;
            s = mix64(x);
        }
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    /// Derived stream for subtask k. Children of distinct (parent, k) pairs
    /// are independent streams.
    RngStream child(std::uint64_t k) const {
        return RngStream(seed_, mix64(stream_id_ ^ mix64(k + 0x94d049bb133111ebULL)));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Unbiased uniform integer in [0, bound).
    std::uint64_t uniform_below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
        const std::uint64_t threshold = (-bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    /// Standard normal variate (Marsaglia polar method).
    double normal() {
        for (;;) {
            const double u = 2.0 * uniform() - 1.0;
            const double v = 2.0 * uniform() - 1.0;
            const double s = u * u + v * v;
            if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }

    Eigen::VectorXd normal_vector(Eigen::Index n) {
        Eigen::VectorXd out(n);
        Eigen::Index i = 0;
        while (i < n) {
            const double u = 2.0 * uniform() - 1.0;
            const double v = 2.0 * uniform() - 1.0;
            const double s = u * u + v * v;
            if (s <= 0.0 || s >= 1.0) continue;
            const double f = std::sqrt(-2.0 * std::log(s) / s);
            out[i++] = u * f;
            if (i < n) out[i++] = v * f;
        }
        return out;
    }

    Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols) {
        Eigen::MatrixXd out(rows, cols);
        Eigen::Map<Eigen::VectorXd>(out.data(), rows * cols) = normal_vector(rows * cols);
        return out;
    }

    /// Poisson variate. Sequential inversion for small rates, Hormann's PTRD
    /// transformed rejection for large ones.
    std::uint64_t poisson(double rate) {
        if (rate < 0.0) throw std::invalid_argument("poisson: rate must be nonnegative");
        if (rate == 0.0) return 0;
        if (rate < 10.0) return poisson_inversion(rate);
        return poisson_ptrd(rate);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    // SplitMix64 finalizer.
    static std::uint64_t mix64(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t poisson_inversion(double rate) {
        const double p0 = std::exp(-rate);
        std::uint64_t k = 0;
        double p = p0;
        double cdf = p0;
        const double u = uniform();
        while (u > cdf) {
            ++k;
            p *= rate / static_cast<double>(k);
            cdf += p;
            if (k > 2000) break;  // u in the far tail; cdf has saturated
        }
        return k;
    }

    // W. Hormann, "The transformed rejection method for generating Poisson
    // random variables" (1993), algorithm PTRD. Valid for rate >= 10.
    std::uint64_t poisson_ptrd(double rate) {
        const double smu = std::sqrt(rate);
        const double b = 0.931 + 2.53 * smu;
        const double a = -0.059 + 0.02483 * b;
        const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        const double v_r = 0.9277 - 3.6224 / (b - 2.0);
        for (;;) {
            double u = uniform() - 0.5;
            const double v = uniform();
            const double us = 0.5 - std::abs(u);
            const double kf = std::floor((2.0 * a / us + b) * u + rate + 0.43);
            if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
            if (kf < 0.0 || (us < 0.013 && v > us)) continue;
            if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
                kf * std::log(rate) - rate - std::lgamma(kf + 1.0)) {
                return static_cast<std::uint64_t>(kf);
            }
        }
    }

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t state_[4];
};

}  // namespace scalestat
