#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "cbf/error.hpp"
#include "cbf/time_grid.hpp"

namespace cbf {

/// One-dimensional Wiener path sampled on the time grid, W(t0) = 0, together
/// with the exponential transform z(t) = e^{-sigma W(t)}. Increments are
/// Normal(0, dt) drawn reproducibly from the seed.
struct BrownianPath {
    std::uint64_t seed = 0;
    double sigma = 0.0;
    std::vector<double> times;
    std::vector<double> W;
    std::vector<double> z;

    static BrownianPath sample(const TimeGrid& tg, std::uint64_t seed, double sigma) {
        BrownianPath p;
        p.seed = seed;
        p.sigma = sigma;
        p.times.resize(static_cast<std::size_t>(tg.n_steps) + 1);
        p.W.resize(p.times.size());
        p.z.resize(p.times.size());
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        const double sq = std::sqrt(tg.dt);
        p.times[0] = tg.t0;
        p.W[0] = 0.0;
        p.z[0] = 1.0;
        for (long j = 1; j <= tg.n_steps; ++j) {
            p.times[static_cast<std::size_t>(j)] = tg.time(j);
            p.W[static_cast<std::size_t>(j)] = p.W[static_cast<std::size_t>(j - 1)] + sq * gauss(rng);
            const double arg = -sigma * p.W[static_cast<std::size_t>(j)];
            if (std::abs(arg) > 700.0)
                throw BlowupError("BrownianPath: |sigma W| > 700, exponential transform under/overflows", j);
            p.z[static_cast<std::size_t>(j)] = std::exp(arg);
        }
        return p;
    }

    double sup_exp_neg2sigmaW() const {
        double m = 0.0;
        for (double w : W) m = std::max(m, std::exp(-2.0 * sigma * w));
        return m;
    }
};

}  // namespace cbf
