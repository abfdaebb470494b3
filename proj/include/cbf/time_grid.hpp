#pragma once

#include <cmath>

#include "cbf/error.hpp"

namespace cbf {

/// uniform time grid on [t0, T]; (T - t0)/dt must be a whole number of steps
struct TimeGrid {
    double t0 = 0.0;
    double T = 1.0;
    double dt = 1e-3;
    long n_steps = 0;

    TimeGrid() : TimeGrid(0.0, 1.0, 1e-3) {}
    TimeGrid(double t0_, double T_, double dt_) : t0(t0_), T(T_), dt(dt_) {
        if (!(dt > 0.0)) throw InvalidArgument("TimeGrid: dt must be positive");
        if (!(T > t0)) throw InvalidArgument("TimeGrid: T must exceed t0");
        n_steps = std::lround((T - t0) / dt);
        if (n_steps < 1 || std::abs(n_steps * dt - (T - t0)) > 1e-9 * (T - t0))
            throw InvalidArgument("TimeGrid: (T - t0) must be an integer number of steps");
    }

    double time(long j) const { return t0 + j * dt; }
};

}  // namespace cbf
