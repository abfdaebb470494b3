#pragma once

#include <cmath>
#include <string>

#include "cbf/error.hpp"
#include "cbf/grid.hpp"

namespace cbf {

/// Physical coefficients of the damped Navier-Stokes system: viscosity mu,
/// Darcy coefficient alpha, Forchheimer coefficient beta, absorption
/// exponent r, and the noise intensity sigma (0 for deterministic runs).
struct PhysParams {
    double mu = 1e-2;
    double alpha = 0.1;
    double beta = 1.0;
    double r = 3.0;
    double sigma = 0.0;

    void validate() const {
        if (!(mu > 0.0)) throw InvalidArgument("PhysParams: mu must be > 0");
        if (!(alpha > 0.0)) throw InvalidArgument("PhysParams: alpha must be > 0");
        if (!(beta > 0.0)) throw InvalidArgument("PhysParams: beta must be > 0");
        if (!(r >= 1.0)) throw InvalidArgument("PhysParams: r must be >= 1");
    }

    /// d=2 admits any r >= 1; d=3 requires r >= 3 (global solvability regime)
    bool regime_admissible(int d) const { return d == 2 ? r >= 1.0 : r >= 3.0; }

    /// critical 3D case d = r = 3 needs 2 beta mu >= 1 for the energy estimates
    bool critical_warning(int d) const { return d == 3 && r == 3.0 && 2.0 * beta * mu < 1.0; }

    void check_regime(int d, bool allow_unsafe = false) const {
        validate();
        if (!regime_admissible(d)) {
            if (!allow_unsafe)
                throw RegimeError("regime d=3, r<3 is refused (well-posedness open); pass --unsafe-regime to force");
        }
    }
};

/// constants derived from grid and parameters and recorded in manifests
struct DerivedConstants {
    double lambda1 = 0.0;   // 4 pi^2 / L^2
    double vartheta = 0.0;  // ((r-3)/(r-1)) (4/(beta mu (r-1)))^{2/(r-3)}, r > 3

    static DerivedConstants make(const Grid& g, const PhysParams& p) {
        DerivedConstants c;
        c.lambda1 = g.lambda1();
        if (p.r > 3.0)
            c.vartheta = (p.r - 3.0) / (p.r - 1.0) *
                         std::pow(4.0 / (p.beta * p.mu * (p.r - 1.0)), 2.0 / (p.r - 3.0));
        return c;
    }
};

}  // namespace cbf
