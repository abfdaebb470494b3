#pragma once
// Test-only oracles, independent of the library's FFT and operator paths:
// direct DFT summation, analytic integrals, finite differences.

#include <complex>
#include <vector>

#include "cbf/field.hpp"

namespace cbf::testing {

/// direct inverse-DFT summation u(x_j) = sum_k c_k e^{i kappa . x_j};
/// O(M^2), use only on tiny grids
inline PhysicalField direct_dft_to_physical(const SpectralField& f) {
    const Grid& g = f.grid();
    const int d = g.dim();
    const int N = g.points_per_axis();
    PhysicalField out(g);
    for (Index jx = 0; jx < g.modes(); ++jx) {
        auto aj = g.unflatten(jx);
        for (int c = 0; c < d; ++c) {
            std::complex<double> acc{0.0, 0.0};
            for (Index kx = 0; kx < g.modes(); ++kx) {
                auto ak = g.unflatten(kx);
                double phase = 0.0;
                for (int i = 0; i < d; ++i)
                    phase += 2.0 * Grid::pi() * g.wavenumber(ak[i]) * aj[i] / N;
                acc += f.at(c, kx) * std::complex<double>{std::cos(phase), std::sin(phase)};
            }
            out.at(c, jx) = acc.real();
        }
    }
    return out;
}

/// velocity and all derivatives at grid points by direct mode summation
inline double direct_derivative_at(const SpectralField& f, int comp, int axis, Index jx) {
    const Grid& g = f.grid();
    auto aj = g.unflatten(jx);
    const int N = g.points_per_axis();
    std::complex<double> acc{0.0, 0.0};
    for (Index kx = 0; kx < g.modes(); ++kx) {
        auto ak = g.unflatten(kx);
        double phase = 0.0;
        for (int i = 0; i < g.dim(); ++i)
            phase += 2.0 * Grid::pi() * g.wavenumber(ak[i]) * aj[i] / N;
        const double kap = g.kappa_axis(axis, ak[axis]);
        acc += f.at(comp, kx) * std::complex<double>{0.0, kap} *
               std::complex<double>{std::cos(phase), std::sin(phase)};
    }
    return acc.real();
}

/// quadrature of sum_ij u_i (d_i v_j) w_j with everything evaluated by
/// direct mode sums — an FFT-free route to the trilinear form
inline double direct_trilinear(const SpectralField& u, const SpectralField& v, const SpectralField& w) {
    const Grid& g = u.grid();
    const int d = g.dim();
    PhysicalField up = direct_dft_to_physical(u);
    PhysicalField wp = direct_dft_to_physical(w);
    double acc = 0.0;
    for (Index jx = 0; jx < g.modes(); ++jx) {
        double s = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) s += up.at(i, jx) * direct_derivative_at(v, j, i, jx) * wp.at(j, jx);
        acc += s;
    }
    return acc * g.cell_volume();
}

/// Parseval sum of |kappa|^{2s} |c|^2 * L^d computed with its own loop
inline double parseval_sobolev2(const SpectralField& f, double s) {
    const Grid& g = f.grid();
    double acc = 0.0;
    for (int c = 0; c < f.components(); ++c)
        for (Index idx = 0; idx < g.modes(); ++idx) {
            const double k2 = g.kappa2(idx);
            if (k2 == 0.0) continue;
            acc += std::pow(k2, s) * std::norm(f.at(c, idx));
        }
    return acc * g.volume();
}

inline double rel_err(double got, double want) {
    const double scale = std::max(std::abs(want), 1e-300);
    return std::abs(got - want) / scale;
}

}  // namespace cbf::testing
