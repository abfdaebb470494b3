#pragma once
// Mode-wise differential operators on the torus: Leray projection, Stokes
// operator and its fractional powers, dealiasing, Sobolev/Lebesgue norms.

#include <cmath>

#include "cbf/field.hpp"

namespace cbf {

/// kill every mode with any |k_i| > N/3
inline void dealias(SpectralField& f) {
    const Grid& g = f.grid();
    for (int c = 0; c < f.components(); ++c)
        for (Index idx = 0; idx < g.modes(); ++idx)
            if (!g.keep(idx)) f.at(c, idx) = {0.0, 0.0};
}

/// Helmholtz-Hodge projection, mode-wise I - kappa kappa^T / |kappa|^2.
/// The zero mode is cleared (zero-mean constraint).
inline SpectralField leray_project(const SpectralField& f) {
    const Grid& g = f.grid();
    const int d = g.dim();
    const int N = g.points_per_axis();
    SpectralField out(g);
    std::array<int, 3> a{0, 0, 0};
    const int n2 = d == 3 ? N : 1;
    for (a[0] = 0; a[0] < N; ++a[0])
        for (a[1] = 0; a[1] < N; ++a[1])
            for (a[2] = 0; a[2] < n2; ++a[2]) {
                const Index idx = g.flatten(a);
                const double k2 = g.kappa2(idx);
                if (k2 == 0.0) continue;
                Complex dot{0.0, 0.0};
                double kap[3] = {0, 0, 0};
                for (int i = 0; i < d; ++i) {
                    kap[i] = g.kappa_axis(i, a[i]);
                    dot += kap[i] * f.at(i, idx);
                }
                for (int i = 0; i < d; ++i) out.at(i, idx) = f.at(i, idx) - (kap[i] / k2) * dot;
            }
    return out;
}

/// max_k |kappa . c(k)| — zero for solenoidal fields
inline double divergence_linf(const SpectralField& f) {
    const Grid& g = f.grid();
    const int d = g.dim();
    const int N = g.points_per_axis();
    double worst = 0.0;
    std::array<int, 3> a{0, 0, 0};
    const int n2 = d == 3 ? N : 1;
    for (a[0] = 0; a[0] < N; ++a[0])
        for (a[1] = 0; a[1] < N; ++a[1])
            for (a[2] = 0; a[2] < n2; ++a[2]) {
                const Index idx = g.flatten(a);
                Complex dot{0.0, 0.0};
                for (int i = 0; i < d; ++i) dot += g.kappa_axis(i, a[i]) * f.at(i, idx);
                worst = std::max(worst, std::abs(dot));
            }
    return worst;
}

/// Stokes operator A = -Delta on solenoidal fields: c(k) scaled by |kappa|^2
inline SpectralField stokes_apply(const SpectralField& u) {
    const Grid& g = u.grid();
    SpectralField out(g);
    for (int c = 0; c < u.components(); ++c)
        for (Index idx = 0; idx < g.modes(); ++idx) out.at(c, idx) = g.kappa2(idx) * u.at(c, idx);
    return out;
}

/// -Delta without any projection (used by the torus identity check)
inline SpectralField laplacian_neg(const SpectralField& u) { return stokes_apply(u); }

/// A^s: mode-wise |kappa|^{2s}. The zero mode must vanish when s < 0.
inline SpectralField fractional_stokes_apply(const SpectralField& u, double s) {
    const Grid& g = u.grid();
    if (s < 0.0)
        for (int c = 0; c < u.components(); ++c)
            if (std::abs(u.at(c, 0)) != 0.0)
                throw InvalidArgument("fractional_stokes_apply: nonzero zero-mode with s < 0");
    if (s == 0.0) return u;
    if (s == 1.0) return stokes_apply(u);
    SpectralField out(g);
    for (int c = 0; c < u.components(); ++c)
        for (Index idx = 0; idx < g.modes(); ++idx) {
            const double k2 = g.kappa2(idx);
            if (k2 == 0.0) continue;  // zero mode stays zero
            const double w = s == 0.5 ? std::sqrt(k2) : std::pow(k2, s);
            out.at(c, idx) = w * u.at(c, idx);
        }
    return out;
}

/// partial derivative along an axis: multiplication by i kappa_axis
inline SpectralField derivative(const SpectralField& u, int axis) {
    const Grid& g = u.grid();
    const int N = g.points_per_axis();
    SpectralField out(g);
    std::array<int, 3> a{0, 0, 0};
    const int n2 = g.dim() == 3 ? N : 1;
    for (int c = 0; c < u.components(); ++c)
        for (a[0] = 0; a[0] < N; ++a[0])
            for (a[1] = 0; a[1] < N; ++a[1])
                for (a[2] = 0; a[2] < n2; ++a[2]) {
                    const Index idx = g.flatten(a);
                    const double kap = g.kappa_axis(axis, a[axis]);
                    const Complex v = u.at(c, idx);
                    out.at(c, idx) = Complex{-kap * v.imag(), kap * v.real()};
                }
    return out;
}

/// Fourier Sobolev norm (sum |kappa|^{2s} |c|^2 * L^d)^{1/2}; s=0 is the H
/// norm, s=1 the V norm. The zero mode is excluded.
inline double sobolev_norm(const SpectralField& u, double s) {
    const Grid& g = u.grid();
    const double vol = g.volume();
    double acc = 0.0;
    for (int c = 0; c < u.components(); ++c)
        for (Index idx = 0; idx < g.modes(); ++idx) {
            const double k2 = g.kappa2(idx);
            if (k2 == 0.0) continue;
            const double w = s == 0.0 ? 1.0 : (s == 1.0 ? k2 : std::pow(k2, s));
            acc += w * std::norm(u.at(c, idx));
        }
    return std::sqrt(vol * acc);
}

inline double norm_V(const SpectralField& u) { return sobolev_norm(u, 1.0); }

/// collocation-quadrature L^p norm of |u(x)| (exact for trig polynomials
/// only at p = 2; spectrally accurate for band-limited integrands)
inline double lebesgue_norm_phys(const PhysicalField& p, double pexp) {
    const Grid& g = p.grid();
    const double cell = g.cell_volume();
    double acc = 0.0;
    for (Index idx = 0; idx < g.modes(); ++idx) acc += std::pow(p.magnitude(idx), pexp);
    return std::pow(acc * cell, 1.0 / pexp);
}

inline double lebesgue_norm(const SpectralField& u, double pexp) {
    if (!(pexp >= 1.0) || !std::isfinite(pexp)) throw InvalidArgument("lebesgue_norm: p must be finite and >= 1");
    return lebesgue_norm_phys(to_physical(u), pexp);
}

inline double max_pointwise_magnitude(const PhysicalField& p) {
    double m = 0.0;
    for (Index idx = 0; idx < p.grid().modes(); ++idx) m = std::max(m, p.magnitude(idx));
    return m;
}

}  // namespace cbf
