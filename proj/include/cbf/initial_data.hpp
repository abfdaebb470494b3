#pragma once
// Initial-condition builders: Taylor-Green cells, single eigenmodes, shear
// profiles, and seeded random solenoidal fields with spectral decay.

#include <random>

#include "cbf/field.hpp"
#include "cbf/spectral_ops.hpp"

namespace cbf {

/// set the +/-k coefficient pair so the field stays real:
/// contributes 2 Re(c e^{i kappa.x}) along direction dir
inline void set_mode_pair(SpectralField& f, const std::array<int, 3>& k, int comp, Complex c) {
    const Grid& g = f.grid();
    std::array<int, 3> a{0, 0, 0};
    const int N = g.points_per_axis();
    for (int i = 0; i < g.dim(); ++i) a[i] = k[i] >= 0 ? k[i] : k[i] + N;
    const Index idx = g.flatten(a);
    const Index jdx = conjugate_index(g, idx);
    f.at(comp, idx) += c;
    if (jdx != idx) f.at(comp, jdx) += std::conj(c);
}

/// u1 = A sin(2 pi m x / L) cos(2 pi m y / L), u2 = -A cos... (solenoidal);
/// in 3D the classic z-independent Taylor-Green cell with zero third component.
inline SpectralField taylor_green(const Grid& g, double amplitude = 1.0, int m = 1) {
    SpectralField f(g);
    // sin a cos b = ( e^{i(a+b)} + e^{i(a-b)} - e^{-i(a-b)} - e^{-i(a+b)} ) / (4i)
    const Complex quarter_over_i{0.0, -0.25};
    const double A = amplitude;
    if (g.dim() == 2) {
        set_mode_pair(f, {m, m, 0}, 0, A * quarter_over_i);
        set_mode_pair(f, {m, -m, 0}, 0, A * quarter_over_i);
        set_mode_pair(f, {m, m, 0}, 1, -A * quarter_over_i);
        set_mode_pair(f, {-m, m, 0}, 1, -A * quarter_over_i);
    } else {
        // u = A (sin x cos y, -cos x sin y, 0) * cos z at m-th harmonic
        // sin a cos b cos c expands over eight exponentials; build from pairs
        auto add3 = [&](int comp, int sx, int sy, int sz, Complex c) {
            set_mode_pair(f, {sx * m, sy * m, sz * m}, comp, c);
        };
        const Complex c0 = A * Complex{0.0, -0.125};  // 1/(8i)
        // sin x cos y cos z: sum over sy, sz of sign(+) exponentials
        add3(0, 1, 1, 1, c0);
        add3(0, 1, 1, -1, c0);
        add3(0, 1, -1, 1, c0);
        add3(0, 1, -1, -1, c0);
        const Complex c1 = -A * Complex{0.0, -0.125};
        add3(1, 1, 1, 1, c1);
        add3(1, -1, 1, 1, c1);
        add3(1, 1, 1, -1, c1);
        add3(1, -1, 1, -1, c1);
    }
    hermitian_symmetrize(f);
    enforce_zero_mean(f);
    return leray_project(f);
}

/// unidirectional shear u = (A g(x_2), 0[, 0]) with g a single harmonic
inline SpectralField shear_mode(const Grid& g, double amplitude = 1.0, int m = 1, bool cosine = false) {
    SpectralField f(g);
    const Complex c = cosine ? Complex{0.5 * amplitude, 0.0} : Complex{0.0, -0.5 * amplitude};
    set_mode_pair(f, {0, m, 0}, 0, c);  // A sin(2 pi m x2/L) or A cos(...)
    hermitian_symmetrize(f);
    enforce_zero_mean(f);
    return f;
}

/// seeded random solenoidal dealiased field with |c_k| ~ exp(-decay |k|),
/// scaled to the requested H norm
inline SpectralField random_solenoidal(const Grid& g, std::uint64_t seed, double h_norm = 1.0,
                                       double decay = 0.7, int max_wavenumber = 0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    SpectralField f(g);
    const int cut = max_wavenumber > 0 ? std::min(max_wavenumber, g.dealias_cut()) : g.dealias_cut();
    for (Index idx = 0; idx < g.modes(); ++idx) {
        if (!g.keep(idx)) continue;
        auto k = g.lattice_of(idx);
        if (!lattice_pair_representative(k, g.dim())) continue;
        double kmag = 0.0;
        bool inside = true;
        for (int i = 0; i < g.dim(); ++i) {
            if (std::abs(k[i]) > cut) inside = false;
            kmag += static_cast<double>(k[i]) * k[i];
        }
        if (!inside) continue;
        kmag = std::sqrt(kmag);
        const double amp = std::exp(-decay * kmag);
        std::array<int, 3> a{0, 0, 0};
        const int N = g.points_per_axis();
        for (int i = 0; i < g.dim(); ++i) a[i] = k[i] >= 0 ? k[i] : k[i] + N;
        const Index pidx = g.flatten(a);
        for (int c = 0; c < g.dim(); ++c) f.at(c, pidx) = amp * Complex{gauss(rng), gauss(rng)};
    }
    // mirror and clean up
    SpectralField out(g);
    for (int c = 0; c < g.dim(); ++c)
        for (Index idx = 0; idx < g.modes(); ++idx) {
            const Index jdx = conjugate_index(g, idx);
            out.at(c, idx) = f.at(c, idx) + std::conj(f.at(c, jdx));
        }
    enforce_zero_mean(out);
    out = leray_project(out);
    dealias(out);
    const double n = norm_H(out);
    if (n > 0.0) out *= h_norm / n;
    return out;
}

/// smooth solenoidal zero-mean 3D field whose pointwise magnitude stays
/// bounded away from zero: u = (sin z, 2 sin x + cos z, 2 cos x), optionally
/// perturbed. Useful for checks involving fractional powers of |u|.
inline SpectralField nonvanishing_solenoidal_3d(const Grid& g, double pert = 0.0,
                                                std::uint64_t seed = 1) {
    if (g.dim() != 3) throw InvalidArgument("nonvanishing_solenoidal_3d: d must be 3");
    SpectralField f(g);
    const Complex half{0.5, 0.0};
    const Complex mhalf_i{0.0, -0.5};
    set_mode_pair(f, {0, 0, 1}, 0, mhalf_i);        // sin z
    set_mode_pair(f, {1, 0, 0}, 1, 2.0 * mhalf_i);  // 2 sin x
    set_mode_pair(f, {0, 0, 1}, 1, half);           // cos z
    set_mode_pair(f, {1, 0, 0}, 2, 2.0 * half);     // 2 cos x
    hermitian_symmetrize(f);
    enforce_zero_mean(f);
    if (pert > 0.0) f += random_solenoidal(g, seed, pert, 0.8);
    return leray_project(f);
}

/// single solenoidal eigenmode pair: 2 Re(c e^{i kappa.x}) along the given
/// polarization; an eigenfunction of A with eigenvalue |kappa|^2
inline SpectralField eigenmode(const Grid& g, const std::array<int, 3>& k, int pol = 0,
                               double amplitude = 1.0, int phase = 0) {
    SpectralField f(g);
    auto basis = polarization_basis(g, k);
    const Complex c = phase == 0 ? Complex{0.5 * amplitude, 0.0} : Complex{0.0, -0.5 * amplitude};
    for (int i = 0; i < g.dim(); ++i) set_mode_pair(f, k, i, c * basis[static_cast<std::size_t>(pol)][i]);
    enforce_zero_mean(f);
    return f;
}

}  // namespace cbf
