#pragma once
// Nonlinear operators of the CBF system: convection B(u,v) = P[(u.grad)v]
// and the trilinear form b, the damping operator C(u) = P(|u|^{r-1}u) with
// its first and second Gateaux derivatives, the linearized convection and
// its adjoint, and the pointwise identity/inequality checks they satisfy.

#include <array>
#include <cmath>

#include "cbf/field.hpp"
#include "cbf/spectral_ops.hpp"

namespace cbf {

namespace detail {

// |u|^e with the case-split guard: branches with negative exponents
// contribute zero where |u| vanishes (threshold 1e-14 * max|u|)
inline double guarded_pow(double mag, double e, double floor_mag) {
    if (e == 0.0) return 1.0;
    if (e < 0.0 && mag <= floor_mag) return 0.0;
    return std::pow(mag, e);
}

// physical samples of all d^2 partial derivatives d v_j / d x_i
inline std::vector<PhysicalField> gradient_all(const SpectralField& v) {
    std::vector<PhysicalField> out;
    out.reserve(static_cast<std::size_t>(v.grid().dim()));
    for (int i = 0; i < v.grid().dim(); ++i) out.push_back(to_physical(derivative(v, i)));
    return out;  // out[i].at(j, x) = d v_j / d x_i
}

inline void postprocess(SpectralField& f) {
    dealias(f);
    f = leray_project(f);
    hermitian_symmetrize(f);
    enforce_zero_mean(f);
}

}  // namespace detail

/// B(u, v) = P[(u.grad)v], pseudo-spectral with two-thirds dealiasing
inline SpectralField bilinear_B(const SpectralField& u, const SpectralField& v) {
    if (!u.grid().same_as(v.grid())) throw InvalidArgument("bilinear_B: grid mismatch");
    const Grid& g = u.grid();
    const int d = g.dim();
    PhysicalField up = to_physical(u);
    auto dv = detail::gradient_all(v);
    PhysicalField w(g);
    for (int j = 0; j < d; ++j)
        for (Index x = 0; x < g.modes(); ++x) {
            double s = 0.0;
            for (int i = 0; i < d; ++i) s += up.at(i, x) * dv[static_cast<std::size_t>(i)].at(j, x);
            w.at(j, x) = s;
        }
    SpectralField out = to_spectral(w);
    detail::postprocess(out);
    return out;
}

/// b(u, v, w) = integral of (u.grad)v . w by collocation quadrature
inline double trilinear_b(const SpectralField& u, const SpectralField& v, const SpectralField& w) {
    if (!u.grid().same_as(v.grid()) || !u.grid().same_as(w.grid()))
        throw InvalidArgument("trilinear_b: grid mismatch");
    const Grid& g = u.grid();
    const int d = g.dim();
    PhysicalField up = to_physical(u);
    PhysicalField wp = to_physical(w);
    auto dv = detail::gradient_all(v);
    double acc = 0.0;
    for (Index x = 0; x < g.modes(); ++x) {
        double s = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) s += up.at(i, x) * dv[static_cast<std::size_t>(i)].at(j, x) * wp.at(j, x);
        acc += s;
    }
    return acc * g.cell_volume();
}

/// C(u) = P(|u|^{r-1} u), evaluated pointwise on the unpadded grid
inline SpectralField damping_C(const SpectralField& u, double r) {
    if (!(r >= 1.0)) throw InvalidArgument("damping_C: r must be >= 1");
    const Grid& g = u.grid();
    PhysicalField up = to_physical(u);
    PhysicalField w(g);
    for (Index x = 0; x < g.modes(); ++x) {
        const double m = r == 1.0 ? 1.0 : std::pow(up.magnitude(x), r - 1.0);
        for (int c = 0; c < g.dim(); ++c) w.at(c, x) = m * up.at(c, x);
    }
    SpectralField out = to_spectral(w);
    detail::postprocess(out);
    return out;
}

/// C'(u)v = P(|u|^{r-1} v) + (r-1) P(u |u|^{r-3} (u.v)); the pointwise
/// branch at u = 0 returns zero for the fractional cases 1 < r < 3
inline SpectralField gateaux_C1(const SpectralField& u, const SpectralField& v, double r) {
    if (!(r >= 1.0)) throw InvalidArgument("gateaux_C1: r must be >= 1");
    if (!u.grid().same_as(v.grid())) throw InvalidArgument("gateaux_C1: grid mismatch");
    const Grid& g = u.grid();
    if (r == 1.0) return leray_project(v);
    PhysicalField up = to_physical(u);
    PhysicalField vp = to_physical(v);
    const double maxu = max_pointwise_magnitude(up);
    const double floor_mag = 1e-14 * maxu;
    PhysicalField w(g);
    for (Index x = 0; x < g.modes(); ++x) {
        const double m = up.magnitude(x);
        double dot = 0.0;
        for (int c = 0; c < g.dim(); ++c) dot += up.at(c, x) * vp.at(c, x);
        const double m1 = detail::guarded_pow(m, r - 1.0, floor_mag);
        const double m3 = detail::guarded_pow(m, r - 3.0, floor_mag);
        for (int c = 0; c < g.dim(); ++c)
            w.at(c, x) = m1 * vp.at(c, x) + (r - 1.0) * m3 * dot * up.at(c, x);
    }
    SpectralField out = to_spectral(w);
    detail::postprocess(out);
    return out;
}

/// second Gateaux derivative C''(u)(v (x) w), defined for r >= 3
inline SpectralField gateaux_C2(const SpectralField& u, const SpectralField& v,
                                const SpectralField& w, double r) {
    if (!(r >= 3.0)) throw InvalidArgument("gateaux_C2: r must be >= 3");
    if (!u.grid().same_as(v.grid()) || !u.grid().same_as(w.grid()))
        throw InvalidArgument("gateaux_C2: grid mismatch");
    const Grid& g = u.grid();
    PhysicalField up = to_physical(u);
    PhysicalField vp = to_physical(v);
    PhysicalField wp = to_physical(w);
    const double maxu = max_pointwise_magnitude(up);
    const double floor_mag = 1e-14 * maxu;
    PhysicalField out_p(g);
    for (Index x = 0; x < g.modes(); ++x) {
        const double m = up.magnitude(x);
        double uv = 0.0, uw = 0.0, vw = 0.0;
        for (int c = 0; c < g.dim(); ++c) {
            uv += up.at(c, x) * vp.at(c, x);
            uw += up.at(c, x) * wp.at(c, x);
            vw += vp.at(c, x) * wp.at(c, x);
        }
        const double m3 = detail::guarded_pow(m, r - 3.0, floor_mag);
        const double m5 = detail::guarded_pow(m, r - 5.0, floor_mag);
        for (int c = 0; c < g.dim(); ++c) {
            double val = (r - 1.0) * m3 * (uw * vp.at(c, x) + uv * wp.at(c, x) + vw * up.at(c, x));
            val += (r - 1.0) * (r - 3.0) * m5 * uv * uw * up.at(c, x);
            out_p.at(c, x) = val;
        }
    }
    SpectralField out = to_spectral(out_p);
    detail::postprocess(out);
    return out;
}

/// the three members of the monotonicity chain (lhs >= rhs1 >= rhs2 >= 0):
/// <C(u)-C(v), u-v>, the half-sum of weighted difference norms, and
/// 2^{1-r} ||u-v||_{L^{r+1}}^{r+1}, all by collocation quadrature
struct MonotonicityGap {
    double lhs;
    double rhs1;
    double rhs2;
};

inline MonotonicityGap monotonicity_gap(const SpectralField& u, const SpectralField& v, double r) {
    if (!u.grid().same_as(v.grid())) throw InvalidArgument("monotonicity_gap: grid mismatch");
    const Grid& g = u.grid();
    PhysicalField up = to_physical(u);
    PhysicalField vp = to_physical(v);
    double lhs = 0.0, rhs1 = 0.0, lr = 0.0;
    for (Index x = 0; x < g.modes(); ++x) {
        const double mu_ = up.magnitude(x);
        const double mv = vp.magnitude(x);
        const double pu = r == 1.0 ? 1.0 : std::pow(mu_, r - 1.0);
        const double pv = r == 1.0 ? 1.0 : std::pow(mv, r - 1.0);
        double d2 = 0.0, dot = 0.0;
        for (int c = 0; c < g.dim(); ++c) {
            const double dc = up.at(c, x) - vp.at(c, x);
            d2 += dc * dc;
            dot += (pu * up.at(c, x) - pv * vp.at(c, x)) * dc;
        }
        lhs += dot;
        rhs1 += 0.5 * (pu + pv) * d2;
        lr += std::pow(d2, 0.5 * (r + 1.0));
    }
    const double cell = g.cell_volume();
    return {lhs * cell, rhs1 * cell, std::pow(2.0, 1.0 - r) * lr * cell};
}

/// B'(u)v = B(u,v) + B(v,u)
inline SpectralField linearized_B(const SpectralField& u, const SpectralField& v) {
    return bilinear_B(u, v) + bilinear_B(v, u);
}

/// adjoint of the linearized convection in H:
/// (B'(u))* z = P[ -(u.grad) z + (grad u)^T z ], so that
/// <B'(u)v, z> = <v, (B'(u))* z> for solenoidal test fields
inline SpectralField adjoint_linearized_B(const SpectralField& u, const SpectralField& z) {
    if (!u.grid().same_as(z.grid())) throw InvalidArgument("adjoint_linearized_B: grid mismatch");
    const Grid& g = u.grid();
    const int d = g.dim();
    PhysicalField up = to_physical(u);
    PhysicalField zp = to_physical(z);
    auto dz = detail::gradient_all(z);
    auto du = detail::gradient_all(u);
    PhysicalField w(g);
    for (int j = 0; j < d; ++j)
        for (Index x = 0; x < g.modes(); ++x) {
            double adv = 0.0, grad_t = 0.0;
            for (int i = 0; i < d; ++i) {
                adv += up.at(i, x) * dz[static_cast<std::size_t>(i)].at(j, x);
                grad_t += du[static_cast<std::size_t>(j)].at(i, x) * zp.at(i, x);
            }
            w.at(j, x) = -adv + grad_t;
        }
    SpectralField out = to_spectral(w);
    detail::postprocess(out);
    return out;
}

/// the torus integration-by-parts identity for the damping term:
/// lhs = int (-Delta y).|y|^{r-1}y, term1 = int |grad y|^2 |y|^{r-1},
/// term2 = 4 (r-1)/(r+1)^2 int |grad |y|^{(r+1)/2}|^2; lhs = term1 + term2
struct TorusIdentity {
    double lhs;
    double term1;
    double term2;
};

inline TorusIdentity torus_identity_check(const SpectralField& y, double r) {
    if (!(r >= 1.0)) throw InvalidArgument("torus_identity_check: r must be >= 1");
    const Grid& g = y.grid();
    const int d = g.dim();
    PhysicalField yp = to_physical(y);
    PhysicalField lap = to_physical(laplacian_neg(y));
    auto dy = detail::gradient_all(y);

    double lhs = 0.0, term1 = 0.0;
    PhysicalField phi(g);  // scalar |y|^{(r+1)/2} carried in component 0
    for (Index x = 0; x < g.modes(); ++x) {
        const double m = yp.magnitude(x);
        const double mr1 = r == 1.0 ? 1.0 : std::pow(m, r - 1.0);
        double dot = 0.0, grad2 = 0.0;
        for (int c = 0; c < d; ++c) {
            dot += lap.at(c, x) * yp.at(c, x);
            for (int i = 0; i < d; ++i) {
                const double dv = dy[static_cast<std::size_t>(i)].at(c, x);
                grad2 += dv * dv;
            }
        }
        lhs += dot * mr1;
        term1 += grad2 * mr1;
        phi.at(0, x) = std::pow(m, 0.5 * (r + 1.0));
    }
    // term2: spectral gradient of the pointwise power (not band-limited in
    // general; spectrally accurate only for smooth |y|)
    SpectralField phis = to_spectral(phi);
    double grad_phi2 = 0.0;
    for (int i = 0; i < d; ++i) {
        SpectralField dphi = derivative(phis, i);
        for (Index idx = 0; idx < g.modes(); ++idx) grad_phi2 += std::norm(dphi.at(0, idx));
    }
    const double cell = g.cell_volume();
    const double vol = g.volume();
    TorusIdentity out;
    out.lhs = lhs * cell;
    out.term1 = term1 * cell;
    out.term2 = 4.0 * (r - 1.0) / ((r + 1.0) * (r + 1.0)) * grad_phi2 * vol;
    return out;
}

/// reported (never asserted) Sobolev-embedding ratio of Remark 2.1:
/// ||u||_{L^{3(r+1)}}^{r+1} vs int |grad u|^2 |u|^{r-1}
struct EmbeddingReport {
    double lhs;
    double rhs;
    double fitted_C;  // lhs / rhs
};

inline EmbeddingReport remark_embedding_ratio(const SpectralField& u, double r) {
    const Grid& g = u.grid();
    PhysicalField up = to_physical(u);
    auto du = detail::gradient_all(u);
    double rhs = 0.0;
    for (Index x = 0; x < g.modes(); ++x) {
        const double m = up.magnitude(x);
        const double mr1 = r == 1.0 ? 1.0 : std::pow(m, r - 1.0);
        double grad2 = 0.0;
        for (int c = 0; c < g.dim(); ++c)
            for (int i = 0; i < g.dim(); ++i) {
                const double dv = du[static_cast<std::size_t>(i)].at(c, x);
                grad2 += dv * dv;
            }
        rhs += grad2 * mr1;
    }
    rhs *= g.cell_volume();
    const double lhs = std::pow(lebesgue_norm_phys(up, 3.0 * (r + 1.0)), r + 1.0);
    return {lhs, rhs, rhs > 0.0 ? lhs / rhs : 0.0};
}

}  // namespace cbf
