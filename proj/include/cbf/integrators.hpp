#pragma once
// Time integration of the projected CBF system, its linearization, the
// backward dual system and the pathwise random system. The linear part
// mu A + alpha is integrated exactly per mode (integrating factor); the
// nonlinear terms are advanced with explicit midpoint RK2 applied in the
// exponentially transformed variable.

#include <cmath>
#include <functional>
#include <map>

#include "cbf/brownian.hpp"
#include "cbf/forcing.hpp"
#include "cbf/operators.hpp"
#include "cbf/params.hpp"
#include "cbf/trajectory.hpp"

namespace cbf {

struct SolveOptions {
    long snapshot_stride = 1;
    int max_step_halvings = 6;
    bool allow_unsafe_regime = false;
    /// called at every accepted node, including the initial one
    std::function<void(long step, double t, const SpectralField& u)> hook;
};

namespace detail {

struct NodeStats {
    double Lr1 = 0.0;
    double max_mag = 0.0;
};

// per-mode exp(-(mu |kappa|^2 + shift) dt) for the full and half step
struct LinearSymbols {
    std::vector<double> efull;
    std::vector<double> ehalf;
};

inline LinearSymbols make_symbols(const Grid& g, double mu, double shift, double dt) {
    LinearSymbols s;
    s.efull.resize(static_cast<std::size_t>(g.modes()));
    s.ehalf.resize(static_cast<std::size_t>(g.modes()));
    for (Index idx = 0; idx < g.modes(); ++idx) {
        const double ell = mu * g.kappa2(idx) + shift;
        s.efull[static_cast<std::size_t>(idx)] = std::exp(-ell * dt);
        s.ehalf[static_cast<std::size_t>(idx)] = std::exp(-0.5 * ell * dt);
    }
    return s;
}

inline void apply_symbol(SpectralField& f, const std::vector<double>& sym) {
    const Grid& g = f.grid();
    for (int c = 0; c < f.components(); ++c)
        for (Index idx = 0; idx < g.modes(); ++idx) f.at(c, idx) *= sym[static_cast<std::size_t>(idx)];
}

// fused explicit rhs of the projected system: -(u.grad)u - beta |u|^{r-1} u + f, projected
inline SpectralField rhs_cbf(double t, const SpectralField& u, const PhysParams& p,
                             const ForcingSpec& f, double nl_scale_B, double nl_scale_C,
                             double f_scale) {
    const Grid& g = u.grid();
    const int d = g.dim();
    PhysicalField up = to_physical(u);
    auto du = gradient_all(u);
    PhysicalField w(g);
    for (int j = 0; j < d; ++j)
        for (Index x = 0; x < g.modes(); ++x) {
            double conv = 0.0;
            for (int i = 0; i < d; ++i) conv += up.at(i, x) * du[static_cast<std::size_t>(i)].at(j, x);
            const double m = up.magnitude(x);
            const double damp = p.r == 1.0 ? up.at(j, x) : std::pow(m, p.r - 1.0) * up.at(j, x);
            w.at(j, x) = -nl_scale_B * conv - nl_scale_C * p.beta * damp;
        }
    SpectralField out = to_spectral(w);
    postprocess(out);
    if (f_scale != 0.0 && !f.is_zero()) {
        SpectralField ff(g);
        f.add_to(t, ff);
        axpy(f_scale, ff, out);
    }
    return out;
}

// fused tangent rhs: -[B(u,v) + B(v,u)] - beta C'(u) v
inline SpectralField rhs_tangent(const SpectralField& ubase, const SpectralField& v,
                                 const PhysParams& p) {
    const Grid& g = v.grid();
    const int d = g.dim();
    PhysicalField up = to_physical(ubase);
    PhysicalField vp = to_physical(v);
    auto du = gradient_all(ubase);
    auto dv = gradient_all(v);
    const double maxu = max_pointwise_magnitude(up);
    const double floor_mag = 1e-14 * maxu;
    PhysicalField w(g);
    const double r = p.r;
    for (Index x = 0; x < g.modes(); ++x) {
        const double m = up.magnitude(x);
        double uv = 0.0;
        for (int c = 0; c < d; ++c) uv += up.at(c, x) * vp.at(c, x);
        const double m1 = r == 1.0 ? 1.0 : std::pow(m, r - 1.0);
        const double m3 = r == 1.0 ? 0.0 : guarded_pow(m, r - 3.0, floor_mag);
        for (int j = 0; j < d; ++j) {
            double conv = 0.0;
            for (int i = 0; i < d; ++i)
                conv += up.at(i, x) * dv[static_cast<std::size_t>(i)].at(j, x) +
                        vp.at(i, x) * du[static_cast<std::size_t>(i)].at(j, x);
            double cp = m1 * vp.at(j, x);
            if (r != 1.0) cp += (r - 1.0) * m3 * uv * up.at(j, x);
            w.at(j, x) = -conv - p.beta * cp;
        }
    }
    SpectralField out = to_spectral(w);
    postprocess(out);
    return out;
}

// fused adjoint rhs: -(B'(u))* z - beta C'(u) z, with
// (B'(u))* z = P[-(u.grad) z + (grad u)^T z]
inline SpectralField rhs_adjoint(const SpectralField& ubase, const SpectralField& z,
                                 const PhysParams& p) {
    const Grid& g = z.grid();
    const int d = g.dim();
    PhysicalField up = to_physical(ubase);
    PhysicalField zp = to_physical(z);
    auto du = gradient_all(ubase);
    auto dz = gradient_all(z);
    const double maxu = max_pointwise_magnitude(up);
    const double floor_mag = 1e-14 * maxu;
    PhysicalField w(g);
    const double r = p.r;
    for (Index x = 0; x < g.modes(); ++x) {
        const double m = up.magnitude(x);
        double uz = 0.0;
        for (int c = 0; c < d; ++c) uz += up.at(c, x) * zp.at(c, x);
        const double m1 = r == 1.0 ? 1.0 : std::pow(m, r - 1.0);
        const double m3 = r == 1.0 ? 0.0 : guarded_pow(m, r - 3.0, floor_mag);
        for (int j = 0; j < d; ++j) {
            double adv = 0.0, grad_t = 0.0;
            for (int i = 0; i < d; ++i) {
                adv += up.at(i, x) * dz[static_cast<std::size_t>(i)].at(j, x);
                grad_t += du[static_cast<std::size_t>(j)].at(i, x) * zp.at(i, x);
            }
            double cp = m1 * zp.at(j, x);
            if (r != 1.0) cp += (r - 1.0) * m3 * uz * up.at(j, x);
            w.at(j, x) = adv - grad_t - p.beta * cp;  // minus (B'(u))* z
        }
    }
    SpectralField out = to_spectral(w);
    postprocess(out);
    return out;
}

// one explicit-midpoint step in the integrating-factor variable:
//   u* = E_half (u + dt/2 N(t, u)),  u1 = E u + dt E_half N(t + dt/2, u*)
template <class Rhs>
SpectralField if_rk2_step(const SpectralField& u, double t, double dt, const LinearSymbols& sym,
                          Rhs&& rhs, double* repair) {
    SpectralField k1 = rhs(t, u);
    SpectralField mid = u;
    axpy(0.5 * dt, k1, mid);
    apply_symbol(mid, sym.ehalf);
    SpectralField k2 = rhs(t + 0.5 * dt, mid);
    SpectralField out = u;
    apply_symbol(out, sym.efull);
    apply_symbol(k2, sym.ehalf);
    axpy(dt, k2, out);
    // invariant repair: project, symmetrize, clear the mean; log the size
    SpectralField repaired = leray_project(out);
    hermitian_symmetrize(repaired);
    enforce_zero_mean(repaired);
    if (repair) {
        const double n = norm_H(repaired);
        *repair = n > 0.0 ? norm_H(repaired - out) / n : 0.0;
    }
    return repaired;
}

}  // namespace detail

/// One IMEX step of the projected system. Throws BlowupError if the
/// result is not finite.
inline SpectralField step_cbf(const SpectralField& state, double t, double dt,
                              const PhysParams& params, const ForcingSpec& forcing) {
    const auto sym = detail::make_symbols(state.grid(), params.mu, params.alpha, dt);
    auto rhs = [&](double tt, const SpectralField& u) {
        return detail::rhs_cbf(tt, u, params, forcing, 1.0, 1.0, 1.0);
    };
    double rep = 0.0;
    SpectralField out = detail::if_rk2_step(state, t, dt, sym, rhs, &rep);
    if (!finite(out)) throw BlowupError("step_cbf: non-finite coefficients", 0);
    return out;
}

namespace detail {

// shared forward driver for the deterministic and pathwise random systems;
// `shift` is the zeroth-order linear coefficient (alpha, or alpha+sigma^2/2)
template <class RhsFactory>
Trajectory solve_forward(const SpectralField& initial, const TimeGrid& tg, const PhysParams& params,
                         const ForcingSpec& forcing, const SolveOptions& opt, double shift,
                         RhsFactory&& rhs_for_step) {
    const Grid& g = initial.grid();
    Trajectory traj(g, tg, opt.snapshot_stride);
    traj.scalars.reserve(static_cast<std::size_t>(tg.n_steps) + 1);

    std::map<long, LinearSymbols> symbol_cache;  // keyed by substep count
    auto symbols_for = [&](long nsub) -> const LinearSymbols& {
        auto it = symbol_cache.find(nsub);
        if (it == symbol_cache.end())
            it = symbol_cache.emplace(nsub, make_symbols(g, params.mu, shift, tg.dt / nsub)).first;
        return it->second;
    };

    SpectralField u = initial;
    hermitian_symmetrize(u);
    enforce_zero_mean(u);

    auto record_node = [&](long step, const SpectralField& uu, const NodeStats& st) {
        StepScalars s;
        s.t = tg.time(step);
        const double h = norm_H(uu);
        s.H2 = h * h;
        const double v = sobolev_norm(uu, 1.0);
        s.V2 = v * v;
        s.Lr1 = st.Lr1;
        s.max_mag = st.max_mag;
        s.finner = forcing.inner_with(s.t, uu);
        traj.scalars.push_back(s);
        if (opt.hook) opt.hook(step, s.t, uu);
    };

    auto phys_stats = [&](const SpectralField& uu) {
        NodeStats st;
        PhysicalField up = to_physical(uu);
        double lr = 0.0, mm = 0.0;
        for (Index x = 0; x < g.modes(); ++x) {
            const double m = up.magnitude(x);
            lr += std::pow(m, params.r + 1.0);
            mm = std::max(mm, m);
        }
        st.Lr1 = lr * g.cell_volume();
        st.max_mag = mm;
        return st;
    };

    traj.add_snapshot(0, u);
    NodeStats st0 = phys_stats(u);
    record_node(0, u, st0);
    double max_mag = st0.max_mag;

    for (long step = 0; step < tg.n_steps; ++step) {
        const double t = tg.time(step);
        // explicit-damping step-size guard: dt beta max|u|^{r-1} < 1/2
        long nsub = 1;
        int halvings = 0;
        auto damping_cfl = [&](long ns) {
            const double pw = params.r == 1.0 ? 1.0 : std::pow(max_mag, params.r - 1.0);
            return (tg.dt / ns) * params.beta * pw;
        };
        while (damping_cfl(nsub) >= 0.5 && halvings < opt.max_step_halvings) {
            nsub *= 2;
            ++halvings;
        }
        if (damping_cfl(nsub) >= 0.5) {
            traj.guard_failed = true;
            traj.blowup_step = step;
            return traj;
        }
        const LinearSymbols& sym = symbols_for(nsub);
        const double sdt = tg.dt / nsub;
        double rep = 0.0;
        for (long s = 0; s < nsub; ++s) {
            auto rhs = rhs_for_step(step);
            u = if_rk2_step(u, t + s * sdt, sdt, sym, rhs, &rep);
            traj.max_repair = std::max(traj.max_repair, rep);
            if (!finite(u)) {
                traj.blowup_step = step + 1;
                return traj;
            }
        }
        const long node = step + 1;
        NodeStats node_st = phys_stats(u);
        max_mag = node_st.max_mag;
        record_node(node, u, node_st);
        if (node % traj.stride() == 0 || node == tg.n_steps) traj.add_snapshot(node, u);
    }
    return traj;
}

}  // namespace detail

/// Integrate the projected CBF system (forward), invoking the hook at every
/// node and storing snapshots at the configured stride. Blow-up (or a failed
/// step-size guard) terminates the run with the partial trajectory retained.
inline Trajectory solve_cbf(const SpectralField& initial, const TimeGrid& tg,
                            const PhysParams& params, const ForcingSpec& forcing,
                            const SolveOptions& opt = {}) {
    params.check_regime(initial.grid().dim(), opt.allow_unsafe_regime);
    auto factory = [&](long) {
        return [&](double tt, const SpectralField& uu) {
            return detail::rhs_cbf(tt, uu, params, forcing, 1.0, 1.0, 1.0);
        };
    };
    return detail::solve_forward(initial, tg, params, forcing, opt, params.alpha, factory);
}

namespace detail {

inline void require_dense_base(const Trajectory& base, const TimeGrid& tg) {
    if (!base.dense())
        throw InvalidArgument("linearized/adjoint solve: base trajectory gap larger than dt");
    if (base.time_grid().n_steps != tg.n_steps || base.time_grid().dt != tg.dt ||
        base.time_grid().t0 != tg.t0)
        throw InvalidArgument("linearized/adjoint solve: time grid must match the base trajectory");
}

// base state at node j and at the midpoint between j and j+1 (linear interp)
inline SpectralField base_mid(const Trajectory& base, long j) {
    SpectralField m = base.field_at_step(j);
    m += base.field_at_step(j + 1);
    m *= 0.5;
    return m;
}

}  // namespace detail

/// Integrate the linearized system along a stored base trajectory,
/// v(0) = y. The base must be stored at every step.
inline Trajectory solve_linearized(const Trajectory& base, const SpectralField& y,
                                   const TimeGrid& tg, const PhysParams& params,
                                   const SolveOptions& opt = {}) {
    detail::require_dense_base(base, tg);
    const Grid& g = y.grid();
    Trajectory traj(g, tg, opt.snapshot_stride);
    const auto sym = detail::make_symbols(g, params.mu, params.alpha, tg.dt);

    SpectralField v = leray_project(y);
    hermitian_symmetrize(v);
    enforce_zero_mean(v);
    traj.add_snapshot(0, v);

    for (long step = 0; step < tg.n_steps; ++step) {
        // stage 1 freezes the base at the node, stage 2 at the midpoint
        const SpectralField& u0 = base.field_at_step(step);
        SpectralField umid = detail::base_mid(base, step);
        SpectralField k1 = detail::rhs_tangent(u0, v, params);
        SpectralField mid = v;
        axpy(0.5 * tg.dt, k1, mid);
        detail::apply_symbol(mid, sym.ehalf);
        SpectralField k2 = detail::rhs_tangent(umid, mid, params);
        SpectralField out = v;
        detail::apply_symbol(out, sym.efull);
        detail::apply_symbol(k2, sym.ehalf);
        axpy(tg.dt, k2, out);
        v = leray_project(out);
        hermitian_symmetrize(v);
        enforce_zero_mean(v);
        if (!finite(v)) {
            traj.blowup_step = step + 1;
            return traj;
        }
        const long node = step + 1;
        StepScalars s;
        s.t = tg.time(node);
        const double h = norm_H(v);
        s.H2 = h * h;
        const double vn = sobolev_norm(v, 1.0);
        s.V2 = vn * vn;
        traj.scalars.push_back(s);
        if (node % traj.stride() == 0 || node == tg.n_steps) traj.add_snapshot(node, v);
        if (opt.hook) opt.hook(node, s.t, v);
    }
    return traj;
}

enum class AdjointMode {
    time_reversed,       // substitute s = T - t, reuse the forward stepper
    discrete_transpose,  // exact transpose of the discrete tangent propagator
};

/// Integrate the backward dual system from z(T) = p down to t0. The
/// returned trajectory is indexed in forward time (snapshot at step 0 is
/// z(t0)).
inline Trajectory solve_adjoint(const Trajectory& base, const SpectralField& p, const TimeGrid& tg,
                                const PhysParams& params, const SolveOptions& opt = {},
                                AdjointMode mode = AdjointMode::time_reversed) {
    detail::require_dense_base(base, tg);
    const Grid& g = p.grid();
    const auto sym = detail::make_symbols(g, params.mu, params.alpha, tg.dt);

    SpectralField z = leray_project(p);
    hermitian_symmetrize(z);
    enforce_zero_mean(z);

    std::vector<SpectralField> states;
    states.reserve(static_cast<std::size_t>(tg.n_steps) + 1);
    states.push_back(z);

    for (long j = tg.n_steps; j > 0; --j) {
        // backward step from node j to node j-1
        const SpectralField& u_lo = base.field_at_step(j - 1);
        const SpectralField& u_hi = base.field_at_step(j);
        SpectralField umid = detail::base_mid(base, j - 1);
        SpectralField out(g);
        if (mode == AdjointMode::time_reversed) {
            SpectralField k1 = detail::rhs_adjoint(u_hi, z, params);
            SpectralField mid = z;
            axpy(0.5 * tg.dt, k1, mid);
            detail::apply_symbol(mid, sym.ehalf);
            SpectralField k2 = detail::rhs_adjoint(umid, mid, params);
            out = z;
            detail::apply_symbol(out, sym.efull);
            detail::apply_symbol(k2, sym.ehalf);
            axpy(tg.dt, k2, out);
        } else {
            // z_{j-1} = M_j^T z_j for the tangent one-step map M_j
            SpectralField a = z;
            detail::apply_symbol(a, sym.ehalf);
            SpectralField b = detail::rhs_adjoint(umid, a, params);
            out = a;
            axpy(tg.dt, b, out);
            detail::apply_symbol(out, sym.ehalf);
            SpectralField bh = b;
            detail::apply_symbol(bh, sym.ehalf);
            SpectralField c = detail::rhs_adjoint(u_lo, bh, params);
            axpy(0.5 * tg.dt * tg.dt, c, out);
        }
        z = leray_project(out);
        hermitian_symmetrize(z);
        enforce_zero_mean(z);
        if (!finite(z)) {
            Trajectory traj(g, tg, opt.snapshot_stride);
            traj.blowup_step = j - 1;
            return traj;
        }
        states.push_back(z);
    }

    Trajectory traj(g, tg, opt.snapshot_stride);
    for (long node = 0; node <= tg.n_steps; ++node) {
        const SpectralField& zz = states[static_cast<std::size_t>(tg.n_steps - node)];
        StepScalars s;
        s.t = tg.time(node);
        const double h = norm_H(zz);
        s.H2 = h * h;
        traj.scalars.push_back(s);
        if (node % traj.stride() == 0 || node == 0 || node == tg.n_steps) traj.add_snapshot(node, zz);
        if (opt.hook) opt.hook(node, s.t, zz);
    }
    return traj;
}

/// result of a pathwise stochastic run: the transformed variable v, the
/// recovered velocity u = v / z, and the driving path
struct StochasticRun {
    Trajectory v;
    Trajectory u;
    BrownianPath path;
};

/// Integrate the pathwise random system: z is frozen at the left node
/// inside each step, and u(t) = v(t)/z(t) is recovered at the nodes.
inline StochasticRun solve_stochastic(const SpectralField& initial, const TimeGrid& tg,
                                      const PhysParams& params, const ForcingSpec& forcing,
                                      const BrownianPath& path, const SolveOptions& opt = {}) {
    params.check_regime(initial.grid().dim(), opt.allow_unsafe_regime);
    if (path.times.size() != static_cast<std::size_t>(tg.n_steps) + 1)
        throw InvalidArgument("solve_stochastic: Brownian path does not match the time grid");
    const double shift = params.alpha + 0.5 * params.sigma * params.sigma;
    auto factory = [&](long step) {
        const double zj = path.z[static_cast<std::size_t>(step)];
        const double invz = 1.0 / zj;
        const double zpow = params.r == 1.0 ? 1.0 : std::pow(zj, 1.0 - params.r);
        return [&, invz, zpow, zj](double tt, const SpectralField& vv) {
            return detail::rhs_cbf(tt, vv, params, forcing, invz, zpow, zj);
        };
    };
    StochasticRun run{Trajectory(initial.grid(), tg, opt.snapshot_stride),
                      Trajectory(initial.grid(), tg, opt.snapshot_stride), path};
    run.v = detail::solve_forward(initial, tg, params, forcing, opt, shift, factory);

    // recover u = v / z at the stored nodes and scalar series
    Trajectory u(initial.grid(), tg, opt.snapshot_stride);
    u.blowup_step = run.v.blowup_step;
    u.guard_failed = run.v.guard_failed;
    u.max_repair = run.v.max_repair;
    for (std::size_t i = 0; i < run.v.scalars.size(); ++i) {
        const double z = path.z[i];
        StepScalars s = run.v.scalars[i];
        s.H2 /= z * z;
        s.V2 /= z * z;
        s.Lr1 /= std::pow(z, params.r + 1.0);
        s.max_mag /= z;
        u.scalars.push_back(s);
    }
    for (std::size_t i = 0; i < run.v.snapshot_steps().size(); ++i) {
        const long step = run.v.snapshot_steps()[i];
        SpectralField uf = run.v.snapshots()[i];
        uf *= 1.0 / path.z[static_cast<std::size_t>(step)];
        u.add_snapshot(step, uf);
    }
    run.u = std::move(u);
    return run;
}

}  // namespace cbf
