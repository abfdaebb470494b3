#pragma once
// Scalar monitors for solver runs: energy-equality residual, the Dirichlet
// quotients of solution differences, the log-Dirichlet quotient, the
// backward-uniqueness two-solution experiment, log-Lipschitz ratio reports
// and the pathwise energy bound of the random system.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "cbf/brownian.hpp"
#include "cbf/forcing.hpp"
#include "cbf/integrators.hpp"
#include "cbf/operators.hpp"
#include "cbf/params.hpp"
#include "cbf/trajectory.hpp"

namespace cbf {

inline double quiet_nan() { return std::numeric_limits<double>::quiet_NaN(); }

/// one CSV row; quantities that do not apply to a run are NaN
struct DiagnosticsRecord {
    double t = 0.0;
    double H_norm = 0.0;
    double V_norm = 0.0;
    double Lr1_norm = 0.0;
    double energy_residual = 0.0;
    double Lambda = quiet_nan();
    double LambdaTilde = quiet_nan();
    double LambdaHat = quiet_nan();
    double Qtilde = quiet_nan();
    double separation = quiet_nan();
};

inline const char* diagnostics_csv_header() {
    return "t,H_norm,V_norm,Lr1_norm,energy_residual,Lambda,LambdaTilde,LambdaHat,Qtilde,separation";
}

inline void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRecord>& rows) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << diagnostics_csv_header() << "\n";
    char buf[512];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf),
                      "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.H_norm,
                      r.V_norm, r.Lr1_norm, r.energy_residual, r.Lambda, r.LambdaTilde, r.LambdaHat,
                      r.Qtilde, r.separation);
        out << buf;
    }
}

// ---------------------------------------------------------------------------
// energy-equality residual

/// cumulative defect of the energy equality along a trajectory:
/// ||u(t)||^2 + 2 int (mu ||u||_V^2 + alpha ||u||^2 + beta ||u||_{r+1}^{r+1})
/// - ||x||^2 - 2 int <f, u>, trapezoid quadrature in time
struct EnergyResidualSeries {
    std::vector<double> t;
    std::vector<double> residual;
    double h2_initial = 0.0;

    double max_abs() const {
        double m = 0.0;
        for (double r : residual) m = std::max(m, std::abs(r));
        return m;
    }
    double max_rel() const { return h2_initial > 0.0 ? max_abs() / h2_initial : max_abs(); }
};

inline EnergyResidualSeries energy_residual(const Trajectory& traj, const PhysParams& p) {
    EnergyResidualSeries out;
    const auto& s = traj.scalars;
    if (s.empty()) return out;
    out.h2_initial = s.front().H2;
    out.t.reserve(s.size());
    out.residual.reserve(s.size());
    const double dt = traj.time_grid().dt;
    double diss = 0.0;  // running trapezoid of 2(mu V2 + alpha H2 + beta Lr1)
    double work = 0.0;  // running trapezoid of 2 <f, u>
    auto g = [&](const StepScalars& x) {
        return 2.0 * (p.mu * x.V2 + p.alpha * x.H2 + p.beta * x.Lr1);
    };
    out.t.push_back(s.front().t);
    out.residual.push_back(0.0);
    for (std::size_t j = 1; j < s.size(); ++j) {
        diss += 0.5 * dt * (g(s[j - 1]) + g(s[j]));
        work += 0.5 * dt * (2.0 * s[j - 1].finner + 2.0 * s[j].finner);
        out.t.push_back(s[j].t);
        out.residual.push_back(s[j].H2 + diss - out.h2_initial - work);
    }
    return out;
}

// ---------------------------------------------------------------------------
// quotients

namespace detail {

inline double separation_floor(const SpectralField& u1) {
    return 1e3 * std::numeric_limits<double>::epsilon() * norm_H(u1);
}

inline void check_distinct(const SpectralField& u1, double sep) {
    if (sep <= separation_floor(u1))
        throw InvalidArgument("quotient undefined: inputs coincide up to the separation floor");
}

}  // namespace detail

/// Lambda = <A(u), u> / ||u||_H^2 for u = u1 - u2, with the nonlinear part
/// A(u) = mu A u + alpha u + beta [C(u1) - C(u2)]. Asserts the Poincare
/// lower bound Lambda >= mu lambda_1.
inline double quotient_Lambda(const SpectralField& u1, const SpectralField& u2,
                              const PhysParams& p) {
    SpectralField u = u1 - u2;
    const double h = norm_H(u);
    detail::check_distinct(u1, h);
    const double v = sobolev_norm(u, 1.0);
    // <C(u1) - C(u2), u> by pointwise quadrature (nonnegative by monotonicity)
    const Grid& g = u.grid();
    PhysicalField p1 = to_physical(u1);
    PhysicalField p2 = to_physical(u2);
    double cterm = 0.0;
    for (Index x = 0; x < g.modes(); ++x) {
        const double m1 = p.r == 1.0 ? 1.0 : std::pow(p1.magnitude(x), p.r - 1.0);
        const double m2 = p.r == 1.0 ? 1.0 : std::pow(p2.magnitude(x), p.r - 1.0);
        for (int c = 0; c < g.dim(); ++c) {
            const double diff = p1.at(c, x) - p2.at(c, x);
            cterm += (m1 * p1.at(c, x) - m2 * p2.at(c, x)) * diff;
        }
    }
    cterm *= g.cell_volume();
    const double lam = (p.mu * v * v + p.alpha * h * h + p.beta * cterm) / (h * h);
    const double lower = p.mu * g.lambda1();
    if (lam < lower * (1.0 - 1e-12))
        throw AssertionError("quotient_Lambda: Poincare lower bound violated");
    return lam;
}

/// LambdaTilde = (mu ||u||_V^2 + alpha ||u||^2) / ||u||^2
inline double quotient_LambdaTilde(const SpectralField& u1, const SpectralField& u2,
                                   const PhysParams& p) {
    SpectralField u = u1 - u2;
    const double h = norm_H(u);
    detail::check_distinct(u1, h);
    const double v = sobolev_norm(u, 1.0);
    const double lam = (p.mu * v * v + p.alpha * h * h) / (h * h);
    if (lam < p.mu * u.grid().lambda1() * (1.0 - 1e-12))
        throw AssertionError("quotient_LambdaTilde: Poincare lower bound violated");
    return lam;
}

/// LambdaHat: as LambdaTilde with the Ito-shifted coefficient alpha + sigma^2/2
inline double quotient_LambdaHat(const SpectralField& v1, const SpectralField& v2,
                                 const PhysParams& p) {
    SpectralField u = v1 - v2;
    const double h = norm_H(u);
    detail::check_distinct(v1, h);
    const double v = sobolev_norm(u, 1.0);
    const double shift = p.alpha + 0.5 * p.sigma * p.sigma;
    const double lam = (p.mu * v * v + shift * h * h) / (h * h);
    if (lam < p.mu * u.grid().lambda1() * (1.0 - 1e-12))
        throw AssertionError("quotient_LambdaHat: Poincare lower bound violated");
    return lam;
}

/// log-Dirichlet quotient LambdaTilde / log(M0^2 / ||u1-u2||^2); requires
/// M0 >= 4 max(||u1||, ||u2||) so the denominator is at least log 4
inline double quotient_Qtilde(const SpectralField& u1, const SpectralField& u2,
                              const PhysParams& p, double M0) {
    const double need = 4.0 * std::max(norm_H(u1), norm_H(u2));
    if (M0 < need) throw InvalidArgument("quotient_Qtilde: M0 below 4 max ||u_i||_H");
    const double lt = quotient_LambdaTilde(u1, u2, p);
    SpectralField u = u1 - u2;
    const double h2 = inner_product_H(u, u);
    return lt / std::log(M0 * M0 / h2);
}

/// M0 policy: 4x the largest H norm over the sampled set, rounded up to the
/// next power of two
inline double round_up_pow2(double x) {
    if (!(x > 0.0)) return 1.0;
    double p = std::exp2(std::ceil(std::log2(x)));
    if (p < x) p *= 2.0;
    return p;
}

inline double default_M0(const std::vector<SpectralField>& set) {
    double m = 0.0;
    for (const auto& u : set) m = std::max(m, norm_H(u));
    return round_up_pow2(4.0 * m);
}

// ---------------------------------------------------------------------------
// backward-uniqueness two-solution experiment

struct BackwardUniquenessReport {
    std::vector<double> t;
    std::vector<double> separation;   // ||u1 - u2||_H
    std::vector<double> Lambda;       // quotient at snapshot times
    std::vector<double> neg_dlog_fd;  // -(d/dt) log ||u|| by centered differences
    std::vector<double> neg_dlog_id;  // Lambda - <h(u), u>/||u||^2
    double min_separation = 0.0;
    double max_Lambda = 0.0;
    double max_discrepancy_rel = 0.0;  // between the two -(d/dt) log ||u|| routes
    bool degenerate = false;           // separation hit exact floating-point zero
    Trajectory traj1;
    Trajectory traj2;
};

/// co-evolve two solutions and reconstruct the log-separation identity both
/// ways; eval_stride controls how often the quotient terms are evaluated
inline BackwardUniquenessReport backward_uniqueness_experiment(
    const SpectralField& x1, const SpectralField& x2, const TimeGrid& tg, const PhysParams& params,
    const ForcingSpec& forcing, long eval_stride = 1, const SolveOptions& base_opt = {}) {
    if (norm_H(x1 - x2) == 0.0)
        throw InvalidArgument("backward_uniqueness_experiment: initial data coincide");
    SolveOptions opt = base_opt;
    opt.snapshot_stride = eval_stride;
    Trajectory t1 = solve_cbf(x1, tg, params, forcing, opt);
    Trajectory t2 = solve_cbf(x2, tg, params, forcing, opt);
    if (t1.blew_up() || t2.blew_up())
        throw BlowupError("backward_uniqueness_experiment: trajectory blew up",
                          t1.blew_up() ? *t1.blowup_step : *t2.blowup_step);

    BackwardUniquenessReport rep{{}, {}, {}, {}, {}, 0.0, 0.0, 0.0, false, t1, t2};
    const auto& steps = t1.snapshot_steps();
    rep.min_separation = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const long n = steps[i];
        const SpectralField& u1 = t1.field_at_step(n);
        const SpectralField& u2 = t2.field_at_step(n);
        SpectralField u = u1 - u2;
        const double sep = norm_H(u);
        if (sep == 0.0) rep.degenerate = true;
        rep.t.push_back(tg.time(n));
        rep.separation.push_back(sep);
        rep.min_separation = std::min(rep.min_separation, sep);
        double lam = quiet_nan(), rhs = quiet_nan();
        if (sep > detail::separation_floor(u1)) {
            lam = quotient_Lambda(u1, u2, params);
            // h(u) = -[B(u1,u) + B(u,u2)] so <h,u> = -b(u1,u,u) - b(u,u2,u)
            const double hu = -trilinear_b(u1, u, u) - trilinear_b(u, u2, u);
            rhs = lam - hu / (sep * sep);
        }
        rep.Lambda.push_back(lam);
        rep.max_Lambda = std::max(rep.max_Lambda, lam);
        rep.neg_dlog_id.push_back(rhs);
    }
    // centered differences of -log separation (one-sided at the ends)
    rep.neg_dlog_fd.assign(rep.t.size(), quiet_nan());
    for (std::size_t i = 0; i < rep.t.size(); ++i) {
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = i + 1 == rep.t.size() ? i : i + 1;
        if (hi == lo) continue;
        rep.neg_dlog_fd[i] =
            -(std::log(rep.separation[hi]) - std::log(rep.separation[lo])) / (rep.t[hi] - rep.t[lo]);
    }
    const double floor = params.mu * x1.grid().lambda1();
    for (std::size_t i = 1; i + 1 < rep.t.size(); ++i) {
        if (!std::isfinite(rep.neg_dlog_id[i]) || !std::isfinite(rep.neg_dlog_fd[i])) continue;
        const double scale = std::max(std::abs(rep.neg_dlog_id[i]), floor);
        rep.max_discrepancy_rel =
            std::max(rep.max_discrepancy_rel, std::abs(rep.neg_dlog_fd[i] - rep.neg_dlog_id[i]) / scale);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// log-Lipschitz ratios over a sampled set

/// fitted ratios of the attractor log-Lipschitz estimates over a sample of
/// field pairs; all constants here are reported, never asserted against
/// specific values
struct LogLipschitzReport {
    double M0 = 0.0;        // >= 4 sup ||x||_H over the set
    double M0_hat = 0.0;    // >= 4 sup ||A^{1/2} x||_H
    double grad_log_ratio = 0.0;  // sup ||w||_V^2 / (||w||^2 log(M0^2/||w||^2))
    double stokes_log_ratio = 0.0; // sup ||A w|| / (||w|| log(M0hat^2/||w||^2))
    double stokes_grad_log_ratio = 0.0;  // sup ||A w||^2 / (||A^{1/2}w||^2 log(M0hat^2/||A^{1/2}w||^2))
    double grad_ratio_unlogged = 0.0;  // sup ||w||_V^2/||w||^2, reported only
    std::size_t pair_count = 0;
    std::size_t argmax_i = 0, argmax_j = 0;  // pair attaining grad_log_ratio
};

inline LogLipschitzReport log_lipschitz_ratios(const std::vector<SpectralField>& points,
                                               double M0 = 0.0) {
    LogLipschitzReport rep;
    if (points.size() < 2) return rep;
    double maxH = 0.0, maxA = 0.0;
    for (const auto& u : points) {
        maxH = std::max(maxH, norm_H(u));
        maxA = std::max(maxA, sobolev_norm(u, 1.0));
    }
    rep.M0 = M0 > 0.0 ? M0 : round_up_pow2(4.0 * maxH);
    if (rep.M0 < 4.0 * maxH) throw InvalidArgument("log_lipschitz_ratios: M0 below 4 sup ||x||_H");
    rep.M0_hat = round_up_pow2(4.0 * maxA);
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            SpectralField w = points[i] - points[j];
            const double h = norm_H(w);
            if (h <= detail::separation_floor(points[i])) continue;
            const double v = sobolev_norm(w, 1.0);
            const double a = norm_H(stokes_apply(w));
            const double logH = std::log(rep.M0 * rep.M0 / (h * h));
            const double logA = std::log(rep.M0_hat * rep.M0_hat / (v * v));
            ++rep.pair_count;
            const double r360 = v * v / (h * h * logH);
            if (r360 > rep.grad_log_ratio) {
                rep.grad_log_ratio = r360;
                rep.argmax_i = i;
                rep.argmax_j = j;
            }
            rep.stokes_log_ratio = std::max(rep.stokes_log_ratio,
                                      a / (h * std::log(rep.M0_hat * rep.M0_hat / (h * h))));
            rep.stokes_grad_log_ratio = std::max(rep.stokes_grad_log_ratio, a * a / (v * v * logA));
            rep.grad_ratio_unlogged = std::max(rep.grad_ratio_unlogged, v * v / (h * h));
        }
    return rep;
}

// ---------------------------------------------------------------------------
// pathwise energy bound of the random system

/// run-time check of the transformed-variable energy bound: the cumulative
/// left side against Ktilde = ||x||^2 + (1/mu) sup e^{-2 sigma W} int ||f||_{V'}^2
struct StochasticEnergyCheck {
    std::vector<double> t;
    std::vector<double> lhs;
    double Ktilde = 0.0;
    double max_overshoot = 0.0;  // max (lhs - Ktilde)/Ktilde, <= 0 when the bound holds

    bool holds(double tol = 0.0) const { return max_overshoot <= tol; }
};

inline StochasticEnergyCheck stochastic_energy_check(const StochasticRun& run, const PhysParams& p,
                                                     const ForcingSpec& f) {
    StochasticEnergyCheck chk;
    const auto& s = run.v.scalars;
    if (s.empty()) return chk;
    const Grid& g = run.v.grid();
    const TimeGrid& tg = run.v.time_grid();
    const double shift = p.alpha + 0.5 * p.sigma * p.sigma;
    double viscous = 0.0, zero_order = 0.0, damping = 0.0, fint = 0.0;
    auto zpow = [&](std::size_t j) {
        return p.r == 1.0 ? 1.0 : std::pow(run.path.z[j], 1.0 - p.r);
    };
    chk.t.push_back(s[0].t);
    chk.lhs.push_back(s[0].H2);
    for (std::size_t j = 1; j < s.size(); ++j) {
        const double dt = tg.dt;
        viscous += 0.5 * dt * (s[j - 1].V2 + s[j].V2);
        zero_order += 0.5 * dt * (s[j - 1].H2 + s[j].H2);
        damping += 0.5 * dt * (zpow(j - 1) * s[j - 1].Lr1 + zpow(j) * s[j].Lr1);
        fint += 0.5 * dt * (f.vprime_norm2(s[j - 1].t, g) + f.vprime_norm2(s[j].t, g));
        chk.t.push_back(s[j].t);
        chk.lhs.push_back(s[j].H2 + p.mu * viscous + 2.0 * shift * zero_order +
                          2.0 * p.beta * damping);
    }
    chk.Ktilde = s[0].H2 + run.path.sup_exp_neg2sigmaW() * fint / p.mu;
    for (double l : chk.lhs)
        chk.max_overshoot = std::max(chk.max_overshoot, (l - chk.Ktilde) / std::max(chk.Ktilde, 1e-300));
    return chk;
}

}  // namespace cbf
