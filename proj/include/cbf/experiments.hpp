#pragma once
// Scenario drivers behind the CLI: each produces a manifest, CSV diagnostics
// and a JSON summary in its output directory and returns a process exit code
// (0 ok, 2 config error, 3 blow-up, 4 failed runtime check).

#include <filesystem>
#include <functional>

#include "cbf/checkpoint.hpp"
#include "cbf/config.hpp"
#include "cbf/diagnostics.hpp"
#include "cbf/initial_data.hpp"
#include "cbf/lagrangian.hpp"
#include "cbf/manifest.hpp"

namespace cbf {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_blowup = 3;
inline constexpr int exit_assertion = 4;

inline SpectralField build_initial(const ExperimentConfig& c, const Grid& g) {
    const auto& s = c.initial;
    if (s.kind == "taylor_green") return taylor_green(g, s.amplitude, s.mode);
    if (s.kind == "random")
        return random_solenoidal(g, s.seed, s.amplitude, s.decay, s.max_wavenumber);
    if (s.kind == "shear") return shear_mode(g, s.amplitude, s.mode);
    if (s.kind == "zero") return SpectralField(g);
    throw ConfigError("unknown initial kind '" + s.kind + "'");
}

inline ForcingSpec build_forcing(const ExperimentConfig& c, const Grid& g) {
    const auto& f = c.forcing;
    if (f.kind == "zero") return ForcingSpec::zero();
    if (f.kind == "steady_random")
        return ForcingSpec::steady(
            random_solenoidal(g, f.seed, f.amplitude, f.decay, f.max_wavenumber));
    if (f.kind == "steady_taylor_green") return ForcingSpec::steady(taylor_green(g, f.amplitude));
    throw ConfigError("unknown forcing kind '" + f.kind + "'");
}

namespace detail {

inline void prepare_out_dir(const ExperimentConfig& c) {
    namespace fs = std::filesystem;
    const fs::path dir(c.out_dir);
    if (fs::exists(dir / "manifest.json") && !c.force_overwrite)
        throw ConfigError("output directory '" + c.out_dir +
                          "' already holds a run; pass --force to overwrite");
    fs::create_directories(dir);
}

inline std::string out_path(const ExperimentConfig& c, const std::string& name) {
    return (std::filesystem::path(c.out_dir) / name).string();
}

inline DiagnosticsRecord record_from_scalars(const StepScalars& s, const PhysParams& p,
                                             double residual) {
    DiagnosticsRecord r;
    r.t = s.t;
    r.H_norm = std::sqrt(s.H2);
    r.V_norm = std::sqrt(s.V2);
    r.Lr1_norm = std::pow(s.Lr1, 1.0 / (p.r + 1.0));
    r.energy_residual = residual;
    return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------

/// forward solve of the projected system; emits diagnostics.csv with the
/// energy-equality residual and a final checkpoint
inline int run_forward(const ExperimentConfig& c) {
    Grid g = c.grid();
    TimeGrid tg = c.time_grid();
    PhysParams p = c.params;
    ForcingSpec f = build_forcing(c, g);
    SpectralField x = build_initial(c, g);
    SolveOptions opt;
    opt.snapshot_stride = c.snapshot_stride;
    opt.allow_unsafe_regime = c.unsafe_regime;
    detail::prepare_out_dir(c);

    Trajectory traj = solve_cbf(x, tg, p, f, opt);
    auto res = energy_residual(traj, p);
    std::vector<DiagnosticsRecord> rows;
    for (std::size_t j = 0; j < traj.scalars.size(); ++j)
        rows.push_back(detail::record_from_scalars(traj.scalars[j], p, res.residual[j]));
    write_diagnostics_csv(detail::out_path(c, "diagnostics.csv"), rows);

    nlohmann::json manifest = make_manifest(c, "forward", DerivedConstants::make(g, p), 0.0);
    nlohmann::json summary;
    summary["manifest"] = "manifest.json";
    summary["blowup"] = traj.blew_up();
    summary["guard_failed"] = traj.guard_failed;
    summary["max_repair"] = traj.max_repair;
    summary["energy_residual_max_rel"] = res.max_rel();
    summary["forcing_class"] = f.hypothesis_class();
    if (!traj.snapshots().empty())
        write_checkpoint(detail::out_path(c, "final.cbf"), traj.final_field(), p,
                         tg.time(traj.last_step()));
    manifest["results"] = summary;
    write_json(detail::out_path(c, "manifest.json"), manifest);
    write_json(detail::out_path(c, "summary.json"), summary);
    if (traj.blew_up()) return exit_blowup;
    return exit_ok;
}

/// co-evolve perturbed pairs, monitor separation, Lambda and both routes to
/// -(d/dt) log ||u1 - u2||
inline int run_buniq(const ExperimentConfig& c) {
    Grid g = c.grid();
    TimeGrid tg = c.time_grid();
    PhysParams p = c.params;
    ForcingSpec f = build_forcing(c, g);
    SpectralField x1 = build_initial(c, g);
    detail::prepare_out_dir(c);

    SolveOptions opt;
    opt.allow_unsafe_regime = c.unsafe_regime;

    nlohmann::json pairs = nlohmann::json::array();
    bool degenerate = false;
    double worst_disc = 0.0, min_sep = std::numeric_limits<double>::infinity(), max_lam = 0.0;
    std::vector<DiagnosticsRecord> rows;
    for (long k = 0; k < c.buniq_pairs; ++k) {
        SpectralField pert =
            random_solenoidal(g, c.seed + 101 * static_cast<std::uint64_t>(k) + 1, c.buniq_perturbation);
        SpectralField x2 = x1 + pert;
        auto rep = backward_uniqueness_experiment(x1, x2, tg, p, f, c.eval_stride, opt);
        degenerate = degenerate || rep.degenerate;
        worst_disc = std::max(worst_disc, rep.max_discrepancy_rel);
        min_sep = std::min(min_sep, rep.min_separation);
        max_lam = std::max(max_lam, rep.max_Lambda);
        pairs.push_back({{"min_separation", rep.min_separation},
                         {"max_Lambda", rep.max_Lambda},
                         {"log_identity_discrepancy_rel", rep.max_discrepancy_rel},
                         {"degenerate", rep.degenerate}});
        if (k == 0) {
            auto res1 = energy_residual(rep.traj1, p);
            double M0 = c.M0;
            if (M0 <= 0.0) {
                double mx = 0.0;
                for (const auto& s : rep.traj1.scalars) mx = std::max(mx, std::sqrt(s.H2));
                for (const auto& s : rep.traj2.scalars) mx = std::max(mx, std::sqrt(s.H2));
                M0 = round_up_pow2(4.0 * mx);
            }
            for (std::size_t i = 0; i < rep.t.size(); ++i) {
                const long step = rep.traj1.snapshot_steps()[i];
                DiagnosticsRecord r = detail::record_from_scalars(
                    rep.traj1.scalars[static_cast<std::size_t>(step)], p,
                    res1.residual[static_cast<std::size_t>(step)]);
                r.Lambda = rep.Lambda[i];
                r.separation = rep.separation[i];
                const SpectralField& u1 = rep.traj1.field_at_step(step);
                const SpectralField& u2 = rep.traj2.field_at_step(step);
                if (rep.separation[i] > 0.0) {
                    r.LambdaTilde = quotient_LambdaTilde(u1, u2, p);
                    r.Qtilde = quotient_Qtilde(u1, u2, p, M0);
                }
                rows.push_back(r);
            }
        }
    }
    write_diagnostics_csv(detail::out_path(c, "diagnostics.csv"), rows);

    nlohmann::json manifest = make_manifest(c, "backward-uniqueness", DerivedConstants::make(g, p), 0.0);
    nlohmann::json summary;
    summary["manifest"] = "manifest.json";
    summary["pairs"] = pairs;
    summary["min_separation"] = min_sep;
    summary["max_Lambda"] = max_lam;
    summary["max_log_identity_discrepancy_rel"] = worst_disc;
    summary["degenerate"] = degenerate;
    manifest["results"] = summary;
    write_json(detail::out_path(c, "manifest.json"), manifest);
    write_json(detail::out_path(c, "summary.json"), summary);
    return degenerate ? exit_assertion : exit_ok;
}

/// tangent/adjoint duality audit: (v(T), p) vs (y, z(0)) over seeded pairs
inline int run_duality(const ExperimentConfig& c) {
    Grid g = c.grid();
    TimeGrid tg = c.time_grid();
    PhysParams p = c.params;
    ForcingSpec f = build_forcing(c, g);
    SpectralField x = build_initial(c, g);
    detail::prepare_out_dir(c);

    AdjointMode mode;
    if (c.adjoint_mode == "time_reversed") mode = AdjointMode::time_reversed;
    else if (c.adjoint_mode == "discrete_transpose") mode = AdjointMode::discrete_transpose;
    else throw ConfigError("unknown adjoint_mode '" + c.adjoint_mode + "'");

    SolveOptions opt;
    opt.allow_unsafe_regime = c.unsafe_regime;
    Trajectory base = solve_cbf(x, tg, p, f, opt);
    if (base.blew_up()) return exit_blowup;

    nlohmann::json gaps = nlohmann::json::array();
    double worst = 0.0;
    for (long k = 0; k < c.duality_pairs; ++k) {
        SpectralField y = random_solenoidal(g, c.seed + 2 * static_cast<std::uint64_t>(k), 1.0);
        SpectralField pf = random_solenoidal(g, c.seed + 2 * static_cast<std::uint64_t>(k) + 1, 1.0);
        Trajectory v = solve_linearized(base, y, tg, p);
        Trajectory z = solve_adjoint(base, pf, tg, p, {}, mode);
        const double lhs = inner_product_H(v.final_field(), pf);
        const double rhs = inner_product_H(y, z.field_at_step(0));
        const double gap = std::abs(lhs - rhs) / (norm_H(y) * norm_H(pf));
        gaps.push_back(gap);
        worst = std::max(worst, gap);
    }

    nlohmann::json manifest = make_manifest(c, "duality-check", DerivedConstants::make(g, p), 0.0);
    nlohmann::json summary;
    summary["manifest"] = "manifest.json";
    summary["adjoint_mode"] = c.adjoint_mode;
    summary["gaps"] = gaps;
    summary["max_gap"] = worst;
    summary["tolerance"] = c.duality_tolerance;
    summary["pass"] = worst <= c.duality_tolerance;
    manifest["results"] = summary;
    write_json(detail::out_path(c, "manifest.json"), manifest);
    write_json(detail::out_path(c, "summary.json"), summary);
    return worst <= c.duality_tolerance ? exit_ok : exit_assertion;
}

/// pathwise random runs: energy-bound audit per seed, optional two-solution
/// pair mode monitoring LambdaHat and the separation
inline int run_stochastic(const ExperimentConfig& c) {
    Grid g = c.grid();
    TimeGrid tg = c.time_grid();
    PhysParams p = c.params;
    ForcingSpec f = build_forcing(c, g);
    SpectralField x = build_initial(c, g);
    detail::prepare_out_dir(c);

    SolveOptions opt;
    opt.snapshot_stride = c.snapshot_stride;
    opt.allow_unsafe_regime = c.unsafe_regime;

    nlohmann::json per_path = nlohmann::json::array();
    bool all_hold = true;
    bool any_blowup = false;
    std::vector<DiagnosticsRecord> rows;
    for (long k = 0; k < c.stochastic_paths; ++k) {
        const std::uint64_t seed = c.seed + static_cast<std::uint64_t>(k);
        BrownianPath path = BrownianPath::sample(tg, seed, p.sigma);
        StochasticRun run = solve_stochastic(x, tg, p, f, path, opt);
        any_blowup = any_blowup || run.v.blew_up();
        auto chk = stochastic_energy_check(run, p, f);
        all_hold = all_hold && chk.holds();
        nlohmann::json entry = {{"seed", seed},
                                {"Ktilde", chk.Ktilde},
                                {"max_overshoot", chk.max_overshoot},
                                {"bound_holds", chk.holds()},
                                {"blowup", run.v.blew_up()}};
        if (c.stochastic_pair_mode && !run.v.blew_up()) {
            SpectralField x2 = x + random_solenoidal(g, seed + 999, c.stochastic_perturbation);
            StochasticRun run2 = solve_stochastic(x2, tg, p, f, path, opt);
            double min_sep = std::numeric_limits<double>::infinity();
            double max_lh = 0.0;
            for (std::size_t i = 0; i < run.v.snapshot_steps().size(); ++i) {
                const long step = run.v.snapshot_steps()[i];
                const SpectralField& v1 = run.v.field_at_step(step);
                const SpectralField& v2 = run2.v.field_at_step(step);
                const double sep = norm_H(v1 - v2);
                min_sep = std::min(min_sep, sep);
                if (sep > 0.0) max_lh = std::max(max_lh, quotient_LambdaHat(v1, v2, p));
                if (k == 0) {
                    DiagnosticsRecord r = detail::record_from_scalars(
                        run.v.scalars[static_cast<std::size_t>(step)], p, quiet_nan());
                    r.separation = sep;
                    if (sep > 0.0) {
                        r.LambdaHat = quotient_LambdaHat(v1, v2, p);
                        r.LambdaTilde = quotient_LambdaTilde(v1, v2, p);
                    }
                    rows.push_back(r);
                }
            }
            entry["min_separation"] = min_sep;
            entry["max_LambdaHat"] = max_lh;
        } else if (k == 0) {
            for (const auto& s : run.v.scalars)
                rows.push_back(detail::record_from_scalars(s, p, quiet_nan()));
        }
        per_path.push_back(entry);
    }
    write_diagnostics_csv(detail::out_path(c, "diagnostics.csv"), rows);

    nlohmann::json manifest = make_manifest(c, "stochastic", DerivedConstants::make(g, p), 0.0);
    nlohmann::json summary;
    summary["manifest"] = "manifest.json";
    summary["paths"] = per_path;
    summary["energy_bound_all_hold"] = all_hold;
    manifest["results"] = summary;
    write_json(detail::out_path(c, "manifest.json"), manifest);
    write_json(detail::out_path(c, "summary.json"), summary);
    if (any_blowup) return exit_blowup;
    return all_hold ? exit_ok : exit_assertion;
}

/// particle advection in a solver velocity field; emits the trajectory CSV
/// (t, id, x1..xd) and a separation/regularity summary
inline int run_lagrangian(const ExperimentConfig& c) {
    Grid g = c.grid();
    TimeGrid tg = c.time_grid();
    PhysParams p = c.params;
    ForcingSpec f = build_forcing(c, g);
    SpectralField x = build_initial(c, g);
    detail::prepare_out_dir(c);

    SolveOptions opt;
    opt.snapshot_stride = c.snapshot_stride;
    opt.allow_unsafe_regime = c.unsafe_regime;
    auto traj = std::make_shared<Trajectory>(solve_cbf(x, tg, p, f, opt));
    if (traj->blew_up()) return exit_blowup;

    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> uni(0.0, g.length());
    ParticleSet ps;
    for (long k = 0; k < c.particles; ++k) {
        Point pt{0, 0, 0};
        for (int i = 0; i < g.dim(); ++i) pt[i] = uni(rng);
        ps.positions.push_back(pt);
    }
    ParticleTrajectory pt = advect(ps, trajectory_sampler(traj), tg, g.length(), g.dim());

    {
        std::ofstream out(detail::out_path(c, "particles.csv"));
        out << "t,id";
        for (int i = 0; i < g.dim(); ++i) out << ",x" << (i + 1);
        out << "\n";
        char buf[256];
        for (std::size_t j = 0; j < pt.times.size(); ++j)
            for (std::size_t q = 0; q < ps.positions.size(); ++q) {
                std::snprintf(buf, sizeof(buf), "%.17g,%zu", pt.times[j], q);
                out << buf;
                for (int i = 0; i < g.dim(); ++i) {
                    std::snprintf(buf, sizeof(buf), ",%.17g", pt.at(j, q)[i]);
                    out << buf;
                }
                out << "\n";
            }
    }

    nlohmann::json seps = nlohmann::json::array();
    bool all_bounds = true;
    for (std::size_t q = 0; q + 1 < ps.positions.size(); q += 2) {
        auto rep = separation_monitor(pt, q, q + 1, *traj, c.lagrangian_s);
        all_bounds = all_bounds && (rep.merged || rep.log_bound_holds);
        seps.push_back({{"pair", {q, q + 1}},
                        {"merged", rep.merged},
                        {"log_bound_C_fit", rep.log_bound_C_fit},
                        {"log_bound_holds", rep.log_bound_holds},
                        {"modulus_fit", rep.modulus_fit},
                        {"s_exponent", rep.s_exponent}});
    }

    nlohmann::json manifest = make_manifest(c, "lagrangian", DerivedConstants::make(g, p), 0.0);
    nlohmann::json summary;
    summary["manifest"] = "manifest.json";
    summary["pairs"] = seps;
    summary["log_bound_all_hold"] = all_bounds;
    // regularity time series the trajectory hypotheses refer to
    {
        double acc = 0.0;
        const auto& stepsv = traj->snapshot_steps();
        for (std::size_t i = 1; i < stepsv.size(); ++i) {
            const double t_lo = tg.time(stepsv[i - 1]);
            const double t_hi = tg.time(stepsv[i]);
            const double n_lo = sobolev_norm(traj->snapshots()[i - 1], 0.5 * g.dim() + 1.0);
            const double n_hi = sobolev_norm(traj->snapshots()[i], 0.5 * g.dim() + 1.0);
            acc += 0.5 * (t_hi - t_lo) * (t_lo * n_lo * n_lo + t_hi * n_hi * n_hi);
        }
        summary["int_t_Hcrit2"] = acc;
    }
    summary["forcing_class"] = f.hypothesis_class();
    manifest["results"] = summary;
    write_json(detail::out_path(c, "manifest.json"), manifest);
    write_json(detail::out_path(c, "summary.json"), summary);
    return all_bounds ? exit_ok : exit_assertion;
}

/// Eulerian-continuity experiment over mode truncations of the initial data
inline int run_continuity(const ExperimentConfig& c) {
    Grid g = c.grid();
    TimeGrid tg = c.time_grid();
    PhysParams p = c.params;
    ForcingSpec f = build_forcing(c, g);
    SpectralField x = build_initial(c, g);
    detail::prepare_out_dir(c);

    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> uni(0.0, g.length());
    std::vector<Point> starts;
    for (long k = 0; k < std::max<long>(1, c.particles); ++k) {
        Point pt{0, 0, 0};
        for (int i = 0; i < g.dim(); ++i) pt[i] = uni(rng);
        starts.push_back(pt);
    }
    SolveOptions opt;
    opt.allow_unsafe_regime = c.unsafe_regime;
    auto rep = continuity_experiment(x, c.truncations, starts, tg, p, f, opt);

    nlohmann::json manifest = make_manifest(c, "continuity", DerivedConstants::make(g, p), 0.0);
    nlohmann::json summary;
    summary["manifest"] = "manifest.json";
    summary["truncations"] = rep.truncation_n;
    summary["initial_h_diff"] = rep.initial_h_diff;
    summary["max_deviation"] = rep.max_deviation;
    summary["monotone_nonincreasing"] = rep.monotone_nonincreasing;
    manifest["results"] = summary;
    write_json(detail::out_path(c, "manifest.json"), manifest);
    write_json(detail::out_path(c, "summary.json"), summary);
    return rep.monotone_nonincreasing ? exit_ok : exit_assertion;
}

/// attractor sampling, log-Lipschitz ratio fitting, maximal subset and the
/// deviation-scale table; writes a checkpoint archive
inline int run_attractor(const ExperimentConfig& c) {
    Grid g = c.grid();
    PhysParams p = c.params;
    ForcingSpec f = build_forcing(c, g);
    if (f.kind() != ForcingSpec::Kind::steady)
        throw ConfigError("attractor scenario requires steady forcing (f in H)");
    detail::prepare_out_dir(c);

    AttractorSampleOptions so;
    so.n_initial = static_cast<std::size_t>(c.attractor_initial);
    so.burn_in = c.attractor_burn_in;
    so.sample_window = c.attractor_window;
    so.samples_per_ic = static_cast<std::size_t>(c.attractor_samples_per_ic);
    so.dt = c.dt;
    so.seed = c.seed;
    AttractorSample sample = sample_attractor(g, p, f, so);

    StokesSpectrum spec = compute_stokes_spectrum(g);
    auto rep = log_lipschitz_ratios(sample.points, c.M0);
    nlohmann::json eps_table = nlohmann::json::array();
    std::size_t n_max = std::min<std::size_t>(c.attractor_n_max, spec.size() - 1);
    for (std::size_t n = 0; n <= n_max; ++n) {
        DeviationScale d = deviation_scale(rep, spec, n);
        eps_table.push_back({{"n", d.n},
                             {"lambda_next", d.lambda_next},
                             {"epsilon_n", d.epsilon_n}});
    }
    auto kept = maximal_low_mode_set(sample.points, std::min<std::size_t>(8, n_max), spec);

    namespace fs = std::filesystem;
    fs::create_directories(fs::path(c.out_dir) / "samples");
    for (std::size_t i = 0; i < sample.points.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof(name), "samples/point_%04zu.cbf", i);
        write_checkpoint(detail::out_path(c, name), sample.points[i], p, 0.0);
    }

    nlohmann::json manifest = make_manifest(c, "attractor", DerivedConstants::make(g, p), rep.M0);
    nlohmann::json summary;
    summary["manifest"] = "manifest.json";
    summary["forcing"] = {{"kind", c.forcing.kind},
                          {"amplitude", c.forcing.amplitude},
                          {"seed", c.forcing.seed},
                          {"max_wavenumber", c.forcing.max_wavenumber}};
    summary["burn_in"] = sample.burn_in;
    summary["stationary"] = sample.stationary;
    summary["worst_drift"] = sample.worst_drift;
    summary["seeds"] = sample.seeds;
    summary["points"] = sample.points.size();
    summary["M0"] = rep.M0;
    summary["M0_hat"] = rep.M0_hat;
    summary["grad_log_ratio"] = rep.grad_log_ratio;
    summary["stokes_log_ratio"] = rep.stokes_log_ratio;
    summary["stokes_grad_log_ratio"] = rep.stokes_grad_log_ratio;
    summary["grad_ratio_unlogged"] = rep.grad_ratio_unlogged;
    summary["C0"] = 1.1 * rep.grad_log_ratio;
    summary["epsilon_table"] = eps_table;
    summary["maximal_set"] = kept;
    manifest["results"] = summary;
    write_json(detail::out_path(c, "manifest.json"), manifest);
    write_json(detail::out_path(c, "summary.json"), summary);
    return exit_ok;
}

// ---------------------------------------------------------------------------
// operator identity suite (the verify-operators subcommand)

struct VerifyRow {
    std::string name;
    double metric = 0.0;
    double tol = 0.0;
    bool pass = false;
    bool informational = false;
};

inline std::vector<VerifyRow> verify_operators_suite(int d, int N, std::uint64_t seed,
                                                     int n_fields = 20) {
    Grid g(d, 1.0, N);
    std::vector<VerifyRow> rows;
    auto push = [&](const std::string& name, double metric, double tol) {
        rows.push_back({name, metric, tol, metric <= tol, false});
    };

    double anti = 0.0, bvv = 0.0, bau = 0.0, leray_gap = 0.0, adj_gap = 0.0, csym = 0.0;
    for (int k = 0; k < n_fields; ++k) {
        const std::uint64_t s = seed + static_cast<std::uint64_t>(k);
        SpectralField u = random_solenoidal(g, 3 * s + 0, 1.0);
        SpectralField v = random_solenoidal(g, 3 * s + 1, 0.9);
        SpectralField w = random_solenoidal(g, 3 * s + 2, 1.1);
        const double scale = norm_H(u) * sobolev_norm(v, 1.0) * norm_H(w) + 1e-30;
        const double b1 = trilinear_b(u, v, w);
        const double b2 = trilinear_b(u, w, v);
        anti = std::max(anti, std::abs(b1 + b2) / scale);
        bvv = std::max(bvv, std::abs(inner_product_H(bilinear_B(u, v), v)) /
                                (norm_H(u) * sobolev_norm(v, 1.0) * norm_H(v) + 1e-30));
        if (d == 2) {
            SpectralField bu = bilinear_B(u, u);
            SpectralField au = stokes_apply(u);
            bau = std::max(bau, std::abs(inner_product_H(bu, au)) /
                                    (norm_H(bu) * norm_H(au) + 1e-30));
        }
        SpectralField pu = leray_project(u);
        leray_gap = std::max(leray_gap, norm_H(leray_project(pu) - pu) / (norm_H(pu) + 1e-30));
        const double lhs = inner_product_H(linearized_B(u, v), w);
        const double rhs = inner_product_H(v, adjoint_linearized_B(u, w));
        adj_gap = std::max(adj_gap, std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs) + 1e-30));
        const double c1 = inner_product_H(gateaux_C1(u, v, 3.0), w);
        const double c2 = inner_product_H(v, gateaux_C1(u, w, 3.0));
        csym = std::max(csym, std::abs(c1 - c2) / (std::abs(c1) + std::abs(c2) + 1e-30));
    }
    push("trilinear antisymmetry b(u,v,w)+b(u,w,v)=0", anti, 1e-10);
    push("energy orthogonality <B(u,v),v>=0", bvv, 1e-10);
    if (d == 2) push("2D (B(u),Au)=0", bau, 1e-10);
    push("Leray idempotence", leray_gap, 1e-12);
    push("adjoint identity <B'(u)v,w>=<v,B'*(u)w>", adj_gap, 1e-10);
    push("C'(u) symmetry", csym, 1e-10);

    double cuu = 0.0;
    for (double r : {1.0, 3.0, 3.5, 5.0}) {
        SpectralField u = random_solenoidal(g, seed + 77, 1.2);
        const double got = inner_product_H(damping_C(u, r), u);
        const double want = std::pow(lebesgue_norm(u, r + 1.0), r + 1.0);
        cuu = std::max(cuu, std::abs(got - want) / want);
    }
    push("<C(u),u> = ||u||_{L^{r+1}}^{r+1}", cuu, 1e-8);

    double mono_slack = 0.0;
    for (double r : {3.0, 3.5, 5.0})
        for (int k = 0; k < 10; ++k) {
            SpectralField u = random_solenoidal(g, seed + 200 + static_cast<std::uint64_t>(k), 1.0);
            SpectralField v = random_solenoidal(g, seed + 300 + static_cast<std::uint64_t>(k), 0.7);
            auto gap = monotonicity_gap(u, v, r);
            const double s = std::max(gap.lhs, 1.0);
            mono_slack = std::max({mono_slack, (gap.rhs1 - gap.lhs) / s, (gap.rhs2 - gap.rhs1) / s,
                                   -gap.rhs2 / s});
        }
    push("monotonicity chain slack", mono_slack, 1e-10);

    double torus_err = 0.0;
    // fractional |y| powers need resolution (d=2) or |y| away from zero (d=3)
    Grid gt = d == 2 ? Grid(2, 1.0, std::max(N, 64)) : g;
    for (double r : {3.0, 5.0}) {
        SpectralField y = d == 3 ? nonvanishing_solenoidal_3d(gt, 0.2, seed + 400)
                                 : random_solenoidal(gt, seed + 400, 1.0, 0.8, 6);
        auto id = torus_identity_check(y, r);
        torus_err = std::max(torus_err, std::abs(id.lhs - id.term1 - id.term2) /
                                            (std::abs(id.lhs) + 1e-30));
    }
    push("torus damping identity", torus_err, 1e-6);

    SpectralField u = random_solenoidal(g, seed + 500, 1.0);
    auto emb = remark_embedding_ratio(u, 3.0);
    rows.push_back({"embedding ratio (fitted C, reported)", emb.fitted_C, 0.0, true, true});
    return rows;
}

inline int run_verify_operators(const ExperimentConfig& c) {
    detail::prepare_out_dir(c);
    std::vector<VerifyRow> all;
    for (int d : {2, 3}) {
        auto rows = verify_operators_suite(d, d == 2 ? c.N : std::min(c.N, 16), c.seed);
        for (auto& r : rows) r.name = "d=" + std::to_string(d) + ": " + r.name;
        all.insert(all.end(), rows.begin(), rows.end());
    }
    bool ok = true;
    nlohmann::json table = nlohmann::json::array();
    for (const auto& r : all) {
        if (!r.informational) ok = ok && r.pass;
        std::printf("%-55s  metric=%-12.3e tol=%-9.0e %s\n", r.name.c_str(), r.metric, r.tol,
                    r.informational ? "(reported)" : (r.pass ? "PASS" : "FAIL"));
        table.push_back({{"name", r.name},
                         {"metric", r.metric},
                         {"tol", r.tol},
                         {"pass", r.pass},
                         {"informational", r.informational}});
    }
    Grid g = c.grid();
    nlohmann::json manifest =
        make_manifest(c, "verify-operators", DerivedConstants::make(g, c.params), 0.0);
    nlohmann::json summary;
    summary["manifest"] = "manifest.json";
    summary["table"] = table;
    summary["pass"] = ok;
    manifest["results"] = summary;
    write_json(detail::out_path(c, "manifest.json"), manifest);
    write_json(detail::out_path(c, "summary.json"), summary);
    return ok ? exit_ok : exit_assertion;
}

/// dispatch on the configured scenario; exceptions are mapped to exit codes
/// by the caller
inline int run(const ExperimentConfig& c) {
    if (!c.scenario) throw ConfigError("no scenario selected");
    c.validate();
    switch (*c.scenario) {
        case Scenario::forward: return run_forward(c);
        case Scenario::backward_uniqueness: return run_buniq(c);
        case Scenario::duality_check: return run_duality(c);
        case Scenario::stochastic: return run_stochastic(c);
        case Scenario::lagrangian: return run_lagrangian(c);
        case Scenario::continuity: return run_continuity(c);
        case Scenario::attractor: return run_attractor(c);
        case Scenario::verify_operators: return run_verify_operators(c);
    }
    throw Error("unreachable scenario");
}

}  // namespace cbf
