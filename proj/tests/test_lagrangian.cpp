#include <catch2/catch_amalgamated.hpp>

#include "cbf/lagrangian.hpp"
#include "cbf/initial_data.hpp"
#include "support/oracles.hpp"

using namespace cbf;
using cbf::testing::rel_err;

namespace {
PhysParams default_params() {
    PhysParams p;
    p.mu = 1e-2;
    p.alpha = 0.1;
    p.beta = 1.0;
    p.r = 3.0;
    return p;
}
}  // namespace

TEST_CASE("torus metric: min over lattice shifts") {
    const double L = 1.0;
    Point a{0.05, 0.5, 0.0};
    Point b{0.95, 0.5, 0.0};
    CHECK(rel_err(torus_distance(a, b, L, 2), 0.1) < 1e-12);
    CHECK(torus_distance(a, a, L, 2) == 0.0);
}

TEST_CASE("velocity evaluation: zero field, closed-form shear, grid match") {
    Grid g(2, 1.0, 32);
    SpectralField zero(g);
    Point x{0.3, 0.7, 0.0};
    Point vz = eval_velocity(zero, x);
    CHECK(vz[0] == 0.0);
    CHECK(vz[1] == 0.0);

    const double A = 1.3;
    SpectralField shear = shear_mode(g, A, 1, true);  // (A cos(2 pi x2/L), 0)
    Point at0 = eval_velocity(shear, {0.42, 0.0, 0.0});
    CHECK(rel_err(at0[0], A) < 1e-13);
    CHECK(std::abs(at0[1]) < 1e-13);

    SpectralField u = random_solenoidal(g, 3, 1.0);
    PhysicalField up = to_physical(u);
    for (Index idx : {Index{0}, Index{33}, Index{500}}) {
        auto aidx = g.unflatten(idx);
        Point xp{aidx[0] * g.length() / g.points_per_axis(),
                 aidx[1] * g.length() / g.points_per_axis(), 0.0};
        Point v = eval_velocity(u, xp);
        for (int c = 0; c < 2; ++c) CHECK(std::abs(v[c] - up.at(c, idx)) < 1e-12);
    }

    // truncated evaluator converges to the exact one as the cut grows
    Point approx = eval_velocity_truncated(u, x, g.dealias_cut());
    Point exact = eval_velocity(u, x);
    for (int c = 0; c < 2; ++c) CHECK(std::abs(approx[c] - exact[c]) < 1e-12);
}

TEST_CASE("advection: zero velocity keeps particles in place") {
    Grid g(2, 1.0, 16);
    SpectralField zero(g);
    ParticleSet ps;
    ps.positions.push_back({0.25, 0.75, 0.0});
    TimeGrid tg(0.0, 1.0, 1e-2);
    ParticleTrajectory pt = advect(ps, steady_sampler(zero), tg, g.length(), g.dim());
    for (const auto& snap : pt.positions) {
        CHECK(snap[0][0] == 0.25);
        CHECK(snap[0][1] == 0.75);
    }
}

TEST_CASE("advection: steady shear closed form, error below 1e-10") {
    Grid g(2, 1.0, 32);
    const double A = 0.9;
    SpectralField shear = shear_mode(g, A, 1, true);
    const Point x0{0.1, 0.35, 0.0};
    TimeGrid tg(0.0, 1.0, 1e-3);
    ParticleSet ps;
    ps.positions.push_back(x0);
    ParticleTrajectory pt = advect(ps, steady_sampler(shear), tg, g.length(), g.dim());
    const double vx = A * std::cos(2.0 * Grid::pi() * x0[1] / g.length());
    for (std::size_t j = 0; j < pt.times.size(); ++j) {
        const double want = std::fmod(x0[0] + vx * (pt.times[j] - tg.t0), g.length());
        const double wrapped = want < 0 ? want + g.length() : want;
        CHECK(std::abs(pt.at(j, 0)[0] - wrapped) < 1e-10);
        CHECK(std::abs(pt.at(j, 0)[1] - x0[1]) < 1e-14);
    }
}

TEST_CASE("advection is deterministic: repeated runs agree bitwise") {
    Grid g(2, 1.0, 32);
    SpectralField u = taylor_green(g, 1.0);
    ParticleSet ps;
    ps.positions.push_back({0.21, 0.58, 0.0});
    TimeGrid tg(0.0, 0.5, 1e-2);
    ParticleTrajectory a = advect(ps, steady_sampler(u), tg, g.length(), g.dim());
    ParticleTrajectory b = advect(ps, steady_sampler(u), tg, g.length(), g.dim());
    for (std::size_t j = 0; j < a.times.size(); ++j)
        for (int c = 0; c < 2; ++c) CHECK(a.at(j, 0)[c] == b.at(j, 0)[c]);
}

TEST_CASE("RK4 self-convergence on a steady cellular flow") {
    Grid g(2, 1.0, 32);
    SpectralField u = taylor_green(g, 1.0);
    VelocitySampler vel = steady_sampler(u);
    const Point x0{0.26, 0.13, 0.0};
    auto final_at = [&](double dt) {
        TimeGrid tg(0.0, 0.5, dt);
        ParticleSet ps;
        ps.positions.push_back(x0);
        return advect(ps, vel, tg, g.length(), g.dim()).positions.back()[0];
    };
    Point a = final_at(2e-2);
    Point b = final_at(1e-2);
    Point c = final_at(5e-3);
    const double e1 = torus_distance(a, b, g.length(), 2);
    const double e2 = torus_distance(b, c, g.length(), 2);
    const double order = std::log2(e1 / e2);
    CHECK(order > 3.7);
    CHECK(order < 4.3);
}

TEST_CASE("dt halving shrinks trajectory error ~16x on a smooth field") {
    Grid g(2, 1.0, 32);
    SpectralField u = taylor_green(g, 0.8);
    VelocitySampler vel = steady_sampler(u);
    const Point x0{0.33, 0.41, 0.0};
    auto final_at = [&](double dt) {
        TimeGrid tg(0.0, 0.5, dt);
        ParticleSet ps;
        ps.positions.push_back(x0);
        return advect(ps, vel, tg, g.length(), g.dim()).positions.back()[0];
    };
    Point ref = final_at(1e-4);
    const double e1 = torus_distance(final_at(4e-3), ref, g.length(), 2);
    const double e2 = torus_distance(final_at(2e-3), ref, g.length(), 2);
    CHECK(e1 / e2 > 10.0);
    CHECK(e1 / e2 < 24.0);
}

TEST_CASE("volume preservation proxy: flow-map Jacobian within 1%") {
    Grid g(2, 1.0, 32);
    SpectralField u = taylor_green(g, 1.0);
    TimeGrid tg(0.0, 1.0, 1e-3);
    const double det =
        flow_map_jacobian_estimate(steady_sampler(u), tg, g.length(), 2, {0.27, 0.64, 0.0});
    CHECK(std::abs(det - 1.0) < 0.01);
}

TEST_CASE("separation monitor: identical starts flagged, shear growth matches") {
    Grid g(2, 1.0, 32);
    PhysParams p = default_params();
    p.beta = 1e-300;  // keep the shear profile steady apart from slow decay
    p.mu = 1e-6;
    p.alpha = 1e-6;
    SpectralField shear = shear_mode(g, 1.0, 1, true);
    TimeGrid tg(0.0, 0.5, 1e-3);
    Trajectory vel = solve_cbf(shear, tg, p, ForcingSpec::zero());

    ParticleSet ps;
    ps.positions.push_back({0.1, 0.2, 0.0});
    ps.positions.push_back({0.1, 0.2, 0.0});  // identical pair
    ps.positions.push_back({0.1, 0.27, 0.0});
    auto sampler = trajectory_sampler(std::make_shared<Trajectory>(vel));
    ParticleTrajectory pt = advect(ps, sampler, tg, g.length(), g.dim());

    auto same = separation_monitor(pt, 0, 1, vel);
    CHECK(same.merged);

    auto rep = separation_monitor(pt, 0, 2, vel);
    CHECK(!rep.merged);
    CHECK(rep.log_bound_holds);
    CHECK(std::isfinite(rep.log_bound_C_fit));
    CHECK(rep.modulus_fit > 0.0);
    // distinct shear lines separate nearly linearly in time
    const double v1 = std::cos(2.0 * Grid::pi() * 0.2);
    const double v2 = std::cos(2.0 * Grid::pi() * 0.27);
    const double tend = rep.t.back();
    const double want = std::hypot((v1 - v2) * tend, 0.07);
    CHECK(rel_err(rep.dist.back(), want) < 2e-2);

    CHECK_THROWS_AS(separation_monitor(pt, 0, 0, vel), InvalidArgument);
}

TEST_CASE("continuity experiment: identical data give zero deviation") {
    Grid g(2, 1.0, 16);
    PhysParams p = default_params();
    TimeGrid tg(0.0, 0.2, 2e-3);
    SpectralField x = taylor_green(g, 0.6) + random_solenoidal(g, 5, 0.2);
    StokesSpectrum spec = compute_stokes_spectrum(g);
    // all truncations retain every mode -> deviations are exactly zero
    std::vector<std::size_t> all{spec.size(), spec.size()};
    auto rep = continuity_experiment(x, all, {0.4, 0.6, 0.0}, tg, p, ForcingSpec::zero());
    CHECK(rep.max_deviation[0] < 1e-11);
    CHECK(rep.max_deviation[1] < 1e-11);
    CHECK(rep.monotone_nonincreasing);
}

TEST_CASE("continuity experiment: truncation deviations shrink with n") {
    Grid g(2, 1.0, 32);
    PhysParams p = default_params();
    TimeGrid tg(0.0, 0.3, 1e-3);
    // steep spectral decay so each truncation level captures substantially
    // more of the data; deviation statistic is the max over a probe ensemble
    SpectralField x = taylor_green(g, 0.8) + random_solenoidal(g, 4, 0.3, 1.6);
    std::vector<Point> starts{
        {0.35, 0.55, 0.0}, {0.12, 0.81, 0.0}, {0.67, 0.24, 0.0}, {0.5, 0.05, 0.0}};
    auto rep = continuity_experiment(x, {4, 8, 16, 32}, starts, tg, p, ForcingSpec::zero());
    REQUIRE(rep.max_deviation.size() == 4);
    for (std::size_t i = 1; i < rep.initial_h_diff.size(); ++i)
        CHECK(rep.initial_h_diff[i] <= rep.initial_h_diff[i - 1] * (1.0 + 1e-12));
    CHECK(rep.monotone_nonincreasing);
    CHECK(rep.max_deviation.back() < 0.1 * rep.max_deviation.front());
}
