#include <catch2/catch_amalgamated.hpp>

#include "cbf/operators.hpp"
#include "cbf/initial_data.hpp"
#include "support/oracles.hpp"

using namespace cbf;
using cbf::testing::rel_err;

TEST_CASE("B(u,u) vanishes for unidirectional shear") {
    Grid g(2, 1.0, 32);
    SpectralField u = shear_mode(g, 1.4, 2);
    SpectralField b = bilinear_B(u, u);
    CHECK(norm_H(b) < 1e-13 * std::max(1.0, norm_H(u)));
}

TEST_CASE("<B(u,v),w> matches the FFT-free quadrature oracle at N=16") {
    for (int d : {2, 3}) {
        Grid g(d, 1.0, d == 2 ? 16 : 8);
        SpectralField u = random_solenoidal(g, 100 + d, 1.0);
        SpectralField v = random_solenoidal(g, 200 + d, 0.7);
        SpectralField w = random_solenoidal(g, 300 + d, 1.3);
        const double got = inner_product_H(bilinear_B(u, v), w);
        const double oracle = cbf::testing::direct_trilinear(u, v, w);
        CHECK(rel_err(got, oracle) < 1e-10);
        CHECK(rel_err(trilinear_b(u, v, w), oracle) < 1e-10);
    }
}

TEST_CASE("grid mismatch is rejected") {
    Grid a(2, 1.0, 16), b(2, 1.0, 32);
    SpectralField u(a), v(b);
    CHECK_THROWS_AS(bilinear_B(u, v), InvalidArgument);
}

TEST_CASE("trilinear form: b(u,v,v) = 0, b(0,v,w) = 0, antisymmetry") {
    Grid g(2, 1.0, 16);
    SpectralField z(g);
    SpectralField v = random_solenoidal(g, 4, 1.0);
    SpectralField w = random_solenoidal(g, 5, 1.0);
    CHECK(std::abs(trilinear_b(z, v, w)) == 0.0);

    for (std::uint64_t s = 0; s < 12; ++s) {
        SpectralField u = random_solenoidal(g, 600 + s, 1.0 + 0.1 * s);
        SpectralField a = random_solenoidal(g, 700 + s, 0.9);
        SpectralField b = random_solenoidal(g, 800 + s, 1.1);
        const double bvv = trilinear_b(u, a, a);
        CHECK(std::abs(bvv) < 1e-12 * std::max(1.0, sobolev_norm(a, 1.0) * norm_H(a) * norm_H(u)));
        const double b1 = trilinear_b(u, a, b);
        const double b2 = trilinear_b(u, b, a);
        CHECK(std::abs(b1 + b2) < 1e-10 * std::max({std::abs(b1), std::abs(b2), 1e-30}));
        const double bvv_op = std::abs(inner_product_H(bilinear_B(u, a), a));
        CHECK(bvv_op < 1e-12 * std::max(1.0, norm_H(u) * sobolev_norm(a, 1.0) * norm_H(a)));
    }
}

TEST_CASE("in d=2 the convection is orthogonal to Au") {
    Grid g(2, 1.0, 32);
    for (std::uint64_t s = 0; s < 8; ++s) {
        SpectralField u = random_solenoidal(g, 40 + s, 1.0);
        SpectralField bu = bilinear_B(u, u);
        SpectralField au = stokes_apply(u);
        const double ip = inner_product_H(bu, au);
        CHECK(std::abs(ip) <= 1e-10 * std::max(1e-30, norm_H(bu) * norm_H(au)));
    }
}

TEST_CASE("damping: r=1 acts as the identity on solenoidal fields") {
    Grid g(2, 1.0, 16);
    SpectralField u = random_solenoidal(g, 9, 1.2);
    SpectralField cu = damping_C(u, 1.0);
    CHECK(norm_H(cu - u) < 1e-12 * norm_H(u));
}

TEST_CASE("damping: <C(u),u> equals the L^{r+1} norm power") {
    Grid g(2, 1.0, 32);
    for (double r : {1.0, 3.0, 3.5, 5.0}) {
        SpectralField u = random_solenoidal(g, 77, 1.5);
        const double lhs = inner_product_H(damping_C(u, r), u);
        const double want = std::pow(lebesgue_norm(u, r + 1.0), r + 1.0);
        CHECK(rel_err(lhs, want) < 1e-12);
    }
}

TEST_CASE("damping: shear field analytic value 3 A^4 L^2 / 8 at r=3") {
    const double A = 1.3, L = 1.9;
    Grid g(2, L, 32);
    SpectralField u = shear_mode(g, A, 1);
    const double got = inner_product_H(damping_C(u, 3.0), u);
    const double want = 3.0 * std::pow(A, 4.0) * L * L / 8.0;
    CHECK(rel_err(got, want) < 1e-12);
}

TEST_CASE("gateaux C': r=1 branch is the projection of v") {
    Grid g(2, 1.0, 16);
    SpectralField u = random_solenoidal(g, 1, 1.0);
    SpectralField v = random_solenoidal(g, 2, 0.8);
    SpectralField got = gateaux_C1(u, v, 1.0);
    CHECK(norm_H(got - v) < 1e-12 * norm_H(v));
}

TEST_CASE("gateaux C': directional identity C'(u)u = r C(u)") {
    Grid g(2, 1.0, 32);
    for (double r : {2.5, 3.0, 4.0}) {
        SpectralField u = random_solenoidal(g, 31, 1.1);
        SpectralField lhs = gateaux_C1(u, u, r);
        SpectralField rhs = r * damping_C(u, r);
        CHECK(norm_H(lhs - rhs) < 1e-11 * norm_H(rhs));
    }
}

TEST_CASE("gateaux C' difference-quotient oracle at r=4 is first order") {
    Grid g(2, 1.0, 32);
    SpectralField u = random_solenoidal(g, 50, 1.4);
    SpectralField v = random_solenoidal(g, 51, 1.0);
    SpectralField cv = gateaux_C1(u, v, 4.0);
    auto fd_err = [&](double h) {
        SpectralField up = u;
        axpy(h, v, up);
        SpectralField diff = damping_C(up, 4.0) - damping_C(u, 4.0);
        diff *= 1.0 / h;
        return norm_H(diff - cv);
    };
    const double e3 = fd_err(1e-3);
    const double e4 = fd_err(1e-4);
    CHECK(e3 / norm_H(v) < 0.05);
    const double ratio = e3 / e4;
    CHECK(ratio > 5.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("gateaux C' is symmetric in the H inner product") {
    Grid g(2, 1.0, 16);
    for (double r : {2.0, 3.0, 4.5}) {
        SpectralField u = random_solenoidal(g, 61, 1.0);
        SpectralField v = random_solenoidal(g, 62, 0.9);
        SpectralField w = random_solenoidal(g, 63, 1.1);
        const double a = inner_product_H(gateaux_C1(u, v, r), w);
        const double b = inner_product_H(v, gateaux_C1(u, w, r));
        CHECK(rel_err(a, b) < 1e-11);
    }
}

TEST_CASE("gateaux C'': rejects r < 3, r=3 drops the second summand") {
    Grid g(2, 1.0, 16);
    SpectralField u = random_solenoidal(g, 71, 1.0);
    SpectralField v = random_solenoidal(g, 72, 1.0);
    SpectralField w = random_solenoidal(g, 73, 1.0);
    CHECK_THROWS_AS(gateaux_C2(u, v, w, 2.5), InvalidArgument);

    // at r=3 the (r-3) factor kills the |u|^{r-5} term; compare against a
    // direct pointwise build of the first summand only
    PhysicalField up = to_physical(u), vp = to_physical(v), wp = to_physical(w);
    PhysicalField expect(g);
    for (Index x = 0; x < g.modes(); ++x) {
        double uv = 0, uw = 0, vw = 0;
        for (int c = 0; c < 2; ++c) {
            uv += up.at(c, x) * vp.at(c, x);
            uw += up.at(c, x) * wp.at(c, x);
            vw += vp.at(c, x) * wp.at(c, x);
        }
        for (int c = 0; c < 2; ++c)
            expect.at(c, x) = 2.0 * (uw * vp.at(c, x) + uv * wp.at(c, x) + vw * up.at(c, x));
    }
    SpectralField es = to_spectral(expect);
    dealias(es);
    es = leray_project(es);
    hermitian_symmetrize(es);
    enforce_zero_mean(es);
    SpectralField got = gateaux_C2(u, v, w, 3.0);
    CHECK(norm_H(got - es) < 1e-12 * std::max(1.0, norm_H(es)));
}

TEST_CASE("gateaux C'' is symmetric in (v, w)") {
    Grid g(2, 1.0, 16);
    SpectralField u = random_solenoidal(g, 81, 1.0);
    SpectralField v = random_solenoidal(g, 82, 0.7);
    SpectralField w = random_solenoidal(g, 83, 1.2);
    SpectralField a = gateaux_C2(u, v, w, 4.0);
    SpectralField b = gateaux_C2(u, w, v, 4.0);
    CHECK(norm_H(a - b) < 1e-13 * std::max(1.0, norm_H(a)));
}

TEST_CASE("gateaux C'' difference-quotient oracle at r=5") {
    Grid g(3, 1.0, 16);
    SpectralField u = nonvanishing_solenoidal_3d(g, 0.1, 91);
    SpectralField v = random_solenoidal(g, 92, 0.8);
    SpectralField w = random_solenoidal(g, 93, 0.9);
    SpectralField c2 = gateaux_C2(u, v, w, 5.0);
    auto fd_err = [&](double h) {
        SpectralField up = u;
        axpy(h, w, up);
        SpectralField diff = gateaux_C1(up, v, 5.0) - gateaux_C1(u, v, 5.0);
        diff *= 1.0 / h;
        return norm_H(diff - c2);
    };
    const double e3 = fd_err(1e-3);
    const double e4 = fd_err(1e-4);
    CHECK(e3 / e4 > 5.0);
    CHECK(e3 / e4 < 20.0);
}

TEST_CASE("monotonicity chain: degenerate cases") {
    Grid g(2, 1.0, 16);
    SpectralField u = random_solenoidal(g, 101, 1.3);
    auto same = monotonicity_gap(u, u, 3.0);
    CHECK(same.lhs == 0.0);
    CHECK(same.rhs1 == 0.0);
    CHECK(same.rhs2 == 0.0);

    SpectralField z(g);
    for (double r : {3.0, 4.0}) {
        auto gap = monotonicity_gap(u, z, r);
        const double lr = std::pow(lebesgue_norm(u, r + 1.0), r + 1.0);
        CHECK(rel_err(gap.lhs, lr) < 1e-12);
        CHECK(rel_err(gap.rhs2, std::pow(2.0, 1.0 - r) * lr) < 1e-12);
        CHECK(gap.lhs >= gap.rhs1);
        CHECK(gap.rhs1 >= gap.rhs2);
    }
}

TEST_CASE("monotonicity chain holds on random pairs, r in {3, 3.5, 5}") {
    Grid g(2, 1.0, 16);
    int checked = 0;
    for (double r : {3.0, 3.5, 5.0}) {
        for (std::uint64_t s = 0; s < 34; ++s) {
            SpectralField u = random_solenoidal(g, 1000 + s, 0.5 + 0.05 * s);
            SpectralField v = random_solenoidal(g, 2000 + s, 1.2 - 0.02 * s);
            auto gap = monotonicity_gap(u, v, r);
            const double scale = std::max({gap.lhs, 1.0});
            CHECK(gap.lhs - gap.rhs1 >= -1e-10 * scale);
            CHECK(gap.rhs1 - gap.rhs2 >= -1e-10 * scale);
            CHECK(gap.rhs2 >= -1e-10 * scale);
            ++checked;
        }
    }
    CHECK(checked == 102);
}

TEST_CASE("linearized convection and its adjoint") {
    Grid g(2, 1.0, 16);
    SpectralField u = random_solenoidal(g, 111, 1.0);
    SpectralField z(g);
    CHECK(norm_H(linearized_B(u, z)) == 0.0);

    SpectralField bu = bilinear_B(u, u);
    SpectralField lin = linearized_B(u, u);
    CHECK(norm_H(lin - 2.0 * bu) < 1e-12 * norm_H(bu));

    for (std::uint64_t s = 0; s < 10; ++s) {
        SpectralField v = random_solenoidal(g, 300 + s, 1.0);
        SpectralField w = random_solenoidal(g, 400 + s, 1.0);
        const double lhs = inner_product_H(linearized_B(u, v), w);
        const double rhs = inner_product_H(v, adjoint_linearized_B(u, w));
        CHECK(rel_err(lhs, rhs) < 1e-10);
        // both sides also agree with the trilinear-form expression
        const double via_b = trilinear_b(u, v, w) + trilinear_b(v, u, w);
        CHECK(rel_err(lhs, via_b) < 1e-10);
    }
}

TEST_CASE("torus identity: r=1 reduces to the Dirichlet integral") {
    Grid g(2, 1.0, 32);
    SpectralField y = random_solenoidal(g, 121, 1.0, 0.8, 4);
    auto id = torus_identity_check(y, 1.0);
    CHECK(id.term2 == 0.0);
    const double v2 = sobolev_norm(y, 1.0);
    CHECK(rel_err(id.lhs, v2 * v2) < 1e-11);
    CHECK(rel_err(id.lhs, id.term1) < 1e-11);
}

TEST_CASE("torus identity: single shear mode at r=3, N=64") {
    Grid g(2, 1.0, 64);
    SpectralField y = shear_mode(g, 1.1, 1);
    auto id = torus_identity_check(y, 3.0);
    CHECK(rel_err(id.lhs, id.term1 + id.term2) < 1e-10);
}

TEST_CASE("torus identity: zero field gives the zero triple") {
    Grid g(2, 1.0, 16);
    SpectralField z(g);
    auto id = torus_identity_check(z, 3.0);
    CHECK(id.lhs == 0.0);
    CHECK(id.term1 == 0.0);
    CHECK(id.term2 == 0.0);
}

TEST_CASE("torus identity on band-limited fields, r in {3,5}") {
    Grid g2(2, 1.0, 64);
    SpectralField y2 = random_solenoidal(g2, 131, 1.0, 0.6, 6);
    auto id3 = torus_identity_check(y2, 3.0);
    CHECK(rel_err(id3.lhs, id3.term1 + id3.term2) < 1e-10);

    Grid g3(3, 1.0, 32);
    SpectralField y3 = nonvanishing_solenoidal_3d(g3, 0.2, 132);
    auto id5 = torus_identity_check(y3, 5.0);
    CHECK(rel_err(id5.lhs, id5.term1 + id5.term2) < 1e-6);
}

TEST_CASE("embedding ratio report is finite and positive") {
    Grid g(2, 1.0, 32);
    SpectralField u = random_solenoidal(g, 141, 1.0);
    auto rep = remark_embedding_ratio(u, 3.0);
    CHECK(rep.lhs > 0.0);
    CHECK(rep.rhs > 0.0);
    CHECK(std::isfinite(rep.fitted_C));
}
