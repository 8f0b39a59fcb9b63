#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "blkit/baseflow.hpp"
#include "blkit/errors.hpp"
#include "blkit/fd.hpp"
#include "blkit/io.hpp"
#include "blkit/quad.hpp"

#include <cmath>
#include <filesystem>

using namespace blkit;

namespace {

BaseFlow default_flow(int nx = 97, int ny = 97, double L = 0.05) {
    const Grid1D g = build_grid(30.0, ny, MapKind::exp_stretched);
    const MarchSchedule s = uniform_schedule(L, nx);
    auto U0 = make_plateau_shear();
    return solve_prandtl(*U0, L, s, g);
}

} // namespace

TEST_CASE("solve_prandtl: wall and matching conditions hold") {
    const BaseFlow bf = default_flow();
    for (std::size_t ix = 0; ix < bf.nx(); ++ix) {
        CHECK(bf.u_bar.at(ix, 0) == 0.0);
        CHECK(std::abs(bf.v_bar.at(ix, 0)) < 1e-12);
        CHECK(std::abs(bf.u_bar.at(ix, bf.ny() - 1) - 1.0) <= 1e-6);
        CHECK(bf.wall_shear(ix) > 0.0);
    }
    CHECK(bf.march_residual <= 1e-8);
}

TEST_CASE("solve_prandtl: x = 0 slice is the initial profile") {
    const BaseFlow bf = default_flow();
    auto U0 = make_plateau_shear();
    for (std::size_t iy = 0; iy < bf.ny(); ++iy)
        CHECK(bf.u_bar.at(0, iy) == doctest::Approx(U0->value(bf.grid.nodes[iy])).epsilon(1e-12));
}

TEST_CASE("solve_prandtl: smoothed tanh family marches too") {
    const Grid1D g = build_grid(30.0, 97, MapKind::exp_stretched);
    const MarchSchedule s = uniform_schedule(0.05, 49);
    auto U0 = make_smoothed_tanh(2.0);
    const BaseFlow bf = solve_prandtl(*U0, 0.05, s, g);
    for (std::size_t ix = 0; ix < bf.nx(); ++ix) CHECK(bf.wall_shear(ix) > 0.0);
    CHECK(bf.march_residual <= 1e-8);
}

TEST_CASE("solve_prandtl rejects a profile with zero wall slope") {
    const Grid1D g = build_grid(30.0, 65, MapKind::exp_stretched);
    const MarchSchedule s = uniform_schedule(0.05, 17);
    // U0 = 1 - exp(-y^2)-like: U0'(0) = 0 violates the Oleinik conditions.
    Profile bad(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        bad[i] = 1.0 - std::exp(-g.nodes[i] * g.nodes[i]);
    CHECK_THROWS_AS(solve_prandtl(bad, 0.05, s, g), ConfigError);
}

TEST_CASE("divergence constraint: v = -int u_x to quadrature tolerance") {
    const BaseFlow bf = default_flow();
    const Field2D ux = differentiate(bf.u_bar, Dir::x, 1, bf.sched, bf.grid);
    Field2D vtest = quad_y(ux, bf.grid, QuadMode::from_0_to_y);
    for (auto& v : vtest.v) v = -v;
    double worst = 0.0;
    for (std::size_t ix = 1; ix < bf.nx(); ++ix)
        for (std::size_t iy = 0; iy < bf.ny(); ++iy)
            worst = std::max(worst, std::abs(vtest.at(ix, iy) - bf.v_bar.at(ix, iy)));
    CHECK(worst < 1e-12); // constructed this way
    // and the equation-based x = 0 companion agrees with the FD slice up to
    // the y-truncation error of the bump region
    double w0 = 0.0;
    for (std::size_t iy = 0; iy < bf.ny(); ++iy)
        w0 = std::max(w0, std::abs(bf.v0[iy] - bf.v_bar.at(0, iy)));
    CHECK(w0 < 2e-2);
}

TEST_CASE("wall momentum identity: |u_yy(x, 0)| small") {
    const BaseFlow bf = default_flow();
    const Field2D& uyy = bf.u_deriv(0, 2);
    for (std::size_t ix = 0; ix < bf.nx(); ++ix)
        CHECK(std::abs(uyy.at(ix, 0)) < 1e-3);
}

TEST_CASE("grid refinement: relative drift of u_bar at most 1e-3") {
    const BaseFlow coarse = default_flow(49, 65);
    const BaseFlow fine = default_flow(97, 129);
    // Compare on the coarse nodes; fine grid contains none of them except the
    // endpoints, so sample the fine solution by linear interpolation.
    double drift = 0.0;
    for (std::size_t ix = 0; ix < coarse.nx(); ix += 8) {
        const double x = coarse.sched.x_nodes[ix];
        std::size_t jx = 0;
        for (; jx < fine.nx(); ++jx)
            if (std::abs(fine.sched.x_nodes[jx] - x) < 1e-14) break;
        REQUIRE(jx < fine.nx());
        for (std::size_t iy = 0; iy < coarse.ny(); iy += 4) {
            const double y = coarse.grid.nodes[iy];
            // locate bracketing fine nodes
            const auto& yn = fine.grid.nodes;
            auto it = std::upper_bound(yn.begin(), yn.end(), y);
            std::size_t j = it == yn.begin() ? 0 : static_cast<std::size_t>(it - yn.begin()) - 1;
            j = std::min(j, fine.ny() - 2);
            const double t = (y - yn[j]) / (yn[j + 1] - yn[j]);
            const double uf = (1 - t) * fine.u_bar.at(jx, j) + t * fine.u_bar.at(jx, j + 1);
            drift = std::max(drift, std::abs(uf - coarse.u_bar.at(ix, iy)));
        }
    }
    CHECK(drift <= 1e-3);
}

TEST_CASE("von Mises residual: small on the solution, 0 for single node") {
    const BaseFlow bf = default_flow(129, 129);
    const double r = von_mises_residual(bf);
    CHECK(r <= 5e-3);

    BaseFlow single = bf;
    single.sched.x_nodes.resize(1);
    CHECK(von_mises_residual(single) == 0.0);
}

TEST_CASE("von Mises residual: sensitive to a corrupted field") {
    const BaseFlow bf = default_flow(129, 129);
    const double r0 = von_mises_residual(bf);
    BaseFlow bad = bf;
    for (std::size_t ix = 0; ix < bad.nx(); ++ix)
        for (std::size_t iy = 1; iy < bad.ny(); ++iy) {
            const double x = bad.sched.x_nodes[ix];
            bad.u_bar.at(ix, iy) += 0.1 * x / bad.L * std::exp(-bad.grid.nodes[iy]);
        }
    CHECK(von_mises_residual(bad) >= 10.0 * r0);
}

TEST_CASE("oleinik_report: healthy flow") {
    const BaseFlow bf = default_flow();
    const OleinikReport rep = oleinik_report(bf);
    CHECK(rep.m0 > 0.0);
    CHECK(rep.m0 >= 0.5 * bf.wall_shear(0) * (1.0 - 1e-9));
    CHECK(rep.y0 > 0.5);
    for (const auto& [k, v] : rep.sup_bounds) {
        (void)k;
        CHECK(std::isfinite(v));
    }
}

TEST_CASE("oleinik_report: rejects a flow with negative shear") {
    BaseFlow bf = default_flow();
    // corrupt u so u_y < 0 somewhere near the wall
    const std::size_t ix = bf.nx() / 2;
    for (std::size_t iy = 1; iy < 6; ++iy)
        bf.u_bar.at(ix, iy) = -0.01 * bf.grid.nodes[iy];
    bf.du_cache.clear();
    CHECK_THROWS_AS(oleinik_report(bf), OleinikViolation);
}

TEST_CASE("baseflow CSV round trip") {
    const BaseFlow bf = default_flow(33, 65);
    const std::string dir = "/tmp/blkit_test_bf";
    export_baseflow(bf, dir);
    const BaseFlow back = import_baseflow(dir);
    REQUIRE(back.nx() == bf.nx());
    REQUIRE(back.ny() == bf.ny());
    for (std::size_t i = 0; i < bf.u_bar.v.size(); ++i) {
        CHECK(back.u_bar.v[i] == bf.u_bar.v[i]); // 17 digits: bit-exact
        CHECK(back.v_bar.v[i] == bf.v_bar.v[i]);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("synthetic flow derivative caches match finite differences") {
    const Grid1D g = build_grid(20.0, 129, MapKind::exp_stretched);
    const MarchSchedule s = uniform_schedule(0.05, 33);
    auto U = make_plateau_shear();
    const PolyExp W{{{0.3, 2, 1.0}}};
    const BaseFlow bf = synthetic_base_flow(*U, W, s, g);
    const Field2D uy_fd = differentiate(bf.u_bar, Dir::y, 1, s, g);
    const Field2D& uy = bf.u_deriv(0, 1);
    double worst = 0.0;
    for (std::size_t ix = 0; ix < bf.nx(); ++ix)
        for (std::size_t iy = 2; iy + 2 < bf.ny(); ++iy)
            worst = std::max(worst, std::abs(uy_fd.at(ix, iy) - uy.at(ix, iy)));
    CHECK(worst < 2e-2);
    // v_x must vanish identically for this family
    CHECK(max_abs(bf.v_deriv(1, 0)) == 0.0);
}
