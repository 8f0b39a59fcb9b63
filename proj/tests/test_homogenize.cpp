#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "blkit/baseflow.hpp"
#include "blkit/compat_data.hpp"
#include "blkit/errors.hpp"
#include "blkit/fd.hpp"
#include "blkit/homogenize.hpp"
#include "blkit/quad.hpp"

#include <cmath>
#include <random>

using namespace blkit;

namespace {

const BaseFlow& flow() {
    static const BaseFlow bf = [] {
        const Grid1D g = build_grid(30.0, 129, MapKind::exp_stretched);
        const MarchSchedule s = uniform_schedule(0.05, 97);
        auto U0 = make_plateau_shear();
        return solve_prandtl(*U0, 0.05, s, g);
    }();
    return bf;
}

} // namespace

TEST_CASE("psi profile invariants") {
    const Grid1D g = build_grid(30.0, 257, MapKind::exp_stretched);
    const PsiProfile p = build_psi(g);
    CHECK(p.psi[0] == 1.0);
    CHECK(std::abs(trapz(p.psi, g.nodes)) <= 1e-10);
    CHECK(std::abs(p.I_psi[0]) <= 1e-10);
    CHECK(p.I_psi.back() == 0.0);
    CHECK(std::abs(p.psi_d1[0]) <= 1e-10);
    CHECK(std::abs(p.psi_d2[0]) <= 1e-10);
    // compact support past the bump
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.nodes[i] > 4.0) CHECK(p.psi[i] == 0.0);
    CHECK_THROWS_AS(build_psi(build_grid(4.0, 64, MapKind::uniform)), ConfigError);
}

TEST_CASE("homogenize: zero boundary trace is the identity") {
    const BaseFlow& bf = flow();
    DataSpec data;
    data.u0 = PolyExp{};
    data.V0 = PolyExp::monomial(1.0, 5, 3.0);
    data.f_terms.push_back({PolyExp::monomial(1.0, 1, 0.0), PolyExp::monomial(1.0, 3, 3.0)});
    const HomogenizedData hd = homogenize(bf, data);
    CHECK(max_abs(hd.G) == 0.0);
    const Field2D f = data.sample_f(bf.sched, bf.grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < f.v.size(); ++i)
        worst = std::max(worst, std::abs(hd.g1.v[i] - f.v[i]));
    CHECK(worst == 0.0);
    for (std::size_t iy = 0; iy < bf.ny(); ++iy) {
        CHECK(hd.V0_bar[iy] == doctest::Approx(data.V0.value(bf.grid.nodes[iy])).epsilon(1e-14));
    }
}

TEST_CASE("homogenize: constant u0 kills the u0x terms") {
    const BaseFlow& bf = flow();
    DataSpec data;
    data.u0 = PolyExp::monomial(1.0, 0, 0.0); // u0 == 1
    data.V0 = PolyExp{};
    const HomogenizedData hd = homogenize(bf, data);
    // G = -u_bar_x psi - v_bar psi' + psi''
    const Field2D& ubx = bf.u_deriv(1, 0);
    double worst = 0.0;
    for (std::size_t ix = 0; ix < bf.nx(); ++ix)
        for (std::size_t iy = 0; iy < bf.ny(); ++iy) {
            const double expect = -ubx.at(ix, iy) * hd.psi.psi[iy] -
                                  bf.v_bar.at(ix, iy) * hd.psi.psi_d1[iy] + hd.psi.psi_d2[iy];
            worst = std::max(worst, std::abs(hd.G.at(ix, iy) - expect));
        }
    CHECK(worst < 1e-14);
}

TEST_CASE("homogenize: five-term spot check at random nodes") {
    const BaseFlow& bf = flow();
    DataSpec data;
    data.u0 = PolyExp::monomial(0.4, 1, 0.0).plus(PolyExp::monomial(0.2, 2, 0.0));
    data.V0 = PolyExp::monomial(1.0, 5, 3.0);
    data.f_terms.push_back({PolyExp::monomial(0.7, 1, 0.0), PolyExp::monomial(1.0, 4, 2.5)});
    const HomogenizedData hd = homogenize(bf, data);
    std::mt19937 rng(3);
    std::uniform_int_distribution<std::size_t> dx(0, bf.nx() - 1), dy(0, bf.ny() - 1);
    for (int k = 0; k < 20; ++k) {
        const std::size_t ix = dx(rng), iy = dy(rng);
        const double x = bf.sched.x_nodes[ix];
        const double u0 = data.u0.value(x), u0x = data.u0.deriv(x, 1);
        const double expect = -bf.u_bar.at(ix, iy) * hd.psi.psi[iy] * u0x -
                              bf.u_deriv(1, 0).at(ix, iy) * hd.psi.psi[iy] * u0 -
                              bf.v_bar.at(ix, iy) * hd.psi.psi_d1[iy] * u0 -
                              bf.u_deriv(0, 1).at(ix, iy) * u0x * hd.psi.I_psi[iy] +
                              hd.psi.psi_d2[iy] * u0;
        CHECK(hd.G.at(ix, iy) == doctest::Approx(expect).epsilon(1e-12));
        CHECK(hd.g1.at(ix, iy) ==
              doctest::Approx(expect + data.f_value(x, bf.grid.nodes[iy])).epsilon(1e-10));
    }
}

TEST_CASE("un-homogenization is the identity (bookkeeping round trip)") {
    const BaseFlow& bf = flow();
    DataSpec data = make_compatible_data(bf);
    const HomogenizedData hd = homogenize(bf, data);
    // u_p = u + u0 psi, v_p = v - u0x I_psi; starting from arbitrary (u, v)
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> un(-1.0, 1.0);
    Field2D u(bf.nx(), bf.ny()), v(bf.nx(), bf.ny());
    for (auto& z : u.v) z = un(rng);
    for (auto& z : v.v) z = un(rng);
    double worst = 0.0;
    for (std::size_t ix = 0; ix < bf.nx(); ++ix)
        for (std::size_t iy = 0; iy < bf.ny(); ++iy) {
            const double up = u.at(ix, iy) + hd.u0_of_x[ix] * hd.psi.psi[iy];
            const double vp = v.at(ix, iy) - hd.u0x_of_x[ix] * hd.psi.I_psi[iy];
            const double u_back = up - hd.u0_of_x[ix] * hd.psi.psi[iy];
            const double v_back = vp + hd.u0x_of_x[ix] * hd.psi.I_psi[iy];
            worst = std::max({worst, std::abs(u_back - u.at(ix, iy)),
                              std::abs(v_back - v.at(ix, iy))});
        }
    CHECK(worst < 1e-14);
}

TEST_CASE("g1 equals f on the wall (psi''(0) = 0)") {
    const BaseFlow& bf = flow();
    DataSpec data = make_compatible_data(bf);
    const HomogenizedData hd = homogenize(bf, data);
    for (std::size_t ix = 0; ix < bf.nx(); ++ix)
        CHECK(std::abs(hd.g1.at(ix, 0) - hd.f_forcing.at(ix, 0)) <= 1e-10);
}

TEST_CASE("corner compatibility: balanced data at orders 1-2") {
    const BaseFlow& bf = flow();
    DataSpec data = make_compatible_data(bf);
    const HomogenizedData hd = homogenize(bf, data);
    const CompatibilityReport rep = corner_compatibility(hd, bf, 2, &data);
    CHECK(rep.order_k_residuals[0] <= 1e-8);
    CHECK(rep.order_k_residuals[1] <= 1e-8);
}

TEST_CASE("corner compatibility: y^3/6 perturbation raises residual_1 to 1") {
    const BaseFlow& bf = flow();
    DataSpec data = make_compatible_data(bf);
    // add y^3/6 with rapid decay far out: the third wall derivative jumps by 1
    data.V0 = data.V0.plus(PolyExp::monomial(1.0 / 6.0, 3, 0.0));
    const HomogenizedData hd = homogenize(bf, data);
    const CompatibilityReport rep = corner_compatibility(hd, bf, 2, &data);
    CHECK(rep.order_k_residuals[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("corner compatibility: zero data gives zero residuals") {
    const BaseFlow& bf = flow();
    DataSpec data; // all zero
    const HomogenizedData hd = homogenize(bf, data);
    const CompatibilityReport rep = corner_compatibility(hd, bf, 2, &data);
    CHECK(rep.order_k_residuals[0] == 0.0);
    CHECK(rep.order_k_residuals[1] == 0.0);
}

TEST_CASE("integral condition: trivial and cancellation cases") {
    const BaseFlow& bf = flow();
    const Field2D zero(bf.nx(), bf.ny());
    CHECK(integral_condition_residual(bf, Profile(bf.ny(), 0.0), zero, 0.0) == 0.0);

    // V0 = c U0: the integrand r = c(U0 U0' - U0 U0') vanishes identically.
    Profile V0(bf.ny());
    for (std::size_t i = 0; i < bf.ny(); ++i) V0[i] = 2.5 * bf.U0[i];
    const double res = integral_condition_residual(bf, V0, zero, 0.0);
    CHECK(std::abs(res) < 1e-8);
}

TEST_CASE("integral condition: linear in V0, f, u0(0) jointly") {
    const BaseFlow& bf = flow();
    DataSpec d1 = make_compatible_data(bf);
    const Field2D f1 = d1.sample_f(bf.sched, bf.grid);
    Profile V1 = d1.sample_V0(bf.grid);
    Profile V2(bf.ny());
    for (std::size_t i = 0; i < bf.ny(); ++i) V2[i] = std::sin(bf.grid.nodes[i]) *
                                                      std::exp(-2.0 * bf.grid.nodes[i]);
    const Field2D zero(bf.nx(), bf.ny());
    const double a = 1.7, b = -0.6;
    Profile Vc(bf.ny());
    for (std::size_t i = 0; i < bf.ny(); ++i) Vc[i] = a * V1[i] + b * V2[i];
    Field2D fc = f1;
    for (auto& z : fc.v) z *= a;
    const double lhs = integral_condition_residual(bf, Vc, fc, a * 0.3 + b * 0.1);
    const double rhs = a * integral_condition_residual(bf, V1, f1, 0.3) +
                       b * integral_condition_residual(bf, V2, zero, 0.1);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("integral condition matches a Richardson-extrapolated quadrature oracle") {
    // Knot-aligned uniform grids (h divides 0.2) keep the trapezoid expansion
    // clean across the profile knots, so two Richardson extrapolants from
    // independent grid pairs must agree tightly.
    auto U0 = make_plateau_shear();
    const MarchSchedule s = uniform_schedule(0.05, 33);
    const PolyExp V0 = PolyExp::monomial(1.0, 5, 3.0);
    double r[4];
    int idx = 0;
    for (int n : {601, 1201, 2401, 4801}) {
        const Grid1D g = build_grid(30.0, n, MapKind::uniform);
        const BaseFlow bf = solve_prandtl(*U0, 0.05, s, g);
        const Field2D z(s.size(), g.size());
        r[idx++] = integral_condition_residual(bf, V0.sample(g.nodes), z, 0.0);
    }
    const double E1 = (4.0 * r[1] - r[0]) / 3.0;
    const double E2 = (4.0 * r[3] - r[2]) / 3.0;
    CHECK(std::abs(E1 - E2) <= 1e-8);
}

TEST_CASE("initial x-slices: zero data, and k = 0 definition") {
    const BaseFlow& bf = flow();
    DataSpec data; // zero
    const HomogenizedData hd = homogenize(bf, data);
    const auto slices = initial_x_slices(hd, bf, Profile(bf.ny(), 0.0), 1, 1);
    for (const auto& sl : slices)
        for (double v : sl) CHECK(std::abs(v) < 1e-12);

    DataSpec d2 = make_compatible_data(bf);
    const HomogenizedData hd2 = homogenize(bf, d2);
    const auto s2 = initial_x_slices(hd2, bf, Profile(bf.ny(), 0.0), 1, 0);
    const Profile df0 = differentiate(hd2.f0, bf.grid.nodes, 1);
    for (std::size_t i = 0; i < bf.ny(); ++i)
        CHECK(s2[0][i] == doctest::Approx(df0[i]).epsilon(1e-12));
}
