#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "blkit/errors.hpp"
#include "blkit/fd.hpp"
#include "blkit/grid.hpp"
#include "blkit/linsolve.hpp"
#include "blkit/profiles.hpp"
#include "blkit/quad.hpp"

#include <cmath>
#include <memory>
#include <random>

using namespace blkit;

namespace {

// Independent elimination oracle: naive Gauss-Jordan, no pivot strategy
// shared with the implementation.
std::vector<double> gauss_jordan_oracle(std::vector<std::vector<double>> a,
                                        std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
        std::swap(a[k], a[p]);
        std::swap(b[k], b[p]);
        const double d = a[k][k];
        for (std::size_t j = 0; j < n; ++j) a[k][j] /= d;
        b[k] /= d;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k) continue;
            const double f = a[i][k];
            for (std::size_t j = 0; j < n; ++j) a[i][j] -= f * a[k][j];
            b[i] -= f * b[k];
        }
    }
    return b;
}

} // namespace

TEST_CASE("build_grid uniform nodes") {
    const Grid1D g = build_grid(20.0, 21, MapKind::uniform);
    REQUIRE(g.size() == 21);
    for (int i = 0; i <= 20; ++i) CHECK(g.nodes[i] == doctest::Approx(double(i)).epsilon(1e-14));
}

TEST_CASE("build_grid exp_stretched clusters near the wall") {
    const Grid1D g = build_grid(20.0, 257, MapKind::exp_stretched);
    CHECK(g.nodes[1] < 20.0 / 256.0);
    CHECK(g.nodes.front() == 0.0);
    CHECK(g.nodes.back() == 20.0);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g.nodes[i] > g.nodes[i - 1]);
}

TEST_CASE("build_grid rejects bad input") {
    CHECK_THROWS_AS(build_grid(-1.0, 64, MapKind::uniform), ConfigError);
    CHECK_THROWS_AS(build_grid(10.0, 8, MapKind::uniform), ConfigError);
}

TEST_CASE("differentiate: y^2 second derivative is exactly 2") {
    const Grid1D g = build_grid(10.0, 41, MapKind::uniform);
    Profile f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = g.nodes[i] * g.nodes[i];
    const Profile d2 = differentiate(f, g.nodes, 2);
    for (double v : d2) CHECK(v == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("differentiate: constants give zero at any order") {
    const Grid1D g = build_grid(5.0, 33, MapKind::exp_stretched);
    Profile f(g.size(), 3.7);
    for (int order = 1; order <= 4; ++order) {
        const Profile d = differentiate(f, g.nodes, order);
        for (double v : d) CHECK(std::abs(v) < 1e-6);
    }
}

TEST_CASE("differentiate: Richardson slope ~2 for sin on uniform grid") {
    auto max_err = [](int n) {
        const Grid1D g = build_grid(10.0, n, MapKind::uniform);
        Profile f(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) f[i] = std::sin(g.nodes[i]);
        const Profile d = differentiate(f, g.nodes, 1);
        double e = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            e = std::max(e, std::abs(d[i] - std::cos(g.nodes[i])));
        return e;
    };
    const double e1 = max_err(101), e2 = max_err(201);
    const double slope = std::log2(e1 / e2);
    CHECK(slope > 1.6);
    CHECK(slope < 3.2);
}

TEST_CASE("differentiate rejects unsupported order") {
    const Grid1D g = build_grid(5.0, 33, MapKind::uniform);
    Profile f(g.size(), 1.0);
    CHECK_THROWS_AS(differentiate(f, g.nodes, 0), ConfigError);
    CHECK_THROWS_AS(differentiate(f, g.nodes, 5), ConfigError);
}

TEST_CASE("differentiate is linear") {
    const Grid1D g = build_grid(8.0, 65, MapKind::exp_stretched);
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Profile f(g.size()), h(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) { f[i] = u(rng); h[i] = u(rng); }
    const double a = 2.25, b = -0.75;
    Profile comb(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) comb[i] = a * f[i] + b * h[i];
    const Profile d_comb = differentiate(comb, g.nodes, 2);
    const Profile df = differentiate(f, g.nodes, 2);
    const Profile dh = differentiate(h, g.nodes, 2);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(d_comb[i] == doctest::Approx(a * df[i] + b * dh[i]).epsilon(1e-11));
}

TEST_CASE("quad_y: zero integrand") {
    const Grid1D g = build_grid(10.0, 33, MapKind::uniform);
    const Profile z(g.size(), 0.0);
    for (auto mode : {QuadMode::from_0_to_y, QuadMode::from_y_to_inf}) {
        const Profile q = quad_y(z, g, mode);
        for (double v : q) CHECK(v == 0.0);
    }
}

TEST_CASE("quad_y: exp(-y) tail integral at 0 is 1") {
    const Grid1D g = build_grid(30.0, 16385, MapKind::uniform);
    Profile f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = std::exp(-g.nodes[i]);
    const Profile q = quad_y(f, g, QuadMode::from_y_to_inf);
    CHECK(q[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(q.back() == 0.0);
}

TEST_CASE("quad_y: unit integrand from 0") {
    const Grid1D g = build_grid(10.0, 65, MapKind::uniform);
    Profile f(g.size(), 1.0);
    const Profile q = quad_y(f, g, QuadMode::from_0_to_y);
    CHECK(q.back() == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("quad of derivative reproduces f - f(0)") {
    const Grid1D g = build_grid(6.0, 513, MapKind::exp_stretched);
    Profile f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = std::sin(g.nodes[i]) + 2.0;
    const Profile df = differentiate(f, g.nodes, 1);
    const Profile q = quad_y(df, g, QuadMode::from_0_to_y);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(std::abs(q[i] - (f[i] - f[0])) < 5e-4);
}

TEST_CASE("solve_linear: identity and diagonal") {
    DenseMatrix I(3);
    for (int i = 0; i < 3; ++i) I.at(i, i) = 1.0;
    const std::vector<double> b{1.0, -2.0, 3.0};
    const auto x = solve_linear(I, b);
    for (int i = 0; i < 3; ++i) CHECK(x[i] == doctest::Approx(b[i]));

    DenseMatrix D(2);
    D.at(0, 0) = 2.0;
    D.at(1, 1) = 4.0;
    const auto y = solve_linear(D, {2.0, 4.0});
    CHECK(y[0] == doctest::Approx(1.0));
    CHECK(y[1] == doctest::Approx(1.0));
}

TEST_CASE("solve_linear dense matches elimination oracle, residual contract") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::size_t n = 50;
    DenseMatrix A(n);
    std::vector<std::vector<double>> Ao(n, std::vector<double>(n));
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
        double rowsum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double v = u(rng);
            A.at(i, j) = v;
            Ao[i][j] = v;
            rowsum += std::abs(v);
        }
        A.at(i, i) += rowsum; // diagonally dominant
        Ao[i][i] += rowsum;
        b[i] = u(rng);
    }
    const auto x = solve_linear(A, b);
    const auto xo = gauss_jordan_oracle(Ao, b);
    double binf = 0.0, rinf = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(x[i] - xo[i]) < 1e-10);
        double r = -b[i];
        for (std::size_t j = 0; j < n; ++j) r += Ao[i][j] * x[j];
        rinf = std::max(rinf, std::abs(r));
        binf = std::max(binf, std::abs(b[i]));
    }
    CHECK(rinf <= 1e-10 * (1.0 + binf));
}

TEST_CASE("solve_linear banded matches dense on a random banded system") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::size_t n = 80;
    const int kl = 3, ku = 2;
    BandedMatrix B(n, kl, ku);
    DenseMatrix A(n);
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (long j = std::max<long>(0, long(i) - kl);
             j <= std::min<long>(n - 1, long(i) + ku); ++j) {
            const double v = u(rng) + (std::size_t(j) == i ? 8.0 : 0.0);
            B.at(i, j) = v;
            A.at(i, j) = v;
        }
        b[i] = u(rng);
    }
    const auto xb = solve_linear(std::move(B), b);
    const auto xd = solve_linear(std::move(A), b);
    for (std::size_t i = 0; i < n; ++i) CHECK(xb[i] == doctest::Approx(xd[i]).epsilon(1e-11));
}

TEST_CASE("solve_linear reports singular systems") {
    DenseMatrix A(2);
    A.at(0, 0) = 1.0;
    A.at(0, 1) = 2.0;
    A.at(1, 0) = 0.5;
    A.at(1, 1) = 1.0;
    CHECK_THROWS_AS(solve_linear(A, {1.0, 1.0}), NumericalError);
}

TEST_CASE("cutoff profile shape") {
    Cutoff chi;
    CHECK(chi.value(0.0) == 1.0);
    CHECK(chi.value(1.0) == 1.0);
    CHECK(chi.value(2.0) == 0.0);
    CHECK(chi.value(2.5) == 0.0);
    for (double y = 0.0; y <= 2.5; y += 0.01) CHECK(chi.d1(y) <= 1e-15);
    // C^3: third derivative finite and continuous at the knots
    CHECK(std::abs(chi.d3(1.0 + 1e-9)) < 1e-3);
    CHECK(std::abs(chi.d3(2.0 - 1e-9)) < 1e-3);
}

TEST_CASE("PolyExp analytic derivatives match finite differences") {
    PolyExp p{{{0.7, 5, 3.0}, {-0.2, 3, 2.0}}};
    const double h = 1e-5;
    for (double y : {0.3, 1.0, 2.5}) {
        const double fd = (p.value(y + h) - p.value(y - h)) / (2 * h);
        CHECK(p.deriv(y, 1) == doctest::Approx(fd).epsilon(1e-7));
        const double fd2 = (p.value(y + h) - 2 * p.value(y) + p.value(y - h)) / (h * h);
        CHECK(p.deriv(y, 2) == doctest::Approx(fd2).epsilon(1e-5));
    }
}

TEST_CASE("initial profile families satisfy the wall conditions") {
    std::vector<std::unique_ptr<InitialProfile>> profs;
    profs.push_back(make_plateau_shear(1.0));
    profs.push_back(make_smoothed_tanh(2.0));
    for (const auto& profp : profs) {
        const InitialProfile* prof = profp.get();
        CHECK(prof->value(0.0) == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(prof->deriv(0.0, 1) > 0.0);
        CHECK(std::abs(prof->deriv(0.0, 2)) < 1e-12);
        CHECK(std::abs(prof->deriv(0.0, 3)) < 1e-12);
        CHECK(std::abs(prof->value(30.0) - 1.0) < 1e-6);
        for (double y = 0.05; y < 10.0; y += 0.05) CHECK(prof->value(y) > 0.0);
    }
}


TEST_CASE("initial profile derivatives are consistent with values") {
    auto prof = make_plateau_shear(1.0);
    const double h = 1e-5;
    for (double y : {0.5, 1.3, 2.1, 2.7}) {
        const double fd = (prof->value(y + h) - prof->value(y - h)) / (2 * h);
        CHECK(prof->deriv(y, 1) == doctest::Approx(fd).epsilon(1e-7));
        const double fd2 =
            (prof->deriv(y + h, 1) - prof->deriv(y - h, 1)) / (2 * h);
        CHECK(prof->deriv(y, 2) == doctest::Approx(fd2).epsilon(1e-6));
    }
}

TEST_CASE("divide_by_y recovers smooth quotients") {
    const Grid1D g = build_grid(10.0, 129, MapKind::exp_stretched);
    Profile num(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double y = g.nodes[i];
        num[i] = y * y * std::exp(-y); // g = y^2 e^-y, g/y^2 = e^-y
    }
    const Profile q = divide_by_y(num, g.nodes, 2);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(std::abs(q[i] - std::exp(-g.nodes[i])) < 2e-4);
}
