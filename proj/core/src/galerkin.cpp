#include "blkit/galerkin.hpp"

#include "blkit/errors.hpp"
#include "blkit/fd.hpp"
#include "blkit/ldp.hpp"
#include "blkit/linsolve.hpp"
#include "blkit/profiles.hpp"
#include "blkit/quad.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace blkit {

namespace {

// Exact integrals of a piecewise-linear field against cos(k_m y) and
// sin(k_m y) on [0, N], k_m = pi m / N (half-range lattice): no aliasing at
// any mode count; the only error is the O(h^2) interpolation of the field.
struct TrigMoments {
    std::vector<std::pair<double, double>> cs; // (cos moment, sin moment)
    double at_cos(int m) const { return cs[m].first; }
    double at_sin(int m) const { return cs[m].second; }
};

TrigMoments trig_moments(std::span<const double> c, std::span<const double> yn,
                         int m_max, double N) {
    TrigMoments tm;
    tm.cs.assign(m_max + 1, {0.0, 0.0});
    double plain = 0.0;
    for (std::size_t i = 1; i < yn.size(); ++i)
        plain += 0.5 * (c[i] + c[i - 1]) * (yn[i] - yn[i - 1]);
    tm.cs[0] = {plain, 0.0};
    for (int m = 1; m <= m_max; ++m) {
        const double k = std::numbers::pi * m / N;
        double Ic = 0.0, Is = 0.0;
        double s0 = std::sin(k * yn[0]), c0 = std::cos(k * yn[0]);
        for (std::size_t i = 1; i < yn.size(); ++i) {
            const double h = yn[i] - yn[i - 1];
            const double s1 = std::sin(k * yn[i]), c1 = std::cos(k * yn[i]);
            const double alpha = c[i - 1];
            const double beta = (c[i] - c[i - 1]) / h;
            Ic += alpha * (s1 - s0) / k + beta * (h * s1 / k + (c1 - c0) / (k * k));
            Is += alpha * (c0 - c1) / k + beta * (-h * c1 / k + (s1 - s0) / (k * k));
            s0 = s1;
            c0 = c1;
        }
        tm.cs[m] = {Ic, Is};
    }
    return tm;
}

// int c sin(k_l y) sin(k_i y) dy
double ss(const TrigMoments& t, int l, int i) {
    return 0.5 * (t.at_cos(std::abs(l - i)) - t.at_cos(l + i));
}
// int c cos(k_l y) sin(k_i y) dy  (= 1/2 [S(i+l) + S(i-l)])
double cs_int(const TrigMoments& t, int l, int i) {
    const int d = i - l;
    const double sd = d >= 0 ? t.at_sin(d) : -t.at_sin(-d);
    return 0.5 * (t.at_sin(i + l) + sd);
}
// int c sin(k_l y) cos(k_i y) dy
double sc_int(const TrigMoments& t, int l, int i) {
    const int d = l - i;
    const double sd = d >= 0 ? t.at_sin(d) : -t.at_sin(-d);
    return 0.5 * (t.at_sin(l + i) + sd);
}
// int c cos(k_l y) cos(k_i y) dy
double cc(const TrigMoments& t, int l, int i) {
    return 0.5 * (t.at_cos(std::abs(l - i)) + t.at_cos(l + i));
}

} // namespace

namespace {

// D^m sin(ky) = k^m * cycle[m](ky), cycle: sin, cos, -sin, -cos.
struct TrigKind {
    int phase; // 0: sin, 1: cos, 2: -sin, 3: -cos
};

// Generic assembled entry int c * D^da e_l * D^db e_i over the mixed basis
// {e_0 (augmented plateau), sines}. Sine-sine entries use the exact
// piecewise-linear trig moments; entries with the augmented mode fold its
// derivative into the coefficient field.
struct MixedAssembler {
    const Grid1D* grid;
    double N;
    int n_sine;
    bool augmented;
    const Profile* e0d[3]; // e0, e0', e0''

    static int phase_mul_sign(int pa, int pb) {
        // sign of (cycle[pa] * cycle[pb]) written as +-(sin/cos)(a)(sin/cos)(b)
        int sign = 1;
        if (pa >= 2) sign = -sign;
        if (pb >= 2) sign = -sign;
        return sign;
    }

    void add_term(SquareMatrix& M, const Profile& c, int da, int db, double scale,
                  const std::vector<double>& kw, int m_max) const {
        const auto& yn = grid->nodes;
        const TrigMoments tm = trig_moments(c, yn, m_max, N);
        const int off = augmented ? 1 : 0;
        // sine-sine block
        for (int l = 1; l <= n_sine; ++l) {
            const double al = kw[l];
            const int pa = da % 4;
            for (int i = 1; i <= n_sine; ++i) {
                const double ai = kw[i];
                const int pb = db % 4;
                const int sign = phase_mul_sign(pa, pb);
                const bool a_sin = (pa % 2) == 0;
                const bool b_sin = (pb % 2) == 0;
                double val;
                if (a_sin && b_sin) val = ss(tm, l, i);
                else if (!a_sin && b_sin) val = cs_int(tm, l, i);
                else if (a_sin && !b_sin) val = sc_int(tm, l, i);
                else val = cc(tm, l, i);
                M.at(off + i - 1, off + l - 1) +=
                    scale * sign * std::pow(al, da) * std::pow(ai, db) * val;
            }
        }
        if (!augmented) return;
        const std::size_t ny = yn.size();
        Profile prod(ny);
        // l = e0 column (trial side): c * D^da e0 against D^db sin_i
        for (std::size_t j = 0; j < ny; ++j) prod[j] = c[j] * (*e0d[da])[j];
        const TrigMoments tcol = trig_moments(prod, yn, n_sine, N);
        for (int i = 1; i <= n_sine; ++i) {
            const double ai = kw[i];
            const int pb = db % 4;
            const int sgn = pb >= 2 ? -1 : 1;
            const double mom = (pb % 2) == 0 ? tcol.at_sin(i) : tcol.at_cos(i);
            M.at(i - 1 + 1, 0) += scale * sgn * std::pow(ai, db) * mom;
        }
        // i = e0 row (test side): c * D^db e0 against D^da sin_l
        for (std::size_t j = 0; j < ny; ++j) prod[j] = c[j] * (*e0d[db])[j];
        const TrigMoments trow = trig_moments(prod, yn, n_sine, N);
        for (int l = 1; l <= n_sine; ++l) {
            const double al = kw[l];
            const int pa = da % 4;
            const int sgn = pa >= 2 ? -1 : 1;
            const double mom = (pa % 2) == 0 ? trow.at_sin(l) : trow.at_cos(l);
            M.at(0, l - 1 + 1) += scale * sgn * std::pow(al, da) * mom;
        }
        // e0-e0 entry
        double acc = 0.0;
        for (std::size_t j = 1; j < ny; ++j) {
            const double h = yn[j] - yn[j - 1];
            acc += 0.5 * h *
                   (c[j] * (*e0d[da])[j] * (*e0d[db])[j] +
                    c[j - 1] * (*e0d[da])[j - 1] * (*e0d[db])[j - 1]);
        }
        M.at(0, 0) += scale * acc;
    }

    void add_rhs(std::vector<double>& Fv, const Profile& c,
                 const std::vector<double>& kw, int m_max) const {
        const TrigMoments tm = trig_moments(c, grid->nodes, m_max, N);
        const int off = augmented ? 1 : 0;
        for (int i = 1; i <= n_sine; ++i) Fv[off + i - 1] += tm.at_sin(i);
        if (augmented) {
            const auto& yn = grid->nodes;
            double acc = 0.0;
            for (std::size_t j = 1; j < yn.size(); ++j) {
                const double h = yn[j] - yn[j - 1];
                acc += 0.5 * h * (c[j] * (*e0d[0])[j] + c[j - 1] * (*e0d[0])[j - 1]);
            }
            Fv[0] += acc;
        }
    }
};

} // namespace

GalerkinSystem build_galerkin(const LDPProblem& prob, int n_modes, double box_N) {
    const BaseFlow& bf = *prob.bf;
    const Grid1D& grid = bf.grid;
    if (prob.theta <= 0.0) throw ConfigError("build_galerkin: theta must be positive");
    if (box_N <= 0.0) box_N = grid.y_max;
    if (std::abs(box_N - grid.y_max) > 1e-12)
        throw ConfigError("build_galerkin: box_N must coincide with the grid extent");
    if (n_modes < 2) throw ConfigError("build_galerkin: need at least two modes");

    GalerkinSystem sys;
    sys.box_N = box_N;
    sys.bf = &bf;
    sys.theta = prob.theta;
    sys.kappa = prob.kappa;
    sys.augmented = true;
    const int n_sine = n_modes - 1; // one slot goes to the plateau mode
    sys.n_modes = n_modes;

    const std::size_t nx = bf.nx(), ny = bf.ny();
    const double N = box_N;
    const auto& yn = grid.nodes;

    // Basis samples: index 0 is the plateau mode e0 (ramps to 1 by y = 2 and
    // carries the free far-field value of q); 1..n_sine are half-range sines.
    sys.e.resize(n_modes);
    sys.e1.resize(n_modes);
    sys.e2.resize(n_modes);
    sys.e1_at_0.assign(n_modes, 0.0);
    Profile e0(ny), e0p(ny), e0pp(ny);
    const double yc = 2.0;
    for (std::size_t i = 0; i < ny; ++i) {
        const double t = yn[i] / yc;
        e0[i] = smoothstep(t);
        e0p[i] = smoothstep_d1(t) / yc;
        e0pp[i] = smoothstep_d2(t) / (yc * yc);
    }
    sys.e[0] = e0;
    sys.e1[0] = e0p;
    sys.e2[0] = e0pp;
    sys.e1_at_0[0] = 0.0;
    sys.e0_derivs.assign(5, Profile(ny, 0.0));
    for (std::size_t i = 0; i < ny; ++i) {
        const double t = yn[i] / yc;
        sys.e0_derivs[0][i] = e0[i];
        sys.e0_derivs[1][i] = e0p[i];
        sys.e0_derivs[2][i] = e0pp[i];
        sys.e0_derivs[3][i] = smoothstep_d3(t) / (yc * yc * yc);
        sys.e0_derivs[4][i] = smoothstep_d4(t) / (yc * yc * yc * yc);
    }
    std::vector<double> kw(n_sine + 1, 0.0);
    for (int m = 1; m <= n_sine; ++m) {
        kw[m] = std::numbers::pi * m / N;
        sys.e[m].resize(ny);
        sys.e1[m].resize(ny);
        sys.e2[m].resize(ny);
        for (std::size_t i = 0; i < ny; ++i) {
            sys.e[m][i] = std::sin(kw[m] * yn[i]);
            sys.e1[m][i] = kw[m] * std::cos(kw[m] * yn[i]);
            sys.e2[m][i] = -kw[m] * kw[m] * std::sin(kw[m] * yn[i]);
        }
        sys.e1_at_0[m] = kw[m];
    }

    // u_theta^{(N)}: u_theta below N/4, frozen at its N/2 value past N/2.
    sys.u_theta_N = Field2D(nx, ny, 0.0, "u_theta_N");
    for (std::size_t ix = 0; ix < nx; ++ix) {
        double u_half;
        {
            const double target = N / 2.0;
            auto it = std::upper_bound(yn.begin(), yn.end(), target);
            std::size_t j =
                it == yn.begin() ? 0 : static_cast<std::size_t>(it - yn.begin()) - 1;
            j = std::min(j, ny - 2);
            const double t = (target - yn[j]) / (yn[j + 1] - yn[j]);
            u_half = (1 - t) * bf.u_bar.at(ix, j) + t * bf.u_bar.at(ix, j + 1) + prob.theta;
        }
        for (std::size_t iy = 0; iy < ny; ++iy) {
            const double y = yn[iy];
            const double ut = bf.u_bar.at(ix, iy) + prob.theta;
            if (y <= N / 4.0)
                sys.u_theta_N.at(ix, iy) = ut;
            else if (y >= N / 2.0)
                sys.u_theta_N.at(ix, iy) = u_half;
            else {
                const double w = smoothstep((y - N / 4.0) / (N / 4.0));
                sys.u_theta_N.at(ix, iy) = (1.0 - w) * ut + w * u_half;
            }
        }
    }

    const int dim = n_modes;
    const int m_max = 2 * n_sine;
    sys.Gamma_of_x.assign(nx, SquareMatrix(dim));
    sys.A_of_x.assign(nx, SquareMatrix(dim));
    sys.K_of_x.assign(nx, SquareMatrix(dim));
    sys.F_of_x.assign(nx, std::vector<double>(dim, 0.0));

    const Field2D& F = prob.F_theta();
    const Field2D& uy = bf.u_deriv(0, 1);
    const Field2D& uyy = bf.u_deriv(0, 2);
    const Field2D& vb = bf.v_bar;
    const Field2D& vby = bf.v_deriv(0, 1);
    const Field2D& vbyy = bf.v_deriv(0, 2);
    const Field2D& vbx = bf.v_deriv(1, 0);
    const Field2D& vbxy = bf.v_deriv(1, 1);
    const Field2D& vbxyy = bf.v_deriv(1, 2);

    const bool have_u0 = !prob.u0_trace.empty() && prob.kappa != 0;
    Profile u0yy;
    if (have_u0) u0yy = differentiate(prob.u0_trace, yn, 2);

    MixedAssembler ma;
    ma.grid = &grid;
    ma.N = N;
    ma.n_sine = n_sine;
    ma.augmented = true;
    ma.e0d[0] = &e0;
    ma.e0d[1] = &e0p;
    ma.e0d[2] = &e0pp;

    const int kap = prob.kappa;
    Profile w2(ny), cU(ny), cUy2(ny), cUyy(ny), fF(ny);
    Profile p1(ny), p2(ny);
    Profile a1(ny), a2(ny), a3(ny), a4(ny), a5(ny), a6(ny);
    Profile q1(ny), q2(ny);
    Profile r1(ny), r2(ny), r3(ny), r4(ny), r5(ny), r6(ny);
    for (std::size_t ix = 0; ix < nx; ++ix) {
        for (std::size_t i = 0; i < ny; ++i) {
            const double u = bf.u_bar.at(ix, i);
            const double u1v = uy.at(ix, i);
            const double u2v = uyy.at(ix, i);
            const double utn = sys.u_theta_N.at(ix, i);
            w2[i] = utn * utn;
            cU[i] = u;
            cUy2[i] = 2.0 * u1v;
            cUyy[i] = u2v;
            const double vbv = vb.at(ix, i), vbyv = vby.at(ix, i),
                         vbyyv = vbyy.at(ix, i);
            const double vbxv = vbx.at(ix, i), vbxyv = vbxy.at(ix, i),
                         vbxyyv = vbxyy.at(ix, i);
            p1[i] = vbyyv * u1v;
            p2[i] = vbyyv * u;
            a1[i] = u2v * vbyv;
            a2[i] = 2.0 * u1v * vbyv;
            a3[i] = u * vbyv;
            a4[i] = u2v * vbv;
            a5[i] = 2.0 * u1v * vbv;
            a6[i] = u * vbv;
            q1[i] = vbxyyv * u1v;
            q2[i] = vbxyyv * u;
            r1[i] = u2v * vbxyv;
            r2[i] = 2.0 * u1v * vbxyv;
            r3[i] = u * vbxyv;
            r4[i] = u2v * vbxv;
            r5[i] = 2.0 * u1v * vbxv;
            r6[i] = u * vbxv;
            double f = F.at(ix, i);
            if (have_u0) f -= kap * (-vbxyyv * prob.u0_trace[i] + vbxv * u0yy[i]);
            fF[i] = f;
        }
        // Gamma = int w2 De_l De_i
        ma.add_term(sys.Gamma_of_x[ix], w2, 1, 1, 1.0, kw, m_max);
        // A: (d_yy(u e_l), e_i'') + wall + kappa pieces
        ma.add_term(sys.A_of_x[ix], cUyy, 0, 2, 1.0, kw, m_max);
        ma.add_term(sys.A_of_x[ix], cUy2, 1, 2, 1.0, kw, m_max);
        ma.add_term(sys.A_of_x[ix], cU, 2, 2, 1.0, kw, m_max);
        {
            const double uy0 = uy.at(ix, 0);
            const int off = 1;
            for (int l = 1; l <= n_sine; ++l)
                for (int i = 1; i <= n_sine; ++i)
                    sys.A_of_x[ix].at(off + i - 1, off + l - 1) +=
                        2.0 * uy0 * kw[l] * kw[i];
        }
        if (kap != 0) {
            ma.add_term(sys.A_of_x[ix], p1, 0, 0, kap, kw, m_max);
            ma.add_term(sys.A_of_x[ix], p2, 1, 0, kap, kw, m_max);
            ma.add_term(sys.A_of_x[ix], a1, 0, 0, kap, kw, m_max);
            ma.add_term(sys.A_of_x[ix], a2, 1, 0, kap, kw, m_max);
            ma.add_term(sys.A_of_x[ix], a3, 2, 0, kap, kw, m_max);
            ma.add_term(sys.A_of_x[ix], a4, 0, 1, kap, kw, m_max);
            ma.add_term(sys.A_of_x[ix], a5, 1, 1, kap, kw, m_max);
            ma.add_term(sys.A_of_x[ix], a6, 2, 1, kap, kw, m_max);
            ma.add_term(sys.K_of_x[ix], q1, 0, 0, kap, kw, m_max);
            ma.add_term(sys.K_of_x[ix], q2, 1, 0, kap, kw, m_max);
            ma.add_term(sys.K_of_x[ix], r1, 0, 0, kap, kw, m_max);
            ma.add_term(sys.K_of_x[ix], r2, 1, 0, kap, kw, m_max);
            ma.add_term(sys.K_of_x[ix], r3, 2, 0, kap, kw, m_max);
            ma.add_term(sys.K_of_x[ix], r4, 0, 1, kap, kw, m_max);
            ma.add_term(sys.K_of_x[ix], r5, 1, 1, kap, kw, m_max);
            ma.add_term(sys.K_of_x[ix], r6, 2, 1, kap, kw, m_max);
        }
        ma.add_rhs(sys.F_of_x[ix], fF, kw, m_max);
    }
    sys.Gamma = sys.Gamma_of_x[0];
    return sys;
}

double gamma_min_pivot(const SquareMatrix& G) {
    const int n = G.n;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(G.at(i, j) - G.at(j, i)) >
                1e-10 * std::max(1.0, std::abs(G.at(i, j))))
                throw NumericalError("gamma_min_pivot: Gamma is not symmetric");
    std::vector<double> L(static_cast<std::size_t>(n) * n, 0.0);
    double minpiv = std::numeric_limits<double>::max();
    for (int j = 0; j < n; ++j) {
        double d = G.at(j, j);
        for (int k = 0; k < j; ++k) d -= L[j * n + k] * L[j * n + k];
        if (d <= 0.0)
            throw NumericalError("gamma_min_pivot: Cholesky failed (Gamma not SPD)", d);
        minpiv = std::min(minpiv, d);
        const double s = std::sqrt(d);
        L[j * n + j] = s;
        for (int i = j + 1; i < n; ++i) {
            double v = G.at(i, j);
            for (int k = 0; k < j; ++k) v -= L[i * n + k] * L[j * n + k];
            L[i * n + j] = v / s;
        }
    }
    return minpiv;
}

namespace {

struct SysView {
    const SquareMatrix& G;
    const SquareMatrix& A;
    const SquareMatrix& K;
    const std::vector<double>& F;
};

struct SysStorage {
    SquareMatrix G, A, K;
    std::vector<double> F;
    SysView view() const { return {G, A, K, F}; }
};

SysView at_node(const GalerkinSystem& sys, std::size_t ix) {
    return {sys.Gamma_of_x[ix], sys.A_of_x[ix], sys.K_of_x[ix], sys.F_of_x[ix]};
}

// Linear interpolation of the assembled system between nodes ix and ix+1.
SysStorage at_fraction(const GalerkinSystem& sys, std::size_t ix, double t) {
    SysStorage st;
    const int n = sys.n_modes;
    st.G = SquareMatrix(n);
    st.A = SquareMatrix(n);
    st.K = SquareMatrix(n);
    st.F.assign(n, 0.0);
    const double a0 = 1.0 - t, a1 = t;
    for (std::size_t k = 0; k < st.G.a.size(); ++k) {
        st.G.a[k] = a0 * sys.Gamma_of_x[ix].a[k] + a1 * sys.Gamma_of_x[ix + 1].a[k];
        st.A.a[k] = a0 * sys.A_of_x[ix].a[k] + a1 * sys.A_of_x[ix + 1].a[k];
        st.K.a[k] = a0 * sys.K_of_x[ix].a[k] + a1 * sys.K_of_x[ix + 1].a[k];
    }
    for (int i = 0; i < n; ++i)
        st.F[i] = a0 * sys.F_of_x[ix][i] + a1 * sys.F_of_x[ix + 1][i];
    return st;
}

std::vector<double> eval_bdot(int n, const SysView& ns, const std::vector<double>& b,
                              const std::vector<double>& B) {
    std::vector<double> rhs(n);
    for (int i = 0; i < n; ++i) {
        double s = ns.F[i];
        for (int j = 0; j < n; ++j) s -= ns.A.at(i, j) * b[j] + ns.K.at(i, j) * B[j];
        rhs[i] = s;
    }
    DenseMatrix G(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) G.at(i, j) = ns.G.at(i, j);
    return solve_linear(std::move(G), std::move(rhs));
}

// One implicit-trapezoid step of Gamma b' = F - A b - K B, B' = b.
void trap_step(int n, const SysView& s0, const SysView& s1, double h,
               const std::vector<double>& b0v, const std::vector<double>& B0v,
               std::vector<double>& b1v, std::vector<double>& B1v) {
    const std::vector<double> bdot0 = eval_bdot(n, s0, b0v, B0v);
    DenseMatrix M(n);
    std::vector<double> r(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            M.at(i, j) =
                s1.G.at(i, j) + 0.5 * h * s1.A.at(i, j) + 0.25 * h * h * s1.K.at(i, j);
        double acc = 0.0;
        for (int j = 0; j < n; ++j)
            acc += s1.G.at(i, j) * (b0v[j] + 0.5 * h * bdot0[j]) -
                   0.5 * h * s1.K.at(i, j) * (B0v[j] + 0.5 * h * b0v[j]);
        r[i] = acc + 0.5 * h * s1.F[i];
    }
    b1v = solve_linear(std::move(M), std::move(r));
    B1v.resize(n);
    for (int i = 0; i < n; ++i) B1v[i] = B0v[i] + 0.5 * h * (b0v[i] + b1v[i]);
}

} // namespace

GalerkinTrajectory march_galerkin(const GalerkinSystem& sys, const std::vector<double>& b0,
                                  const MarchSchedule& sched, double step_tol) {
    const int n = sys.n_modes;
    if (static_cast<int>(b0.size()) != n)
        throw ConfigError("march_galerkin: b0 size mismatch");
    const std::size_t nx = sched.size();
    GalerkinTrajectory traj;
    traj.b.assign(nx, std::vector<double>(n, 0.0));
    traj.bdot.assign(nx, std::vector<double>(n, 0.0));
    traj.b[0] = b0;

    std::vector<double> B(n, 0.0);
    traj.bdot[0] = eval_bdot(n, at_node(sys, 0), traj.b[0], B);

    for (std::size_t k = 0; k + 1 < nx; ++k) {
        // Step-doubling with recursive subdivision; subsystems between the
        // schedule nodes come from linear interpolation of the assembly.
        std::vector<double> bcur = traj.b[k], Bcur = B;
        const std::function<void(double, double, int)> advance =
            [&](double t0, double t1, int depth) {
                const double h = (t1 - t0) * sched.dx(k);
                const SysStorage st0 = at_fraction(sys, k, t0);
                const SysStorage st1 = at_fraction(sys, k, t1);
                const SysStorage stm = at_fraction(sys, k, 0.5 * (t0 + t1));
                std::vector<double> b_full, B_full, b_half, B_half, b_mid, B_mid;
                trap_step(n, st0.view(), st1.view(), h, bcur, Bcur, b_full, B_full);
                trap_step(n, st0.view(), stm.view(), 0.5 * h, bcur, Bcur, b_mid, B_mid);
                trap_step(n, stm.view(), st1.view(), 0.5 * h, b_mid, B_mid, b_half, B_half);
                double err = 0.0, scale = 1.0;
                for (int i = 0; i < n; ++i) {
                    err = std::max(err, std::abs(b_full[i] - b_half[i]));
                    scale = std::max(scale, std::abs(b_half[i]));
                }
                if (err <= step_tol * scale * 3.0 || depth >= 10) {
                    if (depth >= 10 && err > step_tol * scale * 3.0)
                        throw NumericalError(
                            "march_galerkin: local error above tolerance with no "
                            "smaller step available at x-node " +
                            std::to_string(k + 1));
                    bcur = b_half;
                    Bcur = B_half;
                    return;
                }
                advance(t0, 0.5 * (t0 + t1), depth + 1);
                advance(0.5 * (t0 + t1), t1, depth + 1);
            };
        advance(0.0, 1.0, 0);
        traj.b[k + 1] = bcur;
        B = Bcur;
        traj.bdot[k + 1] = eval_bdot(n, at_node(sys, k + 1), traj.b[k + 1], B);
    }
    return traj;
}

std::vector<double> project_sine(const Profile& f, const Grid1D& grid,
                                 const GalerkinSystem& sys) {
    // L2 projection onto the mixed basis via the Gram system, with the same
    // exact piecewise-linear quadrature as the assembly.
    const int dim = sys.n_modes;
    const int n_sine = sys.augmented ? dim - 1 : dim;
    const int off = sys.augmented ? 1 : 0;
    const auto& yn = grid.nodes;
    DenseMatrix G(dim);
    std::vector<double> rhs(dim, 0.0);
    // sine-sine: exactly (N/2) delta; sine-e0 and e0-e0 by moments/trapz.
    for (int m = 1; m <= n_sine; ++m) G.at(off + m - 1, off + m - 1) = 0.5 * sys.box_N;
    const TrigMoments tf = trig_moments(f, yn, n_sine, sys.box_N);
    for (int m = 1; m <= n_sine; ++m) rhs[off + m - 1] = tf.at_sin(m);
    if (sys.augmented) {
        const Profile& e0 = sys.e0_derivs[0];
        const TrigMoments te0 = trig_moments(e0, yn, n_sine, sys.box_N);
        for (int m = 1; m <= n_sine; ++m) {
            G.at(0, off + m - 1) = te0.at_sin(m);
            G.at(off + m - 1, 0) = te0.at_sin(m);
        }
        double g00 = 0.0, r0 = 0.0;
        for (std::size_t j = 1; j < yn.size(); ++j) {
            const double h = yn[j] - yn[j - 1];
            g00 += 0.5 * h * (e0[j] * e0[j] + e0[j - 1] * e0[j - 1]);
            r0 += 0.5 * h * (f[j] * e0[j] + f[j - 1] * e0[j - 1]);
        }
        G.at(0, 0) = g00;
        rhs[0] = r0;
    }
    return solve_linear(std::move(G), std::move(rhs));
}

Field2D synthesize(const GalerkinSystem& sys, const GalerkinTrajectory& traj,
                   const MarchSchedule& sched, int y_deriv, int x_deriv) {
    const std::size_t nx = sched.size();
    const Grid1D& grid = sys.bf->grid;
    const std::size_t ny = grid.size();
    Field2D out(nx, ny, 0.0, "q");

    std::vector<std::vector<double>> coef(nx, std::vector<double>(sys.n_modes));
    if (x_deriv == 0) {
        coef = traj.b;
    } else if (x_deriv == 1) {
        coef = traj.bdot;
    } else {
        for (int m = 0; m < sys.n_modes; ++m) {
            Profile col(nx);
            for (std::size_t ix = 0; ix < nx; ++ix) col[ix] = traj.bdot[ix][m];
            const Profile d = differentiate(col, sched.x_nodes, x_deriv - 1);
            for (std::size_t ix = 0; ix < nx; ++ix) coef[ix][m] = d[ix];
        }
    }

    const int off = sys.augmented ? 1 : 0;
    for (std::size_t ix = 0; ix < nx; ++ix) {
        if (sys.augmented) {
            const Profile& b0 = sys.e0_derivs[std::min(y_deriv, 4)];
            const double c = coef[ix][0];
            for (std::size_t iy = 0; iy < ny; ++iy) out.at(ix, iy) += c * b0[iy];
        }
        for (int m = off; m < sys.n_modes; ++m) {
            const double kwave = std::numbers::pi * (m - off + 1) / sys.box_N;
            const double c = coef[ix][m];
            const double kp = std::pow(kwave, y_deriv);
            for (std::size_t iy = 0; iy < ny; ++iy) {
                const double y = grid.nodes[iy];
                double basis;
                switch (y_deriv % 4) {
                    case 0: basis = std::sin(kwave * y); break;
                    case 1: basis = std::cos(kwave * y); break;
                    case 2: basis = -std::sin(kwave * y); break;
                    default: basis = -std::cos(kwave * y); break;
                }
                out.at(ix, iy) += c * kp * basis;
            }
        }
    }
    return out;
}

} // namespace blkit
