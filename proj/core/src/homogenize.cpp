#include "blkit/homogenize.hpp"

#include "blkit/errors.hpp"
#include "blkit/fd.hpp"
#include "blkit/interp.hpp"
#include "blkit/quad.hpp"

#include <cmath>

namespace blkit {

namespace {

double bump_shape(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double u = t * (1.0 - t);
    return 256.0 * u * u * u * u;
}
double bump_shape_d1(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double u = t * (1.0 - t);
    return 256.0 * 4.0 * u * u * u * (1.0 - 2.0 * t);
}
double bump_shape_d2(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double u = t * (1.0 - t);
    return 256.0 * (12.0 * u * u * (1.0 - 2.0 * t) * (1.0 - 2.0 * t) - 8.0 * u * u * u);
}

} // namespace

PsiProfile build_psi(const Grid1D& grid) {
    if (grid.y_max <= 5.0) throw ConfigError("build_psi: grid must extend past y = 5");
    PsiProfile p;
    const std::size_t n = grid.size();
    Profile plateau(n), bump(n), plate_d1(n), plate_d2(n), bump_d1(n), bump_d2(n);
    const Cutoff chi{1.0, 2.0};
    for (std::size_t i = 0; i < n; ++i) {
        const double y = grid.nodes[i];
        plateau[i] = chi.value(y);
        plate_d1[i] = chi.d1(y);
        plate_d2[i] = chi.d2(y);
        const double t = y - 3.0; // bump support [3, 4]
        bump[i] = bump_shape(t);
        bump_d1[i] = bump_shape_d1(t);
        bump_d2[i] = bump_shape_d2(t);
    }
    // Discrete zero-mean: c from the same trapezoid rule used everywhere.
    const double ip = trapz(plateau, grid.nodes);
    const double ib = trapz(bump, grid.nodes);
    if (ib <= 0.0) throw ConfigError("build_psi: grid does not resolve the bump support");
    p.c = ip / ib;
    p.psi.resize(n);
    p.psi_d1.resize(n);
    p.psi_d2.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        p.psi[i] = plateau[i] - p.c * bump[i];
        p.psi_d1[i] = plate_d1[i] - p.c * bump_d1[i];
        p.psi_d2[i] = plate_d2[i] - p.c * bump_d2[i];
    }
    p.I_psi = quad_y(p.psi, grid, QuadMode::from_y_to_inf);
    return p;
}

Profile DataSpec::sample_u0(const MarchSchedule& s) const { return u0.sample(s.x_nodes); }
Profile DataSpec::sample_V0(const Grid1D& g) const { return V0.sample(g.nodes); }

Field2D DataSpec::sample_f(const MarchSchedule& s, const Grid1D& g) const {
    Field2D f(s.size(), g.size(), 0.0, "f");
    for (const auto& term : f_terms) {
        const Profile ax = term.ax.sample(s.x_nodes);
        const Profile ph = term.phi.sample(g.nodes);
        for (std::size_t ix = 0; ix < s.size(); ++ix)
            for (std::size_t iy = 0; iy < g.size(); ++iy) f.at(ix, iy) += ax[ix] * ph[iy];
    }
    return f;
}

double DataSpec::f_value(double x, double y) const {
    double s = 0.0;
    for (const auto& term : f_terms) s += term.ax.value(x) * term.phi.value(y);
    return s;
}

namespace {

HomogenizedData homogenize_core(const BaseFlow& bf, const Profile& u0_of_x,
                                const Profile& u0x, const Profile& u0xx, const Profile& V0,
                                const Field2D& f) {
    const std::size_t nx = bf.nx(), ny = bf.ny();
    if (f.nx != nx || f.ny != ny || V0.size() != ny || u0_of_x.size() != nx)
        throw ConfigError("homogenize: shape mismatch");
    for (std::size_t iy = 1; iy < ny; ++iy)
        if (bf.U0[iy] <= 0.0)
            throw NumericalError("homogenize: u_bar(0, y) vanishes at an interior node");

    HomogenizedData hd;
    hd.psi = build_psi(bf.grid);
    hd.f_forcing = f;
    hd.u0_of_x = u0_of_x;
    hd.u0x_of_x = u0x;
    hd.u0xx_of_x = u0xx;

    const Field2D& ub = bf.u_bar;
    const Field2D& vb = bf.v_bar;
    const Field2D& ubx = bf.u_deriv(1, 0);
    const Field2D& uby = bf.u_deriv(0, 1);

    hd.G = Field2D(nx, ny, 0.0, "G");
    for (std::size_t ix = 0; ix < nx; ++ix)
        for (std::size_t iy = 0; iy < ny; ++iy) {
            const double psi = hd.psi.psi[iy];
            const double psi1 = hd.psi.psi_d1[iy];
            const double psi2 = hd.psi.psi_d2[iy];
            const double Ipsi = hd.psi.I_psi[iy];
            hd.G.at(ix, iy) = -ub.at(ix, iy) * psi * u0x[ix] - ubx.at(ix, iy) * psi * u0_of_x[ix] -
                              vb.at(ix, iy) * psi1 * u0_of_x[ix] -
                              uby.at(ix, iy) * u0x[ix] * Ipsi + psi2 * u0_of_x[ix];
        }
    hd.g1 = f + hd.G;
    hd.g1.label = "g1";
    hd.F_theta = differentiate(differentiate(hd.g1, Dir::x, 1, bf.sched, bf.grid), Dir::y, 1,
                               bf.sched, bf.grid);
    hd.F_theta.label = "F_theta";

    // x = 0 trace of the homogenized v = v_p - u0x I_psi (the divergence-
    // preserving lift; see the notes on the sign of the I_psi term).
    hd.V0_bar.resize(ny);
    for (std::size_t iy = 0; iy < ny; ++iy)
        hd.V0_bar[iy] = V0[iy] - u0x[0] * hd.psi.I_psi[iy];
    hd.f0 = divide_by_ubar(hd.V0_bar, bf.U0, bf.grid.nodes);
    hd.f0[0] = 0.0;
    return hd;
}

} // namespace

HomogenizedData homogenize(const BaseFlow& bf, const DataSpec& data) {
    const Profile u0 = data.sample_u0(bf.sched);
    Profile u0x(bf.nx()), u0xx(bf.nx());
    for (std::size_t ix = 0; ix < bf.nx(); ++ix) {
        u0x[ix] = data.u0.deriv(bf.sched.x_nodes[ix], 1);
        u0xx[ix] = data.u0.deriv(bf.sched.x_nodes[ix], 2);
    }
    return homogenize_core(bf, u0, u0x, u0xx, data.sample_V0(bf.grid),
                           data.sample_f(bf.sched, bf.grid));
}

HomogenizedData homogenize(const BaseFlow& bf, const Profile& u0_of_x, const Profile& V0,
                           const Field2D& f) {
    const Profile u0x = differentiate(u0_of_x, bf.sched.x_nodes, 1);
    const Profile u0xx = differentiate(u0_of_x, bf.sched.x_nodes, 2);
    return homogenize_core(bf, u0_of_x, u0x, u0xx, V0, f);
}

std::pair<double, double> corner_targets(const BaseFlow& bf, const DataSpec& data) {
    // t1 = d_x g1(0,0): the G-part vanishes identically at the corner
    // (every term carries a wall trace of u_bar, v_bar, psi', psi'' or I_psi).
    double t1 = 0.0, t2 = 0.0;
    for (const auto& term : data.f_terms) {
        t1 += term.ax.deriv(0.0, 1) * term.phi.value(0.0);
        t2 += term.ax.deriv(0.0, 1) * term.phi.deriv(0.0, 1);
    }
    // d_xy G(0,0) = -d_x [ u_bar_xy(x,0) u0(x) ]|_0 : G_y(x,0) = -u_bar_xy(x,0) u0(x).
    const Field2D& uxy = bf.u_deriv(1, 1);
    Profile wallshear_x(bf.nx());
    for (std::size_t ix = 0; ix < bf.nx(); ++ix) wallshear_x[ix] = uxy.at(ix, 0);
    const Profile d = differentiate(wallshear_x, bf.sched.x_nodes, 1);
    const double u0_0 = data.u0.value(0.0);
    const double u0x_0 = data.u0.deriv(0.0, 1);
    t2 += -(d[0] * u0_0 + wallshear_x[0] * u0x_0);
    return {t1, t2};
}

CompatibilityReport corner_compatibility(const HomogenizedData& hd, const BaseFlow& bf,
                                         int K, const DataSpec* data,
                                         const Profile* u0_trace, int kappa) {
    if (K < 1) throw ConfigError("corner_compatibility: K >= 1 required");
    CompatibilityReport rep;
    rep.order_k_residuals.resize(K, 0.0);

    double t1, t2;
    double v3, v4;
    if (data) {
        std::tie(t1, t2) = corner_targets(bf, *data);
        // V0_bar and V0 share wall derivatives up to order 4 (psi flat at 0).
        v3 = data->V0.deriv(0.0, 3);
        v4 = data->V0.deriv(0.0, 4);
    } else {
        const Field2D dg = differentiate(hd.g1, Dir::x, 1, bf.sched, bf.grid);
        t1 = dg.at(0, 0);
        t2 = hd.F_theta.at(0, 0);
        v3 = differentiate(hd.V0_bar, bf.grid.nodes, 3)[0];
        v4 = differentiate(hd.V0_bar, bf.grid.nodes, 4)[0];
    }
    rep.order_k_residuals[0] = std::abs(v3 - t1);
    if (K >= 2) rep.order_k_residuals[1] = std::abs(v4 - t2);

    if (K > 2) {
        // Orders 2k+1, 2k+2 from the reconstructed x-slices f_k.
        const int k_slices = (K - 1) / 2;
        const Profile zero(bf.ny(), 0.0);
        const auto slices =
            initial_x_slices(hd, bf, u0_trace ? *u0_trace : zero, kappa, k_slices);
        for (int order = 3; order <= K; ++order) {
            const int k = (order - 1) / 2;
            // v-slice_k = sum_j C(k,j) d_x^j u_bar(0,.) * int_0^y f_{k-j}
            Profile vslice(bf.ny(), 0.0);
            static const int binom[4][4] = {{1,0,0,0},{1,1,0,0},{1,2,1,0},{1,3,3,1}};
            for (int j = 0; j <= k; ++j) {
                const Field2D& dju = bf.u_deriv(j, 0);
                Profile qk = cumtrapz(slices[k - j], bf.grid.nodes);
                for (std::size_t iy = 0; iy < bf.ny(); ++iy)
                    vslice[iy] += binom[k][j] * dju.at(0, iy) * qk[iy];
            }
            Field2D gx = hd.g1;
            for (int j = 0; j < k + 1; ++j) gx = differentiate(gx, Dir::x, 1, bf.sched, bf.grid);
            if (order % 2 == 1) {
                const double lhs = differentiate(vslice, bf.grid.nodes, 3)[0];
                rep.order_k_residuals[order - 1] = std::abs(lhs - gx.at(0, 0));
            } else {
                const double lhs = differentiate(vslice, bf.grid.nodes, 4)[0];
                const Field2D gxy = differentiate(gx, Dir::y, 1, bf.sched, bf.grid);
                rep.order_k_residuals[order - 1] = std::abs(lhs - gxy.at(0, 0));
            }
        }
    }
    return rep;
}

Profile decay_weight_E(const BaseFlow& bf) {
    const Profile C = cumtrapz(bf.v0, bf.grid.nodes);
    const double C1 = lerp(bf.grid.nodes, C, 1.0);
    Profile E(bf.ny());
    for (std::size_t i = 0; i < bf.ny(); ++i) E[i] = std::exp(C1 - C[i]);
    return E;
}

double integral_condition_residual(const BaseFlow& bf, const Profile& V0, const Field2D& f,
                                   double u0_at_0) {
    const std::size_t ny = bf.ny();
    if (V0.size() != ny) throw ConfigError("integral_condition_residual: shape mismatch");
    const Profile E = decay_weight_E(bf);
    const Profile V0p = differentiate(V0, bf.grid.nodes, 1);
    const Profile U0p = differentiate(bf.U0, bf.grid.nodes, 1);
    Profile lhs(ny), rhs_f(ny);
    for (std::size_t i = 0; i < ny; ++i) {
        const double r = V0[i] * U0p[i] - bf.U0[i] * V0p[i];
        lhs[i] = bf.U0[i] * E[i] * r;
        rhs_f[i] = bf.U0[i] * E[i] * f.at(0, i);
    }
    return trapz(lhs, bf.grid.nodes) - U0p[0] * u0_at_0 - trapz(rhs_f, bf.grid.nodes);
}

std::vector<Profile> initial_x_slices(const HomogenizedData& hd, const BaseFlow& bf,
                                      const Profile& u0_trace, int kappa, int k_max) {
    if (k_max < 0 || k_max > 3)
        throw ConfigError("initial_x_slices: k_max must be in 0..3");
    const std::size_t ny = bf.ny();
    const auto& yn = bf.grid.nodes;

    std::vector<Profile> f(k_max + 1, Profile(ny, 0.0));
    // k = 0: d_y of the initial quotient.
    f[0] = differentiate(hd.f0, yn, 1);
    if (k_max == 0) return f;

    // q-slices and v-slices built alongside: q_k = int_0^y f_k, v_k = sum binom d^j u q_{k-j}.
    static const int binom[5][5] = {
        {1, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {1, 2, 1, 0, 0}, {1, 3, 3, 1, 0}, {1, 4, 6, 4, 1}};
    std::vector<Profile> qs(k_max + 1), vs(k_max + 1);
    auto build_q_v = [&](int k) {
        qs[k] = cumtrapz(f[k], yn);
        vs[k].assign(ny, 0.0);
        for (int j = 0; j <= k; ++j) {
            const Field2D& dju = bf.u_deriv(j, 0);
            for (std::size_t iy = 0; iy < ny; ++iy)
                vs[k][iy] += binom[k][j] * dju.at(0, iy) * qs[k - j][iy];
        }
    };
    build_q_v(0);

    // u-slices: u_0 = u0_trace, u_m = -d_x^{m-1} v_y |_0 = -(v_{m-1})_y.
    std::vector<Profile> us(k_max + 1);
    us[0] = u0_trace.empty() ? Profile(ny, 0.0) : u0_trace;

    Field2D gx = hd.g1;
    const Profile u2 = [&] {
        Profile p(ny);
        for (std::size_t i = 0; i < ny; ++i) p[i] = bf.U0[i] * bf.U0[i];
        return p;
    }();

    for (int k = 1; k <= k_max; ++k) {
        gx = differentiate(gx, Dir::x, 1, bf.sched, bf.grid); // d_x^k g1
        us[k] = differentiate(vs[k - 1], yn, 1);
        for (auto& v : us[k]) v = -v;

        // RHS of d_x^{k-1} of the once-integrated equation at x = 0:
        //   -d_x^k g1 + d_y^3 v_{k-1} + kappa * d_x^k {v_bar u_y - u v_bar_y}|_0
        Profile rhs(ny, 0.0);
        const Profile v3 = differentiate(vs[k - 1], yn, 3);
        for (std::size_t i = 0; i < ny; ++i) rhs[i] = -gx.at(0, i) + v3[i];
        if (kappa != 0) {
            for (int j = 0; j <= k; ++j) {
                const Field2D& vbj = bf.v_deriv(j, 0);
                const Field2D& vbyj = bf.v_deriv(j, 1);
                // d_x^{k-j} u_y |_0 and d_x^{k-j} u |_0
                Profile du, duy;
                const int m = k - j;
                if (m == 0) {
                    du = us[0];
                    duy = differentiate(us[0], yn, 1);
                } else {
                    duy = differentiate(vs[m - 1], yn, 2);
                    for (auto& v : duy) v = -v;
                    du = us[m];
                }
                for (std::size_t i = 0; i < ny; ++i)
                    rhs[i] += kappa * binom[k][j] *
                              (vbj.at(0, i) * duy[i] - du[i] * vbyj.at(0, i));
            }
        }
        // LHS Leibniz terms with j >= 1: sum C(k,j) d_x^j(u^2)|_0 f_{k-j}.
        for (int j = 1; j <= k; ++j) {
            // d_x^j (u_bar^2)|_0 via Leibniz on u*u
            Profile dju2(ny, 0.0);
            for (int m = 0; m <= j; ++m) {
                const Field2D& a = bf.u_deriv(m, 0);
                const Field2D& b = bf.u_deriv(j - m, 0);
                for (std::size_t i = 0; i < ny; ++i)
                    dju2[i] += binom[j][m] * a.at(0, i) * b.at(0, i);
            }
            for (std::size_t i = 0; i < ny; ++i) rhs[i] -= binom[k][j] * dju2[i] * f[k - j][i];
        }
        // f_k = rhs / u_bar^2 with the stable wall quotient.
        const Profile num_over_y2 = divide_by_y(rhs, yn, 2);
        const Profile u_over_y = divide_by_y(bf.U0, yn, 1);
        f[k].assign(ny, 0.0);
        for (std::size_t i = 0; i < ny; ++i)
            f[k][i] = num_over_y2[i] / (u_over_y[i] * u_over_y[i]);
        (void)u2;
        if (k < k_max) build_q_v(k);
    }
    return f;
}

} // namespace blkit
