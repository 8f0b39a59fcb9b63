#include "blkit/baseflow.hpp"

#include "blkit/errors.hpp"
#include "blkit/fd.hpp"
#include "blkit/interp.hpp"
#include "blkit/linsolve.hpp"
#include "blkit/quad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace blkit {

namespace {

void check_initial_conditions(const InitialProfile& U0, const Grid1D& grid) {
    if (U0.deriv(0.0, 1) <= 0.0)
        throw ConfigError("solve_prandtl: U0'(0) must be positive");
    if (std::abs(U0.deriv(0.0, 2)) > 1e-8 || std::abs(U0.deriv(0.0, 3)) > 1e-8)
        throw ConfigError("solve_prandtl: U0''(0) = U0'''(0) = 0 required");
    if (std::abs(U0.value(grid.y_max) - 1.0) > 1e-6)
        throw ConfigError("solve_prandtl: U0(y_max) must match the Euler constant 1");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (U0.value(grid.nodes[i]) <= 0.0)
            throw ConfigError("solve_prandtl: U0 must be positive for y > 0");
}

// v_bar(0, .) from v' = (v U0' - U0'') / U0, v(0) = 0 (RK4 on a fine
// auxiliary grid; the integrand limit at the wall is 0 by no-slip).
Profile initial_v_ode(const InitialProfile& U0, const Grid1D& grid) {
    const int n_aux = 16001;
    const double h = grid.y_max / (n_aux - 1);
    std::vector<double> ys(n_aux), vs(n_aux, 0.0);
    for (int i = 0; i < n_aux; ++i) ys[i] = i * h;
    auto rhs = [&](double y, double v) -> double {
        if (y < 1e-12) return 0.0;
        return (v * U0.deriv(y, 1) - U0.deriv(y, 2)) / U0.value(y);
    };
    for (int i = 0; i + 1 < n_aux; ++i) {
        const double y = ys[i], v = vs[i];
        const double k1 = rhs(y, v);
        const double k2 = rhs(y + h / 2, v + h * k1 / 2);
        const double k3 = rhs(y + h / 2, v + h * k2 / 2);
        const double k4 = rhs(y + h, v + h * k3);
        vs[i + 1] = v + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0;
    }
    Profile out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = lerp(ys, vs, grid.nodes[i]);
    return out;
}

} // namespace

const Field2D& BaseFlow::u_deriv(int a, int b) const {
    if (a == 0 && b == 0) return u_bar;
    const auto key = std::make_pair(a, b);
    auto it = du_cache.find(key);
    if (it != du_cache.end()) return it->second;
    Field2D f = u_bar;
    if (a > 0) f = differentiate(f, Dir::x, a, sched, grid);
    if (b > 0) f = differentiate(f, Dir::y, b, sched, grid);
    return du_cache.emplace(key, std::move(f)).first->second;
}

const Field2D& BaseFlow::v_deriv(int a, int b) const {
    if (a == 0 && b == 0) return v_bar;
    const auto key = std::make_pair(a, b);
    auto it = dv_cache.find(key);
    if (it != dv_cache.end()) return it->second;
    Field2D f = v_bar;
    if (a > 0) f = differentiate(f, Dir::x, a, sched, grid);
    if (b > 0) f = differentiate(f, Dir::y, b, sched, grid);
    return dv_cache.emplace(key, std::move(f)).first->second;
}

double BaseFlow::wall_shear(std::size_t ix) const { return u_deriv(0, 1).at(ix, 0); }

Profile BaseFlow::wall_shear_profile() const {
    const Field2D& uy = u_deriv(0, 1);
    Profile out(nx());
    for (std::size_t ix = 0; ix < nx(); ++ix) out[ix] = uy.at(ix, 0);
    return out;
}

namespace {

// One Crank-Nicolson step: solve for u_next given u_prev. Interior residual
//   R_i = um ux + vm (D1 um) - (D2 um),  um = (u_prev+u_next)/2,
//   ux = (u_next-u_prev)/dx,  vm = -int_0^y ux.
struct StepWorkspace {
    StencilOp d1, d2;
    std::vector<double> trapw_prefix; // trapezoid weights wrt node index
};

Profile newton_step(const Profile& u_prev, double dx, const Grid1D& grid,
                    const StepWorkspace& ws, const PrandtlOptions& opts,
                    std::size_t x_index, double* residual_out) {
    const std::size_t n = grid.size();
    Profile u_next = u_prev;
    u_next.front() = 0.0;
    u_next.back() = 1.0;

    Profile um(n), ux(n), vm(n), d1um(n), d2um(n), R(n, 0.0);
    const auto& yn = grid.nodes;

    auto assemble = [&](Profile& res) {
        for (std::size_t i = 0; i < n; ++i) {
            um[i] = 0.5 * (u_prev[i] + u_next[i]);
            ux[i] = (u_next[i] - u_prev[i]) / dx;
        }
        vm = cumtrapz(ux, yn);
        for (auto& v : vm) v = -v;
        ws.d1.apply(um.data(), d1um.data());
        ws.d2.apply(um.data(), d2um.data());
        for (std::size_t i = 1; i + 1 < n; ++i)
            res[i] = um[i] * ux[i] + vm[i] * d1um[i] - d2um[i];
        res[0] = u_next[0];
        res[n - 1] = u_next[n - 1] - 1.0;
    };

    // Exact Newton on the (u, v) pair with interleaved unknowns: the
    // trapezoid recurrence for v is local, so the full Jacobian is banded.
    //   z[2i] = u_i, z[2i+1] = V_i (midpoint v at node i)
    // Rows: 2i = momentum at i (Dirichlet at the ends), 2i+1 = v-recurrence.
    const int halfw = std::max(ws.d1.npts, ws.d2.npts);
    const int kl = 2 * halfw + 2;
    const int ku = kl;
    const std::size_t N = 2 * n;

    double prev_rmax = std::numeric_limits<double>::max();
    for (int it = 0; it < opts.newton_max; ++it) {
        assemble(R);
        double rmax = 0.0;
        for (double r : R) rmax = std::max(rmax, std::abs(r));
        // Accept at tolerance, or at roundoff stagnation below the 1e-8
        // residual contract (the stencil scale amplifies machine epsilon on
        // fine grids).
        const bool stagnated = it >= 2 && rmax >= 0.5 * prev_rmax && rmax <= 1e-8;
        if (rmax <= opts.newton_tol || stagnated) {
            if (residual_out) *residual_out = rmax;
            return u_next;
        }
        prev_rmax = rmax;

        BandedMatrix J(N, kl, ku);
        std::vector<double> rhs(N, 0.0);
        J.at(0, 0) = 1.0;             // u_0 = 0
        rhs[0] = -R[0];
        J.at(1, 1) = 1.0;             // V_0 = 0
        J.at(2 * (n - 1), 2 * (n - 1)) = 1.0; // u_{n-1} = 1
        rhs[2 * (n - 1)] = -R[n - 1];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const std::size_t row = 2 * i;
            J.at(row, 2 * i) += 0.5 * ux[i] + um[i] / dx;
            J.at(row, 2 * i + 1) += d1um[i];
            const int f1 = ws.d1.first[i];
            for (int k = 0; k < ws.d1.npts; ++k)
                J.at(row, 2 * (f1 + k)) += 0.5 * vm[i] * ws.d1.weights[i * ws.d1.npts + k];
            const int f2 = ws.d2.first[i];
            for (int k = 0; k < ws.d2.npts; ++k)
                J.at(row, 2 * (f2 + k)) -= 0.5 * ws.d2.weights[i * ws.d2.npts + k];
            rhs[row] = -R[i];
        }
        for (std::size_t i = 1; i < n; ++i) {
            // V_i - V_{i-1} + (h/2)(ux_i + ux_{i-1}) = 0, d ux_j/d u_j = 1/dx.
            const std::size_t row = 2 * i + 1;
            const double h = yn[i] - yn[i - 1];
            J.at(row, 2 * i + 1) = 1.0;
            J.at(row, 2 * i - 1) = -1.0;
            J.at(row, 2 * i) = 0.5 * h / dx;
            J.at(row, 2 * (i - 1)) = 0.5 * h / dx;
            // current vm satisfies the recurrence exactly: rhs stays 0
        }
        const auto delta = solve_linear(std::move(J), std::move(rhs));
        for (std::size_t i = 0; i < n; ++i) u_next[i] += delta[2 * i];
        u_next.front() = 0.0;
        u_next.back() = 1.0;
    }
    throw MarchingError("solve_prandtl: Newton failed to converge at x-node " +
                            std::to_string(x_index),
                        x_index);
}

} // namespace

BaseFlow solve_prandtl(const InitialProfile& U0, double L, const MarchSchedule& sched,
                       const Grid1D& grid, const PrandtlOptions& opts) {
    if (L <= 0.0 || L > 1.0) throw ConfigError("solve_prandtl: need 0 < L <= 1");
    if (std::abs(sched.length - L) > 1e-12)
        throw ConfigError("solve_prandtl: schedule length does not match L");
    check_initial_conditions(U0, grid);

    BaseFlow bf;
    bf.sched = sched;
    bf.grid = grid;
    bf.L = L;
    bf.U0 = U0.sample(grid);
    bf.U0.front() = 0.0;

    const std::size_t nx = sched.size(), ny = grid.size();
    bf.u_bar = Field2D(nx, ny, 0.0, "u_bar");
    std::copy(bf.U0.begin(), bf.U0.end(), bf.u_bar.row(0));

    StepWorkspace ws{make_stencil(grid.nodes, 1), make_stencil(grid.nodes, 2), {}};

    double worst = 0.0;
    Profile u_prev = bf.U0;
    for (std::size_t k = 0; k + 1 < nx; ++k) {
        double res = 0.0;
        Profile u_next = newton_step(u_prev, sched.dx(k), grid, ws, opts, k + 1, &res);
        worst = std::max(worst, res);
        // Positive wall shear must persist (Oleinik lower bound).
        const auto w1 = fd_weights(std::span<const double>(grid.nodes.data(), 3), 0.0, 1);
        const double shear = w1[0] * u_next[0] + w1[1] * u_next[1] + w1[2] * u_next[2];
        if (opts.check_oleinik && shear <= 0.0)
            throw OleinikViolation("solve_prandtl: wall shear lost positivity at x-node " +
                                   std::to_string(k + 1));
        std::copy(u_next.begin(), u_next.end(), bf.u_bar.row(k + 1));
        u_prev = std::move(u_next);
    }
    bf.march_residual = worst;

    // v from the divergence constraint applied to the full field.
    const Field2D ux_field = differentiate(bf.u_bar, Dir::x, 1, sched, grid);
    bf.v_bar = quad_y(ux_field, grid, QuadMode::from_0_to_y);
    for (auto& v : bf.v_bar.v) v = -v;
    bf.v_bar.label = "v_bar";

    // Equation-based x = 0 companions.
    bf.v0 = initial_v_ode(U0, grid);
    bf.ux0.assign(ny, 0.0);
    for (std::size_t i = 1; i < ny; ++i) {
        const double y = grid.nodes[i];
        bf.ux0[i] = (U0.deriv(y, 2) - bf.v0[i] * U0.deriv(y, 1)) / U0.value(y);
    }
    bf.initial = std::shared_ptr<const InitialProfile>();
    return bf;
}

BaseFlow solve_prandtl(const Profile& U0_samples, double L, const MarchSchedule& sched,
                       const Grid1D& grid, const PrandtlOptions& opts) {
    auto prof = make_tabulated_profile(U0_samples, grid);
    return solve_prandtl(*prof, L, sched, grid, opts);
}

double von_mises_residual(const BaseFlow& bf) {
    if (bf.nx() < 2) return 0.0;
    const std::size_t nx = bf.nx(), ny = bf.ny();

    // Streamfunction per x-slice.
    Field2D psi(nx, ny);
    double psi_cap = std::numeric_limits<double>::max();
    for (std::size_t ix = 0; ix < nx; ++ix) {
        Profile row(bf.u_bar.row(ix), bf.u_bar.row(ix) + ny);
        Profile c = cumtrapz(row, bf.grid.nodes);
        std::copy(c.begin(), c.end(), psi.row(ix));
        psi_cap = std::min(psi_cap, c.back());
    }

    // Common psi-grid, clear of the degenerate wall corner and the cap.
    const std::size_t np = 2 * ny;
    std::vector<double> pg(np);
    const double plo = 0.08 * psi_cap, phi = 0.9 * psi_cap;
    for (std::size_t i = 0; i < np; ++i)
        pg[i] = plo + (phi - plo) * static_cast<double>(i) / static_cast<double>(np - 1);

    Field2D ut(nx, np);
    for (std::size_t ix = 0; ix < nx; ++ix) {
        CubicSpline s(std::span<const double>(psi.row(ix), ny),
                      std::span<const double>(bf.u_bar.row(ix), ny));
        for (std::size_t i = 0; i < np; ++i) ut.at(ix, i) = s(pg[i]);
    }

    // Residual d_x u~ - d_psi_psi (u~^2 / 2) on an interior region.
    const StencilOp dx_op = make_stencil(bf.sched.x_nodes, 1);
    const StencilOp dpp = make_stencil(pg, 2);
    Field2D w(nx, np);
    for (std::size_t i = 0; i < ut.v.size(); ++i) w.v[i] = 0.5 * ut.v[i] * ut.v[i];

    double worst = 0.0;
    Profile col(nx), dcol(nx), row2(np);
    Field2D dxu(nx, np);
    for (std::size_t i = 0; i < np; ++i) {
        for (std::size_t ix = 0; ix < nx; ++ix) col[ix] = ut.at(ix, i);
        dx_op.apply(col.data(), dcol.data());
        for (std::size_t ix = 0; ix < nx; ++ix) dxu.at(ix, i) = dcol[ix];
    }
    const std::size_t x_lo = nx / 10, x_hi = nx - 1 - nx / 10;
    const std::size_t p_lo = np / 10, p_hi = np - 1 - np / 10;
    for (std::size_t ix = x_lo; ix <= x_hi; ++ix) {
        dpp.apply(w.row(ix), row2.data());
        for (std::size_t i = p_lo; i <= p_hi; ++i)
            worst = std::max(worst, std::abs(dxu.at(ix, i) - row2[i]));
    }
    return worst;
}

OleinikReport oleinik_report(const BaseFlow& bf) {
    const Field2D& uy = bf.u_deriv(0, 1);
    const std::size_t nx = bf.nx(), ny = bf.ny();

    double wall_min = std::numeric_limits<double>::max();
    for (std::size_t ix = 0; ix < nx; ++ix) wall_min = std::min(wall_min, uy.at(ix, 0));
    if (wall_min <= 0.0) throw OleinikViolation("oleinik_report: nonpositive wall shear");

    // y0: largest node below which u_y stays above half its wall value at every x.
    std::size_t iy0 = 0;
    for (std::size_t iy = 0; iy < ny; ++iy) {
        bool ok = true;
        for (std::size_t ix = 0; ix < nx && ok; ++ix)
            ok = uy.at(ix, iy) >= 0.5 * uy.at(ix, 0);
        if (!ok) break;
        iy0 = iy;
    }
    OleinikReport rep;
    rep.y0 = bf.grid.nodes[iy0];

    double m0 = std::numeric_limits<double>::max();
    for (std::size_t ix = 0; ix < nx; ++ix)
        for (std::size_t iy = 0; iy <= iy0; ++iy) {
            const double v = uy.at(ix, iy);
            if (v <= 0.0)
                throw OleinikViolation("oleinik_report: u_y <= 0 inside the scan region");
            m0 = std::min(m0, v);
        }
    rep.m0 = m0;

    auto sup_on_region = [&](const Field2D& f) {
        double m = 0.0;
        for (std::size_t ix = 0; ix < nx; ++ix)
            for (std::size_t iy = 0; iy <= iy0; ++iy) m = std::max(m, std::abs(f.at(ix, iy)));
        return m;
    };
    rep.sup_bounds["u"] = sup_on_region(bf.u_bar);
    rep.sup_bounds["v"] = sup_on_region(bf.v_bar);
    rep.sup_bounds["u_y"] = sup_on_region(uy);
    rep.sup_bounds["u_yy"] = sup_on_region(bf.u_deriv(0, 2));
    rep.sup_bounds["u_x"] = sup_on_region(bf.u_deriv(1, 0));
    return rep;
}

BaseFlow synthetic_base_flow(const InitialProfile& U, const PolyExp& W,
                             const MarchSchedule& sched, const Grid1D& grid) {
    if (std::abs(W.value(0.0)) > 1e-12)
        throw ConfigError("synthetic_base_flow: W(0) must vanish (no-slip)");
    BaseFlow bf;
    bf.sched = sched;
    bf.grid = grid;
    bf.L = sched.length;
    const std::size_t nx = sched.size(), ny = grid.size();
    bf.u_bar = Field2D(nx, ny, 0.0, "u_bar");
    bf.v_bar = Field2D(nx, ny, 0.0, "v_bar");
    const Profile Ws = W.sample(grid.nodes);
    const Profile Wint = cumtrapz(Ws, grid.nodes);
    for (std::size_t ix = 0; ix < nx; ++ix) {
        const double x = sched.x_nodes[ix];
        for (std::size_t iy = 0; iy < ny; ++iy) {
            const double y = grid.nodes[iy];
            bf.u_bar.at(ix, iy) = U.value(y) + x * Ws[iy];
            bf.v_bar.at(ix, iy) = -Wint[iy];
        }
    }
    bf.U0 = U.sample(grid);
    bf.v0 = Profile(ny, 0.0);
    for (std::size_t iy = 0; iy < ny; ++iy) bf.v0[iy] = -Wint[iy];
    bf.ux0 = Ws;
    // Analytic caches.
    for (int a = 0; a <= 3; ++a)
        for (int b = 0; b <= 4; ++b) {
            if (a == 0 && b == 0) continue;
            Field2D f(nx, ny);
            for (std::size_t ix = 0; ix < nx; ++ix) {
                const double x = sched.x_nodes[ix];
                for (std::size_t iy = 0; iy < ny; ++iy) {
                    const double y = grid.nodes[iy];
                    double val = 0.0;
                    if (a == 0)
                        val = (b == 0 ? U.value(y) : U.deriv(y, b)) + x * W.deriv(y, b);
                    else if (a == 1)
                        val = b == 0 ? W.value(y) : W.deriv(y, b);
                    f.at(ix, iy) = val;
                }
            }
            bf.du_cache.emplace(std::make_pair(a, b), std::move(f));
        }
    for (int a = 0; a <= 3; ++a)
        for (int b = 0; b <= 3; ++b) {
            if (a == 0 && b == 0) continue;
            Field2D f(nx, ny);
            if (a == 0) {
                for (std::size_t ix = 0; ix < nx; ++ix)
                    for (std::size_t iy = 0; iy < ny; ++iy) {
                        const double y = grid.nodes[iy];
                        f.at(ix, iy) = b == 1 ? -Ws[iy] : -W.deriv(y, b - 1);
                    }
            }
            bf.dv_cache.emplace(std::make_pair(a, b), std::move(f));
        }
    return bf;
}

} // namespace blkit
