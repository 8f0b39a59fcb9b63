#include "blkit/ldp.hpp"

#include "blkit/errors.hpp"
#include "blkit/fd.hpp"
#include "blkit/linsolve.hpp"
#include "blkit/profiles.hpp"
#include "blkit/quad.hpp"

#include <cmath>

namespace blkit {

const Field2D& LDPProblem::F_theta() const {
    if (!hd) throw DependencyError("LDPProblem: homogenized data missing");
    return hd->F_theta;
}

const Field2D& QuotientSolution::q_deriv(int a, int b) const {
    if (a == 0 && b == 0) return q;
    const auto key = std::make_pair(a, b);
    auto it = dq_cache.find(key);
    if (it != dq_cache.end()) return it->second;
    Field2D f = q;
    if (a > 0) f = differentiate(f, Dir::x, a, bf->sched, bf->grid);
    if (b > 0) f = differentiate(f, Dir::y, b, bf->sched, bf->grid);
    return dq_cache.emplace(key, std::move(f)).first->second;
}

const Field2D& QuotientSolution::v_deriv(int a, int b) const {
    if (a == 0 && b == 0) return v;
    const auto key = std::make_pair(a, b);
    auto it = dv_cache.find(key);
    if (it != dv_cache.end()) return it->second;
    Field2D f = v;
    if (a > 0) f = differentiate(f, Dir::x, a, bf->sched, bf->grid);
    if (b > 0) f = differentiate(f, Dir::y, b, bf->sched, bf->grid);
    return dv_cache.emplace(key, std::move(f)).first->second;
}

Field2D apply_ldp_operator(const Field2D& q, const LDPProblem& prob) {
    const BaseFlow& bf = *prob.bf;
    const MarchSchedule& sched = bf.sched;
    const Grid1D& grid = bf.grid;
    const std::size_t nx = bf.nx(), ny = bf.ny();

    // v = u_bar q and the theta-lifted coefficient.
    Field2D v(nx, ny, 0.0, "v");
    Field2D m(nx, ny); // u_theta^2 q_y
    const Field2D qy = differentiate(q, Dir::y, 1, sched, grid);
    for (std::size_t ix = 0; ix < nx; ++ix)
        for (std::size_t iy = 0; iy < ny; ++iy) {
            v.at(ix, iy) = bf.u_bar.at(ix, iy) * q.at(ix, iy);
            const double ut = bf.u_bar.at(ix, iy) + prob.theta;
            m.at(ix, iy) = ut * ut * qy.at(ix, iy);
        }

    Field2D out = differentiate(differentiate(m, Dir::x, 1, sched, grid), Dir::y, 1, sched, grid);
    for (auto& z : out.v) z = -z;

    const Field2D v4 = differentiate(v, Dir::y, 4, sched, grid);
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] += v4.v[i];

    if (prob.kappa != 0) {
        const Field2D vy = differentiate(v, Dir::y, 1, sched, grid);
        const Field2D vyy = differentiate(v, Dir::y, 2, sched, grid);
        const Field2D vyyy = differentiate(v, Dir::y, 3, sched, grid);
        const Field2D Ix_vy = accumulate_x(vy, sched);
        const Field2D Ix_vyyy = accumulate_x(vyyy, sched);

        const Field2D& vb = bf.v_bar;
        const Field2D& vbx = bf.v_deriv(1, 0);
        const Field2D& vbyy = bf.v_deriv(0, 2);
        const Field2D& vbxyy = bf.v_deriv(1, 2);

        for (std::size_t ix = 0; ix < nx; ++ix)
            for (std::size_t iy = 0; iy < ny; ++iy) {
                const double lam = vbxyy.at(ix, iy) * Ix_vy.at(ix, iy) +
                                   vbyy.at(ix, iy) * vy.at(ix, iy) -
                                   vbx.at(ix, iy) * Ix_vyyy.at(ix, iy) -
                                   vb.at(ix, iy) * vyyy.at(ix, iy);
                out.at(ix, iy) += prob.kappa * lam;
            }
        (void)vyy;
        if (!prob.u0_trace.empty()) {
            const Profile u0yy = differentiate(prob.u0_trace, grid.nodes, 2);
            for (std::size_t ix = 0; ix < nx; ++ix)
                for (std::size_t iy = 0; iy < ny; ++iy)
                    out.at(ix, iy) += prob.kappa * (-vbxyy.at(ix, iy) * prob.u0_trace[iy] +
                                                    vbx.at(ix, iy) * u0yy[iy]);
        }
    }
    out.label = "ldp_operator";
    return out;
}

namespace {

// Linear Crank-Nicolson march of the homogenized parabolic system
//   u_bar u_x + kappa (v_bar u_y - u v_bar_y) + v u_bar_y - u_yy = g1,
//   u_x + v_y = 0,  u(x,0) = u(x,ymax) = 0,  v(x,0) = 0,  u(0,.) = u^0.
// Interleaved (u, V) unknowns keep the system banded; q = v/u_bar is
// recovered per slice through the near-wall Taylor device (q0 := v/y).
// Taking d_x d_y of this system gives exactly the kappa-LDP, so the march is
// an independent route to the same quotient.
Field2D march_fd(const LDPProblem& prob, FdFarField far) {
    const BaseFlow& bf = *prob.bf;
    const HomogenizedData& hd = *prob.hd;
    const MarchSchedule& sched = bf.sched;
    const Grid1D& grid = bf.grid;
    const auto& yn = grid.nodes;
    const std::size_t nx = bf.nx(), ny = bf.ny();
    const int kap = prob.kappa;

    const StencilOp D1 = make_stencil(yn, 1);
    const StencilOp D2 = make_stencil(yn, 2);

    const Field2D& uby = bf.u_deriv(0, 1);
    const Field2D& vby = bf.v_deriv(0, 1);
    const Field2D& vb = bf.v_bar;

    Field2D u(nx, ny, 0.0, "u_hom");
    Field2D v(nx, ny, 0.0, "v_hom");
    const Profile u0 = prob.u0_trace.empty() ? Profile(ny, 0.0) : prob.u0_trace;
    for (std::size_t i = 0; i < ny; ++i) {
        u.at(0, i) = u0[i];
        v.at(0, i) = hd.V0_bar[i];
    }
    u.at(0, 0) = 0.0;
    v.at(0, 0) = 0.0;

    const std::size_t N2 = 2 * ny;
    const int halfw = std::max(D1.npts, D2.npts);
    const int kl = 2 * halfw + 2, ku = kl;

    Profile u_prev = u.x_slice(0);
    Profile u_prev2; // two stations back
    for (std::size_t k = 0; k + 1 < nx; ++k) {
        const double dx = sched.dx(k);
        // Midpoint coefficients.
        Profile cub(ny), cuy(ny), cvb(ny), cvby(ny), g1m(ny);
        for (std::size_t i = 0; i < ny; ++i) {
            cub[i] = 0.5 * (bf.u_bar.at(k, i) + bf.u_bar.at(k + 1, i));
            cuy[i] = 0.5 * (uby.at(k, i) + uby.at(k + 1, i));
            cvb[i] = 0.5 * (vb.at(k, i) + vb.at(k + 1, i));
            cvby[i] = 0.5 * (vby.at(k, i) + vby.at(k + 1, i));
            g1m[i] = 0.5 * (hd.g1.at(k, i) + hd.g1.at(k + 1, i));
        }
        // Unknowns z[2i] = u_next_i, z[2i+1] = V_i (midpoint v).
        BandedMatrix J(N2, kl, ku);
        std::vector<double> rhs(N2, 0.0);
        J.at(0, 0) = 1.0;                     // u(x,0) = 0
        J.at(1, 1) = 1.0;                     // V(x,0) = 0
        if (far == FdFarField::half_line)
            J.at(2 * (ny - 1), 2 * (ny - 1)) = 1.0; // u(x,ymax) = 0
        else
            J.at(2 * (ny - 1), 2 * (ny - 1) + 1) = 1.0; // v(x,ymax) = 0
        for (std::size_t i = 1; i + 1 < ny; ++i) {
            const std::size_t row = 2 * i;
            // u_bar (u_next - u_prev)/dx  + [kappa v_bar D1 - kappa v_bar_y
            //   - D2](um) + u_bar_y V_i = g1m, um = (u_prev+u_next)/2
            J.at(row, 2 * i) += cub[i] / dx;
            double r = cub[i] / dx * u_prev[i] + g1m[i];
            if (kap != 0) {
                J.at(row, 2 * i) += -0.5 * kap * cvby[i];
                r += 0.5 * kap * cvby[i] * u_prev[i];
            }
            for (int m = 0; m < D1.npts; ++m) {
                const std::size_t col = D1.first[i] + m;
                const double w = D1.weights[i * D1.npts + m];
                if (kap != 0) {
                    J.at(row, 2 * col) += 0.5 * kap * cvb[i] * w;
                    r -= 0.5 * kap * cvb[i] * w * u_prev[col];
                }
            }
            for (int m = 0; m < D2.npts; ++m) {
                const std::size_t col = D2.first[i] + m;
                const double w = D2.weights[i * D2.npts + m];
                J.at(row, 2 * col) -= 0.5 * w;
                r += 0.5 * w * u_prev[col];
            }
            J.at(row, 2 * i + 1) += cuy[i];
            rhs[row] = r;
        }
        for (std::size_t i = 1; i < ny; ++i) {
            const std::size_t row = 2 * i + 1;
            const double h = yn[i] - yn[i - 1];
            J.at(row, 2 * i + 1) = 1.0;
            J.at(row, 2 * i - 1) = -1.0;
            J.at(row, 2 * i) = 0.5 * h / dx;
            J.at(row, 2 * (i - 1)) = 0.5 * h / dx;
            rhs[row] = 0.5 * h / dx * (u_prev[i] + u_prev[i - 1]);
        }
        const std::vector<double> z = solve_linear(std::move(J), std::move(rhs));
        Profile u_next(ny), v_mid(ny);
        for (std::size_t i = 0; i < ny; ++i) {
            u_next[i] = z[2 * i];
            v_mid[i] = z[2 * i + 1];
        }
        u_next.front() = 0.0;
        if (far == FdFarField::half_line) u_next.back() = 0.0;
        // v at the new station from the divergence constraint with a local
        // one-sided u_x (no node-to-node recurrence, which would ring).
        if (k == 0) {
            for (std::size_t i = 0; i < ny; ++i)
                v.at(1, i) = 2.0 * v_mid[i] - v.at(0, i);
        } else {
            Profile uxn(ny);
            for (std::size_t i = 0; i < ny; ++i)
                uxn[i] = (3.0 * u_next[i] - 4.0 * u_prev[i] + u_prev2[i]) / (2.0 * dx);
            const Profile vi = cumtrapz(uxn, yn);
            for (std::size_t i = 0; i < ny; ++i) v.at(k + 1, i) = -vi[i];
        }
        std::copy(u_next.begin(), u_next.end(), u.row(k + 1));
        u_prev2 = u_prev;
        u_prev = std::move(u_next);
    }

    // q = v / u_bar with the stable wall device.
    Field2D q(nx, ny, 0.0, "q");
    for (std::size_t ix = 0; ix < nx; ++ix) {
        Profile urow(ny);
        for (std::size_t i = 0; i < ny; ++i) urow[i] = bf.u_bar.at(ix, i);
        const Profile qrow = divide_by_ubar(v.x_slice(ix), urow, yn);
        for (std::size_t i = 0; i < ny; ++i) q.at(ix, i) = qrow[i];
        q.at(ix, 0) = 0.0;
    }
    return q;
}

QuotientSolution finish_solution(const LDPProblem& prob, Field2D q, LdpMethod method,
                                 double theta_used) {
    const BaseFlow& bf = *prob.bf;
    QuotientSolution qs;
    qs.bf = prob.bf;
    qs.method = method;
    qs.theta_used = theta_used;
    qs.q = std::move(q);
    qs.v = Field2D(bf.nx(), bf.ny(), 0.0, "v");
    for (std::size_t ix = 0; ix < bf.nx(); ++ix)
        for (std::size_t iy = 0; iy < bf.ny(); ++iy)
            qs.v.at(ix, iy) = bf.u_bar.at(ix, iy) * qs.q.at(ix, iy);

    // Residual of the fourth-order form on an interior window (the operator
    // evaluation needs interior stencils in both directions).
    LDPProblem p0 = prob;
    p0.theta = 0.0;
    const Field2D op = apply_ldp_operator(qs.q, p0);
    const Field2D& F = prob.F_theta();
    double num = 0.0, den = 0.0;
    const std::size_t nx = bf.nx(), ny = bf.ny();
    for (std::size_t ix = nx / 8; ix < nx - nx / 8; ++ix)
        for (std::size_t iy = 2; iy + 2 < ny; ++iy) {
            const double d = op.at(ix, iy) - F.at(ix, iy);
            num += d * d;
            den += F.at(ix, iy) * F.at(ix, iy);
        }
    qs.residual = den > 0 ? std::sqrt(num / den) : std::sqrt(num);
    return qs;
}

} // namespace

QuotientSolution solve_ldp(const LDPProblem& prob, LdpMethod method, const LdpOptions& opts) {
    if (!prob.bf || !prob.hd) throw DependencyError("solve_ldp: problem not assembled");
    const BaseFlow& bf = *prob.bf;

    if (method == LdpMethod::finite_difference) {
        LDPProblem p = prob;
        p.theta = 0.0;
        Field2D q = march_fd(p, opts.fd_far_field);
        return finish_solution(prob, std::move(q), method, 0.0);
    }

    // Galerkin path: decreasing theta schedule + linear Richardson to 0.
    const auto& ths = opts.theta_schedule;
    if (ths.size() < 2) throw ConfigError("solve_ldp: theta schedule needs >= 2 values");
    for (std::size_t i = 1; i < ths.size(); ++i)
        if (ths[i] >= ths[i - 1] || ths[i] <= 0.0)
            throw ConfigError("solve_ldp: theta schedule must be positive decreasing");

    Field2D q_prev, q_last;
    double th_prev = 0.0, th_last = 0.0;
    for (std::size_t s = 0; s < ths.size(); ++s) {
        LDPProblem p = prob;
        p.theta = ths[s];
        const GalerkinSystem sys = build_galerkin(p, opts.n_modes,
                                                  opts.box_N > 0 ? opts.box_N : bf.grid.y_max);
        const std::vector<double> b0 = project_sine(prob.hd->f0, bf.grid, sys);
        const GalerkinTrajectory traj = march_galerkin(sys, b0, bf.sched, opts.step_tol);
        Field2D q = synthesize(sys, traj, bf.sched);
        q_prev = std::move(q_last);
        th_prev = th_last;
        q_last = std::move(q);
        th_last = ths[s];
    }
    // Linear-in-theta extrapolation: q0 = (th_prev q_last - th_last q_prev)/(th_prev - th_last).
    Field2D q0(bf.nx(), bf.ny(), 0.0, "q");
    for (std::size_t i = 0; i < q0.v.size(); ++i)
        q0.v[i] = (th_prev * q_last.v[i] - th_last * q_prev.v[i]) / (th_prev - th_last);

    QuotientSolution qs = finish_solution(prob, std::move(q0), LdpMethod::galerkin, ths.back());
    const double diff = rel_l2(q_last, q_prev, bf.sched, bf.grid);
    qs.continuation_warning = diff > opts.continuation_warn;
    return qs;
}

std::pair<Field2D, Field2D> recover_velocity(const QuotientSolution& qs,
                                             const Profile& u0_trace,
                                             const HomogenizedData& hd,
                                             double* div_residual) {
    const BaseFlow& bf = *qs.bf;
    const std::size_t nx = bf.nx(), ny = bf.ny();
    const Field2D vy = differentiate(qs.v, Dir::y, 1, bf.sched, bf.grid);
    const Field2D Ixvy = accumulate_x(vy, bf.sched);

    Field2D up(nx, ny, 0.0, "u_p"), vp(nx, ny, 0.0, "v_p");
    for (std::size_t ix = 0; ix < nx; ++ix)
        for (std::size_t iy = 0; iy < ny; ++iy) {
            const double u = (u0_trace.empty() ? 0.0 : u0_trace[iy]) - Ixvy.at(ix, iy);
            up.at(ix, iy) = u + hd.u0_of_x[ix] * hd.psi.psi[iy];
            vp.at(ix, iy) = qs.v.at(ix, iy) + hd.u0x_of_x[ix] * hd.psi.I_psi[iy];
        }
    if (div_residual) {
        const Field2D upx = differentiate(up, Dir::x, 1, bf.sched, bf.grid);
        const Field2D vpy = differentiate(vp, Dir::y, 1, bf.sched, bf.grid);
        double worst = 0.0;
        for (std::size_t ix = 1; ix + 1 < nx; ++ix)
            for (std::size_t iy = 0; iy < ny; ++iy)
                worst = std::max(worst, std::abs(upx.at(ix, iy) + vpy.at(ix, iy)));
        *div_residual = worst;
    }
    return {std::move(up), std::move(vp)};
}

} // namespace blkit
