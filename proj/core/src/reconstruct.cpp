#include "blkit/reconstruct.hpp"

#include "blkit/errors.hpp"
#include "blkit/fd.hpp"
#include "blkit/homogenize.hpp"
#include "blkit/interp.hpp"
#include "blkit/profiles.hpp"
#include "blkit/quad.hpp"

#include <cmath>

namespace blkit {

KernelBasis kernel_basis(const BaseFlow& bf) {
    const std::size_t ny = bf.ny();
    const auto& yn = bf.grid.nodes;
    for (std::size_t i = 1; i < ny; ++i)
        if (bf.U0[i] <= 0.0)
            throw NumericalError("kernel_basis: u_bar(0, y) must be positive for y > 0");

    KernelBasis kb;
    const Profile Cv = cumtrapz(bf.v0, yn);
    const double Cv1 = lerp(yn, Cv, 1.0);
    Profile g(ny);
    kb.E.resize(ny);
    for (std::size_t i = 0; i < ny; ++i) {
        g[i] = std::exp(Cv[i] - Cv1);
        kb.E[i] = 1.0 / g[i];
    }
    kb.g0 = g[0];
    kb.u1 = lerp(yn, bf.U0, 1.0);
    {
        const auto w = fd_weights(std::span<const double>(yn.data(), 3), 0.0, 1);
        kb.s0 = w[0] * bf.U0[0] + w[1] * bf.U0[1] + w[2] * bf.U0[2];
    }

    // a'(z) = u1^2 g / u_bar^2 = H(z) / z^2, H smooth with H(0) = u1^2 g0 / s0^2.
    const Profile u_over_y = divide_by_y(bf.U0, yn, 1);
    Profile H(ny);
    for (std::size_t i = 0; i < ny; ++i)
        H[i] = kb.u1 * kb.u1 * g[i] / (u_over_y[i] * u_over_y[i]);
    const double H0 = H[0];
    double H0p = 0.0; // H'(0) (vanishes in exact arithmetic; keep the fit value)
    {
        const auto w = fd_weights(std::span<const double>(yn.data(), 4), 0.0, 1);
        for (int k = 0; k < 4; ++k) H0p += w[k] * H[k];
    }
    // Regular part R(z) = (H - H0 - H0' z) / z^2 -> H''(0)/2 at the wall.
    Profile Hreg(ny);
    for (std::size_t i = 0; i < ny; ++i) Hreg[i] = H[i] - H0 - H0p * yn[i];
    const Profile R = divide_by_y(Hreg, yn, 2);
    const Profile Rint = cumtrapz(R, yn);
    const double Rint1 = lerp(yn, Rint, 1.0);

    kb.a_prime.resize(ny);
    kb.a.resize(ny);
    kb.u_tilde_s.resize(ny);
    // a' = H / y^2; the y = 0 entry is never used downstream.
    for (std::size_t i = 1; i < ny; ++i) kb.a_prime[i] = H[i] / (yn[i] * yn[i]);
    kb.a_prime[0] = 0.0;

    for (std::size_t i = 0; i < ny; ++i) {
        const double y = yn[i];
        if (i == 0) {
            kb.a[i] = 0.0; // formally -inf; the product u_bar * a is what matters
            kb.u_tilde_s[i] = -kb.s0 * H0;
        } else {
            kb.a[i] = (Rint[i] - Rint1) + H0 * (1.0 - 1.0 / y) + H0p * std::log(y);
            kb.u_tilde_s[i] = bf.U0[i] * kb.a[i];
        }
    }
    kb.us_at_wall = -kb.u1 * kb.u1 * kb.g0 / kb.s0;

    // Wronskian u_bar u_tilde_s_y - u_tilde_s u_bar_y: the u_bar_y terms cancel
    // algebraically, leaving u_bar^2 a' (the stable-division route to u1^2 g).
    kb.wronskian.resize(ny);
    kb.wronskian[0] = kb.u1 * kb.u1 * kb.g0;
    for (std::size_t i = 1; i < ny; ++i)
        kb.wronskian[i] = bf.U0[i] * bf.U0[i] * kb.a_prime[i];

    // u_R = u_tilde_s * int_0^y u_bar E - u_bar * int_0^y u_tilde_s E.
    Profile uE(ny), usE(ny);
    for (std::size_t i = 0; i < ny; ++i) {
        uE[i] = bf.U0[i] * kb.E[i];
        usE[i] = (i == 0 ? kb.u_tilde_s[0] : kb.u_tilde_s[i]) * kb.E[i];
    }
    const Profile P = cumtrapz(uE, yn);
    const Profile Q = cumtrapz(usE, yn);
    kb.u_R.resize(ny);
    for (std::size_t i = 0; i < ny; ++i)
        kb.u_R[i] = kb.u_tilde_s[i] * P[i] - bf.U0[i] * Q[i];
    return kb;
}

Profile apply_L_par(const BaseFlow& bf, const Profile& u) {
    const auto& yn = bf.grid.nodes;
    const Profile u1 = differentiate(u, yn, 1);
    const Profile u2 = differentiate(u, yn, 2);
    const Profile vby = differentiate(bf.v0, yn, 1);
    Profile out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        out[i] = -u2[i] + bf.v0[i] * u1[i] - u[i] * vby[i];
    return out;
}

Profile apply_L_par_y(const BaseFlow& bf, const Profile& u) {
    const auto& yn = bf.grid.nodes;
    const Profile u2 = differentiate(u, yn, 2);
    const Profile u3 = differentiate(u, yn, 3);
    const Profile vbyy = differentiate(bf.v0, yn, 2);
    Profile out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        out[i] = -u3[i] + bf.v0[i] * u2[i] - u[i] * vbyy[i];
    return out;
}

ReconstructedTrace reconstruct_u0(const BaseFlow& bf, const Profile& V0, const Field2D& f,
                                  double u0_at_0, double threshold) {
    const std::size_t ny = bf.ny();
    const auto& yn = bf.grid.nodes;
    const KernelBasis kb = kernel_basis(bf);

    // r = V0 u_bar_y - u_bar V0'.
    const Profile U0p = differentiate(bf.U0, yn, 1);
    const Profile V0p = differentiate(V0, yn, 1);
    Profile fr(ny);
    for (std::size_t i = 0; i < ny; ++i) {
        const double r = V0[i] * U0p[i] - bf.U0[i] * V0p[i];
        fr[i] = f.at(0, i) - r;
    }

    // Cancellation constant: int_0^inf u_bar E (f - r) must equal
    // -s0 u0(0) E(0); enforce it before using the stable split.
    Profile uEfr(ny);
    for (std::size_t i = 0; i < ny; ++i) uEfr[i] = bf.U0[i] * kb.E[i] * fr[i];
    const Profile Tall = cumtrapz(uEfr, yn);
    const double total = Tall.back();
    const double target = -kb.s0 * u0_at_0 * kb.E[0];
    double scale = std::abs(target);
    for (std::size_t i = 0; i < ny; ++i) scale = std::max(scale, std::abs(uEfr[i]));
    if (std::abs(total - target) > threshold * std::max(1.0, scale))
        throw CompatibilityError(
            "reconstruct_u0: integral condition violated (residual " +
            std::to_string(total - target) + "); reconstruction would grow at infinity");

    // u0 = u_tilde_s T(y)/u1^2 + u_bar S(y)/u1^2, T(y) = int_y^inf u_bar E (f-r),
    // using the exact total so the kernel mode cancels identically.
    Profile usEfr(ny);
    for (std::size_t i = 0; i < ny; ++i) usEfr[i] = kb.u_tilde_s[i] * kb.E[i] * fr[i];
    const Profile S = cumtrapz(usEfr, yn);

    ReconstructedTrace out;
    out.u0.resize(ny);
    const double inv_u1sq = 1.0 / (kb.u1 * kb.u1);
    for (std::size_t i = 0; i < ny; ++i) {
        const double T = target - Tall[i]; // int_y^inf with the balanced total
        out.u0[i] = inv_u1sq * (kb.u_tilde_s[i] * T + bf.U0[i] * S[i]);
    }
    // Subtract c u_bar so the trace vanishes at the truncation boundary.
    out.c_normalizer = out.u0.back() / bf.U0.back();
    for (std::size_t i = 0; i < ny; ++i) out.u0[i] -= out.c_normalizer * bf.U0[i];
    out.c1 = 0.0;

    const Profile Lu = apply_L_par(bf, out.u0);
    Profile resid(ny);
    for (std::size_t i = 0; i < ny; ++i) resid[i] = Lu[i] - fr[i];
    out.residual_ODE = l2_y(resid, bf.grid);
    return out;
}

std::map<std::string, double> asymptotics_report(const KernelBasis& kb, const BaseFlow& bf) {
    const auto& yn = bf.grid.nodes;
    const std::size_t ny = yn.size();
    std::map<std::string, double> rep;
    const double norm_const = kb.u1 * kb.u1 * kb.g0 / kb.s0;
    rep["norm_const"] = norm_const;
    rep["v_bar_inf"] = bf.v0.back();

    // Wall values in the canonical normalization.
    rep["normalized_us_wall"] = kb.u_tilde_s[0] / norm_const;
    // Slope over the first few nodes above y ~ 0.01.
    std::size_t i0 = 1;
    while (i0 + 1 < ny && yn[i0] < 0.01) ++i0;
    std::size_t i1 = i0;
    while (i1 + 1 < ny && yn[i1] < 0.1) ++i1;
    rep["normalized_usy_wall"] =
        (kb.u_tilde_s[i1] - kb.u_tilde_s[i0]) / (yn[i1] - yn[i0]) / norm_const;

    // J0 correction constant of the wall asymptotics.
    {
        Profile integrand(ny, 0.0);
        // J0 = int_0^1 (ghat - 1)/z^2 with ghat = H/H(0).
        const double Hwall = kb.u1 * kb.u1 * kb.g0 / (kb.s0 * kb.s0); // H(0)
        for (std::size_t i = 1; i < ny && yn[i] <= 1.0; ++i) {
            const double H = kb.a_prime[i] * yn[i] * yn[i];
            integrand[i] = (H / Hwall - 1.0) / (yn[i] * yn[i]);
        }
        std::size_t last = 1;
        while (last + 1 < ny && yn[last + 1] <= 1.0) ++last;
        rep["J0"] = trapz(std::span<const double>(integrand.data(), last + 1),
                          std::span<const double>(yn.data(), last + 1));
    }

    // Large-y exponential rate from u_tilde_s_y = u_bar_y a + u_bar a'.
    const Profile U0p = differentiate(bf.U0, yn, 1);
    Profile usy(ny, 0.0);
    for (std::size_t i = 1; i < ny; ++i)
        usy[i] = U0p[i] * kb.a[i] + bf.U0[i] * kb.a_prime[i];
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t nfit = 0;
    for (std::size_t i = 0; i < ny; ++i) {
        const double y = yn[i];
        if (y < 0.5 * bf.grid.y_max || y > 0.93 * bf.grid.y_max) continue;
        if (std::abs(usy[i]) < 1e-300) continue;
        const double ly = std::log(std::abs(usy[i]));
        sx += y; sy += ly; sxx += y * y; sxy += y * ly;
        ++nfit;
    }
    rep["rate_fit"] = nfit >= 2
                          ? (static_cast<double>(nfit) * sxy - sx * sy) /
                                (static_cast<double>(nfit) * sxx - sx * sx)
                          : 0.0;
    return rep;
}

} // namespace blkit
