#include "blkit/compat_data.hpp"

#include "blkit/fd.hpp"
#include "blkit/quad.hpp"

namespace blkit {

DataSpec make_compatible_data(const BaseFlow& bf, const CompatFamily& fam) {
    DataSpec data;
    data.u0 = PolyExp::monomial(fam.sigma, 1, 0.0);
    data.f_terms.push_back({PolyExp::monomial(fam.amp_f, 1, 0.0),
                            PolyExp::monomial(1.0, 3, fam.r1)});

    // Corner conditions. Order zero comes from the divergence constraint at
    // the corner: u_px(0,0) + V0'(0) = 0, so V0'(0) = -u0'(0). Orders 1-2
    // are the standard pair with targets (t1, t2); V0 does not enter the
    // targets themselves. Wall-derivative table of the basis elements
    // phi0 = y e^{-r1 y}, phi3 = y^3 e^{-r1 y}, phi4 = y^4 e^{-r1 y}:
    //   phi0: d3 = 3 r1^2, d4 = -4 r1^3
    //   phi3: d3 = 6,      d4 = -24 r1
    //   phi4: d3 = 0,      d4 = 24
    const auto [t1, t2] = corner_targets(bf, data);
    const double r1 = fam.r1;
    const double c0 = -data.u0.deriv(0.0, 1);
    const double c3 = (t1 - 3.0 * r1 * r1 * c0) / 6.0;
    const double c4 = (t2 + 24.0 * r1 * c3 + 4.0 * r1 * r1 * r1 * c0) / 24.0;

    const PolyExp phi0 = PolyExp::monomial(1.0, 1, r1);
    const PolyExp phi1 = PolyExp::monomial(1.0, 5, r1);
    const PolyExp phi2 = PolyExp::monomial(1.0, 5, fam.r2);
    const PolyExp phi3 = PolyExp::monomial(1.0, 3, r1);
    const PolyExp phi4 = PolyExp::monomial(1.0, 4, r1);

    const Field2D f = data.sample_f(bf.sched, bf.grid);
    auto ic = [&](const PolyExp& phi) {
        const Field2D zero(bf.nx(), bf.ny());
        return integral_condition_residual(bf, phi.sample(bf.grid.nodes), zero, 0.0);
    };
    const double ic0 = ic(phi0), ic1 = ic(phi1), ic2 = ic(phi2), ic3 = ic(phi3),
                 ic4 = ic(phi4);
    const double icf = integral_condition_residual(bf, Profile(bf.ny(), 0.0), f, 0.0);
    // c0 ic0 + c1 ic1 + c2 ic2 + c3 ic3 + c4 ic4 + icf = 0  (u0(0) = 0)
    const double c2 = -(c0 * ic0 + fam.c1 * ic1 + c3 * ic3 + c4 * ic4 + icf) / ic2;

    data.V0 = phi0.scaled(c0)
                  .plus(phi1.scaled(fam.c1))
                  .plus(phi2.scaled(c2))
                  .plus(phi3.scaled(c3))
                  .plus(phi4.scaled(c4));
    return data;
}

} // namespace blkit
