#pragma once

#include "blkit/baseflow.hpp"
#include "blkit/grid.hpp"

#include <map>
#include <string>

namespace blkit {

// Kernel of L_{par,y} u = -u_yyy + v_bar u_yy - u v_bar_yy at x = 0:
// span{u_bar, u_tilde_s, u_R}.
struct KernelBasis {
    Profile u_tilde_s;
    Profile u_R;
    Profile wronskian;  // u_bar u_tilde_s_y - u_tilde_s u_bar_y
    Profile a_prime;    // a'(y) = u_bar(1)^2 e^{int_1^y v_bar} / u_bar^2
    Profile a;          // int_1^y a'
    Profile E;          // e^{-int_1^y v_bar(0)}
    double u1 = 0.0;    // u_bar(0, 1)
    double s0 = 0.0;    // u_bar_y(0, 0)
    double g0 = 0.0;    // e^{int_1^0 v_bar}
    double us_at_wall = 0.0; // analytic limit -u1^2 g0 / s0
};

KernelBasis kernel_basis(const BaseFlow& bf);

struct ReconstructedTrace {
    Profile u0;
    double c1 = 0.0;
    double c_normalizer = 0.0; // coefficient of u_bar subtracted for decay
    double residual_ODE = 0.0; // || L_par u0 - (f - r) ||_{L2_y}
};

// Explicit variation-of-parameters reconstruction of u0 from V0 under the
// compatibility integral condition (threshold on its residual).
ReconstructedTrace reconstruct_u0(const BaseFlow& bf, const Profile& V0, const Field2D& f,
                                  double u0_at_0, double threshold = 1e-8);

// Wall values/slopes of u_tilde_s in the canonical normalization and the
// large-y exponential rate of u_tilde_s_y fitted against v_bar(0, y_max).
std::map<std::string, double> asymptotics_report(const KernelBasis& kb, const BaseFlow& bf);

// L_par and L_{par,y} applied by finite differences at x = 0 (shared checks).
Profile apply_L_par(const BaseFlow& bf, const Profile& u);
Profile apply_L_par_y(const BaseFlow& bf, const Profile& u);

} // namespace blkit
