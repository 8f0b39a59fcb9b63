#pragma once

#include "blkit/baseflow.hpp"
#include "blkit/grid.hpp"
#include "blkit/profiles.hpp"

namespace blkit {

// psi = plateau - c * bump: plateau == 1 on [0,1], 0 beyond 2; bump supported
// in [3,4]; c makes the discrete integral of psi vanish exactly.
struct PsiProfile {
    Profile psi, psi_d1, psi_d2; // sampled on the y-grid
    Profile I_psi;               // int_y^inf psi (exact at the grid end)
    double plateau_end = 2.0;
    double bump_support[2] = {3.0, 4.0};
    double c = 0.0;
};

PsiProfile build_psi(const Grid1D& grid);

// Separable analytic data: u0(x), V0(y), f(x,y) = sum a_k(x) phi_k(y).
struct DataSpec {
    PolyExp u0;                     // boundary trace u_p(x, 0), variable x
    PolyExp V0;                     // initial trace v_p(0, y)
    struct ForcingTerm {
        PolyExp ax;  // x-factor
        PolyExp phi; // y-factor
    };
    std::vector<ForcingTerm> f_terms;

    Profile sample_u0(const MarchSchedule& s) const;
    Profile sample_V0(const Grid1D& g) const;
    Field2D sample_f(const MarchSchedule& s, const Grid1D& g) const;
    double f_value(double x, double y) const;
};

struct HomogenizedData {
    Field2D g1, G, f_forcing;
    Field2D F_theta;      // d_x d_y g1, the LDP forcing
    Profile V0_bar;       // V0 - u0x(0) I_psi (trace of the homogenized v)
    Profile f0;           // V0_bar / u_bar |_{x=0}
    Profile u0_of_x, u0x_of_x, u0xx_of_x;
    PsiProfile psi;
};

HomogenizedData homogenize(const BaseFlow& bf, const DataSpec& data);
// Field-based variant (u0 sampled; derivatives by finite differences).
HomogenizedData homogenize(const BaseFlow& bf, const Profile& u0_of_x, const Profile& V0,
                           const Field2D& f);

struct CompatibilityReport {
    std::vector<double> order_k_residuals; // k = 1..K
    double integral_residual = 0.0;
};

// Corner targets d_x g1(0,0) and d_xy g1(0,0); analytic in the data, with
// base-flow wall traces entering only d_xy (d_x G(0,0) vanishes identically).
std::pair<double, double> corner_targets(const BaseFlow& bf, const DataSpec& data);

CompatibilityReport corner_compatibility(const HomogenizedData& hd, const BaseFlow& bf,
                                         int K, const DataSpec* data = nullptr,
                                         const Profile* u0_trace = nullptr, int kappa = 1);

// Residual of the compatibility integral condition on (V0, f, u0(0)).
double integral_condition_residual(const BaseFlow& bf, const Profile& V0, const Field2D& f,
                                   double u0_at_0);

// f_k = d_x^k q_y |_{x=0} for k = 0..k_max from the once-integrated identity;
// f_0 is d_y of the initial quotient.
std::vector<Profile> initial_x_slices(const HomogenizedData& hd, const BaseFlow& bf,
                                      const Profile& u0_trace, int kappa, int k_max);

// e^{-int_1^y v_bar(0)} on the grid (shared by reconstruct and the condition).
Profile decay_weight_E(const BaseFlow& bf);

} // namespace blkit
