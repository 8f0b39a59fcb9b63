#pragma once

#include "blkit/baseflow.hpp"
#include "blkit/galerkin.hpp"
#include "blkit/grid.hpp"
#include "blkit/homogenize.hpp"

#include <map>
#include <optional>

namespace blkit {

enum class LdpMethod { galerkin, finite_difference };

struct LDPProblem {
    const BaseFlow* bf = nullptr;
    const HomogenizedData* hd = nullptr;
    Profile u0_trace; // homogenized initial trace u(0, .); empty means zero
    int kappa = 1;
    double theta = 0.0;

    const Field2D& F_theta() const;
};

struct QuotientSolution {
    Field2D q;
    Field2D v; // u_bar * q
    double theta_used = 0.0;
    LdpMethod method = LdpMethod::finite_difference;
    double residual = 0.0;          // || apply_ldp_operator(q) - F_theta || (interior L2)
    bool continuation_warning = false;
    const BaseFlow* bf = nullptr;

    // d_x^a d_y^b of q and of v (v up to b = 4).
    const Field2D& q_deriv(int a, int b) const;
    const Field2D& v_deriv(int a, int b) const;

    mutable std::map<std::pair<int, int>, Field2D> dq_cache, dv_cache;
};

// Pointwise application of -d_xd_y(u_theta^2 q_y) + d_y^4 v + kappa Lambda(v)
// + kappa U(u^0); I_x terms by running accumulation.
Field2D apply_ldp_operator(const Field2D& q, const LDPProblem& prob);

// Far-field closure of the finite-difference march. half_line is the
// physical one (u -> 0, the far value of v is an output); boxed pins
// v(y_max) = 0 and matches the truncated problem the sine-Galerkin solves.
enum class FdFarField { half_line, boxed };

struct LdpOptions {
    int n_modes = 96;
    double box_N = 0.0;               // 0: use the grid's y_max
    std::vector<double> theta_schedule = {1e-1, 3e-2, 1e-2, 3e-3};
    double step_tol = 1e-6;
    double continuation_warn = 5e-2;
    FdFarField fd_far_field = FdFarField::half_line;
};

// Solve for q by the selected method. For the Galerkin path the theta
// schedule must decrease and ends with a linear-in-theta extrapolation to 0.
QuotientSolution solve_ldp(const LDPProblem& prob, LdpMethod method,
                           const LdpOptions& opts = {});

// u = u^0 - I_x[v_y]; u_p = u + u0 psi, v_p = v + u0x I_psi. Returns (u_p, v_p)
// and stores the divergence residual in *div_residual when given.
std::pair<Field2D, Field2D> recover_velocity(const QuotientSolution& qs,
                                             const Profile& u0_trace,
                                             const HomogenizedData& hd,
                                             double* div_residual = nullptr);

} // namespace blkit
