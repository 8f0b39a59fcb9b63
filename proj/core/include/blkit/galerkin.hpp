#pragma once

#include "blkit/baseflow.hpp"
#include "blkit/grid.hpp"

#include <vector>

namespace blkit {

struct LDPProblem; // ldp.hpp

// Flat row-major square matrix (plain storage for the assembled systems).
struct SquareMatrix {
    int n = 0;
    std::vector<double> a;
    SquareMatrix() = default;
    explicit SquareMatrix(int n_) : n(n_), a(static_cast<std::size_t>(n_) * n_, 0.0) {}
    double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

// ODE-in-x system for the sine-basis coefficients:
//   Gamma(x) b'(x) + A(x) b + K(x) I_x[b] = F(x),
// basis e_i(y) = sin(pi i y / N) on [0, box_N] (complete half-range family).
struct GalerkinSystem {
    int n_modes = 0;
    double box_N = 0.0;
    SquareMatrix Gamma;               // at x = 0 (SPD contract)
    std::vector<SquareMatrix> Gamma_of_x;
    std::vector<SquareMatrix> A_of_x, K_of_x;
    std::vector<std::vector<double>> F_of_x;
    Field2D u_theta_N; // truncated-flattened u_theta^{(N)}
    const BaseFlow* bf = nullptr;
    double theta = 0.0;
    int kappa = 1;

    // Basis samples: slot 0 is the plateau mode carrying the free far-field
    // value of q; slots 1.. are half-range sines sin(pi m y / N).
    bool augmented = false;
    std::vector<Profile> e, e1, e2;
    std::vector<Profile> e0_derivs; // e0 and d/dy^k e0, k = 0..4
    std::vector<double> e1_at_0;
};

GalerkinSystem build_galerkin(const LDPProblem& prob, int n_modes, double box_N);

// Cholesky-based SPD check of Gamma; returns the minimal pivot, throws
// NumericalError if the factorization fails.
double gamma_min_pivot(const SquareMatrix& G);

struct GalerkinTrajectory {
    std::vector<std::vector<double>> b;    // per x-node
    std::vector<std::vector<double>> bdot; // per x-node (from the ODE)
};

// Implicit-trapezoid integration of the augmented linear system with
// state (b, B = I_x[b]) and step-doubling error control.
GalerkinTrajectory march_galerkin(const GalerkinSystem& sys, const std::vector<double>& b0,
                                  const MarchSchedule& sched, double step_tol = 1e-6);

// Projection of a profile onto the mixed basis (Gram solve).
std::vector<double> project_sine(const Profile& f, const Grid1D& grid,
                                 const GalerkinSystem& sys);

// Synthesize d_x^{x_deriv} d_y^{y_deriv} q from the trajectory (y spectrally).
Field2D synthesize(const GalerkinSystem& sys, const GalerkinTrajectory& traj,
                   const MarchSchedule& sched, int y_deriv = 0, int x_deriv = 0);

} // namespace blkit
