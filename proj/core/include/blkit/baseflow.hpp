#pragma once

#include "blkit/grid.hpp"
#include "blkit/profiles.hpp"

#include <map>
#include <memory>
#include <optional>

namespace blkit {

struct OleinikReport {
    double m0 = 0.0;
    double y0 = 0.0;
    std::map<std::string, double> sup_bounds; // u, v, u_y, u_yy, u_x on y <= y0
};

// Oleinik base flow on (0, L) x (0, y_max) with derivative caches.
struct BaseFlow {
    MarchSchedule sched;
    Grid1D grid;
    Field2D u_bar, v_bar;
    double L = 0.0;
    double N_weight = 2.0;
    Profile U0;

    // High-accuracy x = 0 companions (equation-based, not one-sided FD):
    Profile v0;  // v_bar(0, y) from the x = 0 consistency ODE
    Profile ux0; // u_bar_x(0, y) = (U0'' - v0 U0') / U0

    double march_residual = 0.0; // max discrete momentum residual over all steps
    std::shared_ptr<const InitialProfile> initial; // analytic family when available

    // d^a/dx^a d^b/dy^b of u_bar (a <= 3, b <= 4) and of v_bar (a <= 3, b <= 3).
    const Field2D& u_deriv(int a, int b) const;
    const Field2D& v_deriv(int a, int b) const;

    double wall_shear(std::size_t ix) const;   // u_bar_y(x, 0)
    Profile wall_shear_profile() const;        // over all x-nodes

    std::size_t nx() const { return sched.size(); }
    std::size_t ny() const { return grid.size(); }

    mutable std::map<std::pair<int, int>, Field2D> du_cache, dv_cache;
};

struct PrandtlOptions {
    int newton_max = 50;
    double newton_tol = 1e-11;
    bool check_oleinik = true;
};

// Crank-Nicolson x-march of the steady Prandtl system, Newton inner
// iteration, v recovered from the divergence constraint. The initial
// profile must satisfy the Oleinik wall conditions.
BaseFlow solve_prandtl(const InitialProfile& U0, double L, const MarchSchedule& sched,
                       const Grid1D& grid, const PrandtlOptions& opts = {});

BaseFlow solve_prandtl(const Profile& U0_samples, double L, const MarchSchedule& sched,
                       const Grid1D& grid, const PrandtlOptions& opts = {});

// Consistency check in von Mises variables: interpolates u onto the
// streamfunction coordinate and measures || d_x u~ - d_psi(u~ u~_psi) ||_inf
// over an interior safety region. Zero by convention for a single x-node.
double von_mises_residual(const BaseFlow& bf);

OleinikReport oleinik_report(const BaseFlow& bf);

// Analytic flow u = U(y) + x W(y), v = -int_0^y W for solver-independent
// coefficient fields (manufactured-solution studies). Not a Prandtl solution.
BaseFlow synthetic_base_flow(const InitialProfile& U, const PolyExp& W,
                             const MarchSchedule& sched, const Grid1D& grid);

// CSV bundle (one file per field, columns x,y,value) + JSON header.
void export_baseflow(const BaseFlow& bf, const std::string& dir);
BaseFlow import_baseflow(const std::string& dir);

} // namespace blkit
