#pragma once

#include "blkit/grid.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace blkit {

// Septic smoothstep: S(t) = 35t^4 - 84t^5 + 70t^6 - 20t^7, C^3 at both ends.
double smoothstep(double t);
double smoothstep_d1(double t);
double smoothstep_d2(double t);
double smoothstep_d3(double t);
double smoothstep_d4(double t);

// Monotone C^3 cutoff: chi = 1 on [0,1], 0 on [2,inf), chi' <= 0.
struct Cutoff {
    double lo = 1.0, hi = 2.0;
    double value(double y) const;
    double d1(double y) const;
    double d2(double y) const;
    double d3(double y) const;
    Profile sample(const Grid1D& g) const;
};

// Sum of c * y^p * exp(-r y) terms; closed under differentiation, which is
// what all boundary/initial data families here are built from.
struct PolyExp {
    struct Term {
        double c;
        int p;
        double r;
    };
    std::vector<Term> terms;

    double value(double y) const;
    double deriv(double y, int order) const;
    PolyExp differentiated(int order = 1) const;
    PolyExp scaled(double s) const;
    PolyExp plus(const PolyExp& other) const;
    Profile sample(std::span<const double> nodes) const;
    static PolyExp monomial(double c, int p, double r) { return PolyExp{{{c, p, r}}}; }
};

// Initial streamwise profile U0(y) with analytic derivatives, satisfying
// U0 > 0 for y > 0, U0'(0) > 0, U0''(0) = U0'''(0) = 0, U0 -> 1.
class InitialProfile {
public:
    virtual ~InitialProfile() = default;
    virtual double value(double y) const = 0;
    virtual double deriv(double y, int order) const = 0; // order 1..4
    virtual std::string name() const = 0;
    Profile sample(const Grid1D& g) const;
};

// U0' = s0 exactly on [0,1], C^3 bump of amplitude A on [1,2.2], C^3 descent
// to zero on [2.2,4.4]; U0 == 1 identically beyond y = 4.4. s0 normalizes
// int U0' = 1. The exact near-wall linearity makes the Lemma-2.7-type wall
// constants exact and keeps v_bar(0,inf) small (slightly negative at A = 1).
std::unique_ptr<InitialProfile> make_plateau_shear(double bump_amplitude = 0.6);

// tanh(a y) with the wall cubic correction (a^3/3) y^3 removed smoothly so
// that U0''(0) = U0'''(0) = 0 exactly. Steep curvature; intended for
// base-flow tests only (its companion v_bar(0,inf) is large).
std::unique_ptr<InitialProfile> make_smoothed_tanh(double a = 2.0);

// Profile backed by sampled values (derivative queries via finite differences).
std::unique_ptr<InitialProfile> make_tabulated_profile(Profile values, Grid1D grid);

// Stable near-wall division helpers. divide_by_y returns g / y^m for data
// with an m-fold zero at y = 0; below y_star the value comes from a
// constrained least-squares fit g ~ sum_{j=m}^{m+4} c_j y^j.
Profile divide_by_y(const Profile& g, std::span<const double> nodes, int m,
                    double y_star = 0.2, double y_fit = 0.5);

// g / ubar with ubar ~ ubar_y(0) y near the wall: (g/y) / (ubar/y).
Profile divide_by_ubar(const Profile& g, const Profile& ubar, std::span<const double> nodes);

} // namespace blkit
