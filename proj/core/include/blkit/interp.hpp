#pragma once

#include <span>
#include <vector>

namespace blkit {

// Natural cubic spline through (xs, ys); evaluates with clamped-linear
// extrapolation outside the node range.
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::span<const double> xs, std::span<const double> ys);

    double operator()(double x) const;
    double deriv(double x) const;

private:
    std::vector<double> x_, y_, m_; // m_: second derivatives at nodes
};

// Piecewise-linear interpolation (used where spline overshoot matters).
double lerp(std::span<const double> xs, std::span<const double> ys, double x);

} // namespace blkit
