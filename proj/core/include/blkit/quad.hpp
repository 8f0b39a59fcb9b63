#pragma once

#include "blkit/grid.hpp"

#include <span>

namespace blkit {

enum class QuadMode { from_0_to_y, from_y_to_inf };

// Composite-trapezoid antiderivative along arbitrary nodes.
Profile cumtrapz(std::span<const double> f, std::span<const double> nodes);
double trapz(std::span<const double> f, std::span<const double> nodes);

// from_y_to_inf treats the tail beyond the last node as exactly zero.
Profile quad_y(const Profile& f, const Grid1D& grid, QuadMode mode);
Field2D quad_y(const Field2D& f, const Grid1D& grid, QuadMode mode);

// Running antiderivative in x: I_x[f](x, y) = int_0^x f.
Field2D accumulate_x(const Field2D& f, const MarchSchedule& sched);

// L2 norms. l2_y integrates over y at fixed x; l2_xy over the whole strip.
double l2_y(std::span<const double> f, const Grid1D& grid);
double l2_xy(const Field2D& f, const MarchSchedule& sched, const Grid1D& grid);
double sup_x_l2_y(const Field2D& f, const Grid1D& grid);

// L2 in x of a wall trace sqrt( int w(x) f(x)^2 dx ).
double l2_x(std::span<const double> f, std::span<const double> x_nodes);

double rel_l2(const Field2D& a, const Field2D& b, const MarchSchedule& sched, const Grid1D& grid);

} // namespace blkit
