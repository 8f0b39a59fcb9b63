#include "blkit/quad.hpp"

#include "blkit/errors.hpp"

#include <cmath>

namespace blkit {

Profile cumtrapz(std::span<const double> f, std::span<const double> nodes) {
    if (f.size() != nodes.size()) throw ConfigError("cumtrapz: size mismatch");
    Profile out(f.size(), 0.0);
    for (std::size_t i = 1; i < f.size(); ++i)
        out[i] = out[i - 1] + 0.5 * (f[i] + f[i - 1]) * (nodes[i] - nodes[i - 1]);
    return out;
}

double trapz(std::span<const double> f, std::span<const double> nodes) {
    double s = 0.0;
    for (std::size_t i = 1; i < f.size(); ++i)
        s += 0.5 * (f[i] + f[i - 1]) * (nodes[i] - nodes[i - 1]);
    return s;
}

Profile quad_y(const Profile& f, const Grid1D& grid, QuadMode mode) {
    Profile c = cumtrapz(f, grid.nodes);
    if (mode == QuadMode::from_0_to_y) return c;
    const double total = c.back();
    for (auto& v : c) v = total - v;
    return c;
}

Field2D quad_y(const Field2D& f, const Grid1D& grid, QuadMode mode) {
    Field2D out(f.nx, f.ny, 0.0, f.label);
    for (std::size_t ix = 0; ix < f.nx; ++ix) {
        Profile row(f.row(ix), f.row(ix) + f.ny);
        Profile q = quad_y(row, grid, mode);
        std::copy(q.begin(), q.end(), out.row(ix));
    }
    return out;
}

Field2D accumulate_x(const Field2D& f, const MarchSchedule& sched) {
    if (f.nx != sched.size()) throw ConfigError("accumulate_x: schedule mismatch");
    Field2D out(f.nx, f.ny, 0.0, f.label);
    for (std::size_t ix = 1; ix < f.nx; ++ix) {
        const double h = sched.x_nodes[ix] - sched.x_nodes[ix - 1];
        for (std::size_t iy = 0; iy < f.ny; ++iy)
            out.at(ix, iy) = out.at(ix - 1, iy) + 0.5 * h * (f.at(ix, iy) + f.at(ix - 1, iy));
    }
    return out;
}

double l2_y(std::span<const double> f, const Grid1D& grid) {
    double s = 0.0;
    for (std::size_t i = 1; i < f.size(); ++i) {
        const double h = grid.nodes[i] - grid.nodes[i - 1];
        s += 0.5 * h * (f[i] * f[i] + f[i - 1] * f[i - 1]);
    }
    return std::sqrt(s);
}

double l2_xy(const Field2D& f, const MarchSchedule& sched, const Grid1D& grid) {
    double s = 0.0;
    Profile per_x(f.nx);
    for (std::size_t ix = 0; ix < f.nx; ++ix) {
        const double v = l2_y(std::span<const double>(f.row(ix), f.ny), grid);
        per_x[ix] = v * v;
    }
    for (std::size_t ix = 1; ix < f.nx; ++ix)
        s += 0.5 * (per_x[ix] + per_x[ix - 1]) * (sched.x_nodes[ix] - sched.x_nodes[ix - 1]);
    return std::sqrt(s);
}

double sup_x_l2_y(const Field2D& f, const Grid1D& grid) {
    double m = 0.0;
    for (std::size_t ix = 0; ix < f.nx; ++ix)
        m = std::max(m, l2_y(std::span<const double>(f.row(ix), f.ny), grid));
    return m;
}

double l2_x(std::span<const double> f, std::span<const double> x_nodes) {
    double s = 0.0;
    for (std::size_t i = 1; i < f.size(); ++i)
        s += 0.5 * (f[i] * f[i] + f[i - 1] * f[i - 1]) * (x_nodes[i] - x_nodes[i - 1]);
    return std::sqrt(s);
}

double rel_l2(const Field2D& a, const Field2D& b, const MarchSchedule& sched, const Grid1D& grid) {
    const double diff = l2_xy(a - b, sched, grid);
    const double ref = l2_xy(b, sched, grid);
    return ref > 0.0 ? diff / ref : diff;
}

} // namespace blkit
