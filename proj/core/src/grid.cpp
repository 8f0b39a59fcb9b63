#include "blkit/grid.hpp"

#include "blkit/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace blkit {

Grid1D build_grid(double y_max, int count, MapKind map_kind, double stretch) {
    if (y_max <= 0.0) throw ConfigError("build_grid: y_max must be positive");
    if (count < 16) throw ConfigError("build_grid: need at least 16 nodes");
    Grid1D g;
    g.y_max = y_max;
    g.map_kind = map_kind;
    g.nodes.resize(static_cast<std::size_t>(count));
    const double n1 = static_cast<double>(count - 1);
    for (int i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / n1;
        if (map_kind == MapKind::uniform) {
            g.nodes[i] = y_max * t;
        } else {
            g.nodes[i] = y_max * std::expm1(stretch * t) / std::expm1(stretch);
        }
    }
    g.nodes.front() = 0.0;
    g.nodes.back() = y_max;
    return g;
}

MarchSchedule uniform_schedule(double L, int count) {
    if (L <= 0.0 || L > 1.0) throw ConfigError("uniform_schedule: need 0 < L <= 1");
    if (count < 2) throw ConfigError("uniform_schedule: need at least 2 x-nodes");
    MarchSchedule s;
    s.length = L;
    s.x_nodes.resize(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        s.x_nodes[i] = L * static_cast<double>(i) / static_cast<double>(count - 1);
    s.x_nodes.front() = 0.0;
    s.x_nodes.back() = L;
    return s;
}

bool Field2D::all_finite() const {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

Field2D operator+(const Field2D& a, const Field2D& b) {
    Field2D out(a.nx, a.ny);
    for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = a.v[i] + b.v[i];
    return out;
}

Field2D operator-(const Field2D& a, const Field2D& b) {
    Field2D out(a.nx, a.ny);
    for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = a.v[i] - b.v[i];
    return out;
}

Field2D operator*(double c, const Field2D& a) {
    Field2D out(a.nx, a.ny);
    for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = c * a.v[i];
    return out;
}

double max_abs(const Field2D& f) {
    double m = 0.0;
    for (double x : f.v) m = std::max(m, std::abs(x));
    return m;
}

double max_abs(const Profile& p) {
    double m = 0.0;
    for (double x : p) m = std::max(m, std::abs(x));
    return m;
}

} // namespace blkit
