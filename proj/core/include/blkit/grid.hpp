#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace blkit {

enum class MapKind { uniform, exp_stretched };

// One-dimensional wall-normal grid on [0, y_max].
struct Grid1D {
    std::vector<double> nodes; // nodes[0] = 0, strictly increasing, back() = y_max
    double y_max = 0.0;
    MapKind map_kind = MapKind::uniform;

    std::size_t size() const { return nodes.size(); }
    double operator[](std::size_t i) const { return nodes[i]; }
};

// y_max > 0, count >= 16. exp_stretched clusters nodes near y = 0.
Grid1D build_grid(double y_max, int count, MapKind map_kind, double stretch = 2.5);

// Streamwise (time-like) node schedule on [0, L], L <= 1.
struct MarchSchedule {
    std::vector<double> x_nodes; // x_nodes[0] = 0, strictly increasing, back() = L
    double length = 0.0;         // L

    std::size_t size() const { return x_nodes.size(); }
    double operator[](std::size_t i) const { return x_nodes[i]; }
    double dx(std::size_t k) const { return x_nodes[k + 1] - x_nodes[k]; }
};

MarchSchedule uniform_schedule(double L, int count);

using Profile = std::vector<double>;

// Scalar field sampled on (x-node, y-node) pairs, x-major storage.
struct Field2D {
    std::size_t nx = 0, ny = 0;
    std::vector<double> v;
    std::string label;

    Field2D() = default;
    Field2D(std::size_t nx_, std::size_t ny_, double fill = 0.0, std::string label_ = {})
        : nx(nx_), ny(ny_), v(nx_ * ny_, fill), label(std::move(label_)) {}

    double& at(std::size_t ix, std::size_t iy) { return v[ix * ny + iy]; }
    double at(std::size_t ix, std::size_t iy) const { return v[ix * ny + iy]; }

    const double* row(std::size_t ix) const { return v.data() + ix * ny; }
    double* row(std::size_t ix) { return v.data() + ix * ny; }

    Profile x_slice(std::size_t ix) const { return Profile(row(ix), row(ix) + ny); }
    Profile y_trace(std::size_t iy) const {
        Profile out(nx);
        for (std::size_t ix = 0; ix < nx; ++ix) out[ix] = at(ix, iy);
        return out;
    }
    bool all_finite() const;
};

Field2D operator+(const Field2D& a, const Field2D& b);
Field2D operator-(const Field2D& a, const Field2D& b);
Field2D operator*(double c, const Field2D& a);

double max_abs(const Field2D& f);
double max_abs(const Profile& p);

} // namespace blkit
