#pragma once

#include "blkit/grid.hpp"

#include <span>

namespace blkit {

enum class Dir { x, y };

// Fornberg weights for the m-th derivative at x0 from the nodes xs.
std::vector<double> fd_weights(std::span<const double> xs, double x0, int order);

// Derivative of a sampled function along an arbitrary strictly increasing
// node array. Stencil width order+2, shifted one-sided at the edges.
Profile differentiate(const Profile& f, std::span<const double> nodes, int order);

Field2D differentiate(const Field2D& f, Dir dir, int order,
                      const MarchSchedule& sched, const Grid1D& grid);

// Row-local derivative operator as banded stencil table: for each node i,
// offsets[i] is the first stencil node index and weights[i] the stencil row.
struct StencilOp {
    int npts = 0;
    std::vector<int> first;            // per node
    std::vector<double> weights;       // per node, npts entries
    std::size_t n = 0;

    void apply(const double* f, double* out) const;
    Profile apply(const Profile& f) const;
};

StencilOp make_stencil(std::span<const double> nodes, int order);

} // namespace blkit
