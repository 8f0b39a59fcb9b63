#include "blkit/fd.hpp"

#include "blkit/errors.hpp"

#include <algorithm>
#include <cmath>

namespace blkit {

std::vector<double> fd_weights(std::span<const double> xs, double x0, int order) {
    // Fornberg's recursion, weights for derivatives 0..order at x0; we
    // return the top row (derivative = order).
    const int n = static_cast<int>(xs.size()) - 1;
    const int m = order;
    std::vector<double> c((n + 1) * (m + 1), 0.0);
    auto C = [&](int i, int j) -> double& { return c[i * (m + 1) + j]; };

    double c1 = 1.0;
    double c4 = xs[0] - x0;
    C(0, 0) = 1.0;
    for (int i = 1; i <= n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = xs[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    C(i, k) = c1 * (k * C(i - 1, k - 1) - c5 * C(i - 1, k)) / c2;
                C(i, 0) = -c1 * c5 * C(i - 1, 0) / c2;
            }
            for (int k = mn; k >= 1; --k)
                C(j, k) = (c4 * C(j, k) - k * C(j, k - 1)) / c3;
            C(j, 0) = c4 * C(j, 0) / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n + 1);
    for (int i = 0; i <= n; ++i) w[i] = C(i, m);
    return w;
}

StencilOp make_stencil(std::span<const double> nodes, int order) {
    if (order < 1 || order > 4) throw ConfigError("differentiate: order must be in 1..4");
    const int n = static_cast<int>(nodes.size());
    const int npts = order + 2;
    if (n < npts) throw ConfigError("differentiate: grid too small for requested order");

    StencilOp op;
    op.npts = npts;
    op.n = nodes.size();
    op.first.resize(n);
    op.weights.resize(static_cast<std::size_t>(n) * npts);
    for (int i = 0; i < n; ++i) {
        int first = i - npts / 2;
        first = std::clamp(first, 0, n - npts);
        op.first[i] = first;
        auto w = fd_weights(std::span<const double>(nodes.data() + first, npts), nodes[i], order);
        std::copy(w.begin(), w.end(), op.weights.begin() + static_cast<std::size_t>(i) * npts);
    }
    return op;
}

void StencilOp::apply(const double* f, double* out) const {
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        const double* w = weights.data() + i * npts;
        const double* fp = f + first[i];
        for (int k = 0; k < npts; ++k) s += w[k] * fp[k];
        out[i] = s;
    }
}

Profile StencilOp::apply(const Profile& f) const {
    Profile out(n);
    apply(f.data(), out.data());
    return out;
}

Profile differentiate(const Profile& f, std::span<const double> nodes, int order) {
    if (f.size() != nodes.size()) throw ConfigError("differentiate: size mismatch");
    return make_stencil(nodes, order).apply(f);
}

Field2D differentiate(const Field2D& f, Dir dir, int order,
                      const MarchSchedule& sched, const Grid1D& grid) {
    if (f.nx != sched.size() || f.ny != grid.size())
        throw ConfigError("differentiate: field/grid shape mismatch");
    Field2D out(f.nx, f.ny, 0.0, f.label);
    if (dir == Dir::y) {
        const StencilOp op = make_stencil(grid.nodes, order);
        for (std::size_t ix = 0; ix < f.nx; ++ix) op.apply(f.row(ix), out.row(ix));
    } else {
        const StencilOp op = make_stencil(sched.x_nodes, order);
        Profile col(f.nx), dcol(f.nx);
        for (std::size_t iy = 0; iy < f.ny; ++iy) {
            for (std::size_t ix = 0; ix < f.nx; ++ix) col[ix] = f.at(ix, iy);
            op.apply(col.data(), dcol.data());
            for (std::size_t ix = 0; ix < f.nx; ++ix) out.at(ix, iy) = dcol[ix];
        }
    }
    return out;
}

} // namespace blkit
