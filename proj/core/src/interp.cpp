#include "blkit/interp.hpp"

#include "blkit/errors.hpp"

#include <algorithm>
#include <cmath>

namespace blkit {

CubicSpline::CubicSpline(std::span<const double> xs, std::span<const double> ys)
    : x_(xs.begin(), xs.end()), y_(ys.begin(), ys.end()) {
    const std::size_t n = x_.size();
    if (n < 3 || n != y_.size()) throw ConfigError("CubicSpline: need >= 3 nodes");
    m_.assign(n, 0.0);
    // Thomas algorithm for the natural-spline tridiagonal system.
    std::vector<double> c(n, 0.0), d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = x_[i] - x_[i - 1];
        const double h1 = x_[i + 1] - x_[i];
        const double rhs = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
        const double diag = 2.0 * (h0 + h1) - (i > 1 ? h0 * c[i - 1] : 0.0);
        c[i] = h1 / diag;
        d[i] = (rhs - (i > 1 ? h0 * d[i - 1] : 0.0)) / diag;
    }
    for (std::size_t i = n - 1; i-- > 1;) m_[i] = d[i] - c[i] * m_[i + 1];
}

double CubicSpline::operator()(double x) const {
    const std::size_t n = x_.size();
    if (x <= x_.front()) {
        const double s = (y_[1] - y_[0]) / (x_[1] - x_[0]) - (x_[1] - x_[0]) * m_[1] / 6.0;
        return y_.front() + s * (x - x_.front());
    }
    if (x >= x_.back()) {
        const double h = x_[n - 1] - x_[n - 2];
        const double s = (y_[n - 1] - y_[n - 2]) / h + h * m_[n - 2] / 6.0;
        return y_.back() + s * (x - x_.back());
    }
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - x) / h;
    const double b = (x - x_[i]) / h;
    return a * y_[i] + b * y_[i + 1] +
           ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::deriv(double x) const {
    const std::size_t n = x_.size();
    if (x <= x_.front())
        return (y_[1] - y_[0]) / (x_[1] - x_[0]) - (x_[1] - x_[0]) * m_[1] / 6.0;
    if (x >= x_.back()) {
        const double h = x_[n - 1] - x_[n - 2];
        return (y_[n - 1] - y_[n - 2]) / h + h * m_[n - 2] / 6.0;
    }
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - x) / h;
    const double b = (x - x_[i]) / h;
    return (y_[i + 1] - y_[i]) / h +
           ((1.0 - 3.0 * a * a) * m_[i] + (3.0 * b * b - 1.0) * m_[i + 1]) * h / 6.0;
}

double lerp(std::span<const double> xs, std::span<const double> ys, double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
    const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return (1.0 - t) * ys[i] + t * ys[i + 1];
}

} // namespace blkit
