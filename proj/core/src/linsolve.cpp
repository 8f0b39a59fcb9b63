#include "blkit/linsolve.hpp"

#include "blkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace blkit {

namespace {

double matrix_scale(const std::vector<double>& a) {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::abs(x));
    return m;
}

[[noreturn]] void throw_singular(double pivot, double scale) {
    const double cond = pivot > 0.0 ? scale / pivot : std::numeric_limits<double>::infinity();
    throw NumericalError("solve_linear: singular or ill-conditioned matrix (pivot " +
                             std::to_string(pivot) + ")",
                         cond);
}

} // namespace

DenseLU::DenseLU(DenseMatrix A) : n(A.n), lu_(std::move(A.a)), piv_(A.n) {
    const double scale = matrix_scale(lu_);
    const double floor = 1e-14 * std::max(scale, 1.0);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(lu_[k * n + k]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = std::abs(lu_[i * n + k]);
            if (v > best) { best = v; p = i; }
        }
        if (best < floor) throw_singular(best, scale);
        piv_[k] = p;
        if (p != k)
            for (std::size_t j = 0; j < n; ++j) std::swap(lu_[k * n + j], lu_[p * n + j]);
        const double pivval = lu_[k * n + k];
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = lu_[i * n + k] / pivval;
            lu_[i * n + k] = f;
            for (std::size_t j = k + 1; j < n; ++j) lu_[i * n + j] -= f * lu_[k * n + j];
        }
    }
}

std::vector<double> DenseLU::solve(std::vector<double> b) const {
    for (std::size_t k = 0; k < n; ++k)
        if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
    for (std::size_t i = 1; i < n; ++i) {
        double s = b[i];
        for (std::size_t j = 0; j < i; ++j) s -= lu_[i * n + j] * b[j];
        b[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= lu_[i * n + j] * b[j];
        b[i] = s / lu_[i * n + i];
    }
    return b;
}

std::vector<double> solve_linear(DenseMatrix A, std::vector<double> b) {
    if (A.n != b.size()) throw ConfigError("solve_linear: shape mismatch");
    return DenseLU(std::move(A)).solve(std::move(b));
}

std::vector<double> solve_linear(BandedMatrix A, std::vector<double> b) {
    const std::size_t n = A.n;
    if (n != b.size()) throw ConfigError("solve_linear: shape mismatch");
    const int kl = A.kl, ku = A.ku;
    const int kd = kl + ku; // band row of the diagonal
    const double scale = matrix_scale(A.a);
    const double floor = 1e-14 * std::max(scale, 1.0);
    std::vector<double>& a = A.a;
    auto at = [&](int r, std::size_t j) -> double& { return a[static_cast<std::size_t>(r) * n + j]; };

    for (std::size_t k = 0; k < n; ++k) {
        const int mmax = std::min<int>(kl, static_cast<int>(n - 1 - k));
        int shift = 0;
        double best = std::abs(at(kd, k));
        for (int m = 1; m <= mmax; ++m) {
            const double v = std::abs(at(kd + m, k));
            if (v > best) { best = v; shift = m; }
        }
        if (best < floor) throw_singular(best, scale);
        if (shift != 0) {
            const std::size_t jmax = std::min(n - 1, k + static_cast<std::size_t>(kd));
            for (std::size_t j = k; j <= jmax; ++j) {
                const int rk = kd + static_cast<int>(k) - static_cast<int>(j);
                std::swap(at(rk, j), at(rk + shift, j));
            }
            std::swap(b[k], b[k + shift]);
        }
        const double pivval = at(kd, k);
        for (int m = 1; m <= mmax; ++m) {
            const double f = at(kd + m, k) / pivval;
            at(kd + m, k) = f;
            const std::size_t jmax = std::min(n - 1, k + static_cast<std::size_t>(kd));
            for (std::size_t j = k + 1; j <= jmax; ++j) {
                const int rk = kd + static_cast<int>(k) - static_cast<int>(j);
                at(rk + m, j) -= f * at(rk, j);
            }
            b[k + m] -= f * b[k];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        const std::size_t jmax = std::min(n - 1, i + static_cast<std::size_t>(kd));
        for (std::size_t j = i + 1; j <= jmax; ++j) {
            const int r = kd + static_cast<int>(i) - static_cast<int>(j);
            s -= at(r, j) * b[j];
        }
        b[i] = s / at(kd, i);
    }
    return b;
}

} // namespace blkit
