#pragma once

#include <cstddef>
#include <vector>

namespace blkit {

struct DenseMatrix {
    std::size_t n = 0;
    std::vector<double> a; // row-major n x n

    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t n_) : n(n_), a(n_ * n_, 0.0) {}
    double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

// LAPACK-style banded storage: kl sub-, ku super-diagonals.
// Entry (i, j) with -kl <= j - i <= ku lives at band(ku + i - j, j).
struct BandedMatrix {
    std::size_t n = 0;
    int kl = 0, ku = 0;
    std::vector<double> a; // (2*kl + ku + 1) x n, column-major bands

    BandedMatrix() = default;
    BandedMatrix(std::size_t n_, int kl_, int ku_)
        : n(n_), kl(kl_), ku(ku_), a((2 * kl_ + ku_ + 1) * n_, 0.0) {}
    double& at(std::size_t i, std::size_t j) {
        return a[(kl + ku + i - j) * n + j];
    }
    double at(std::size_t i, std::size_t j) const {
        return a[(kl + ku + i - j) * n + j];
    }
    bool in_band(std::size_t i, std::size_t j) const {
        const long d = static_cast<long>(j) - static_cast<long>(i);
        return d >= -kl && d <= ku;
    }
};

// Gaussian elimination with partial pivoting. Throws NumericalError with a
// condition estimate when a pivot falls below 1e-14 * matrix scale.
std::vector<double> solve_linear(DenseMatrix A, std::vector<double> b);
std::vector<double> solve_linear(BandedMatrix A, std::vector<double> b);

// Factored form for repeated solves against the same dense matrix.
struct DenseLU {
    explicit DenseLU(DenseMatrix A);
    std::vector<double> solve(std::vector<double> b) const;
    std::size_t n;

private:
    std::vector<double> lu_;
    std::vector<std::size_t> piv_;
};

} // namespace blkit
