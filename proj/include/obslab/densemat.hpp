#pragma once

#include <cstddef>
#include <vector>

// Minimal dense row-major matrix support for the Galerkin generator work:
// products, LU solves and the scaling-and-squaring exponential.  Sizes here
// are 2K x 2K with K <= 64, so no factorization library is warranted.

namespace obslab::densemat {

struct Mat {
    std::size_t n = 0; // square
    std::vector<double> a; // row-major, n*n

    Mat() = default;
    explicit Mat(std::size_t n_) : n(n_), a(n_ * n_, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }

    static Mat identity(std::size_t n);
};

Mat mul(const Mat& x, const Mat& y);
Mat add(const Mat& x, const Mat& y);
void scale(Mat& x, double s);
Mat transpose(const Mat& x);
double norm1(const Mat& x);

// y = X v
void apply(const Mat& x, const double* v, double* y);

// Solves X * out = B in place of B (partial pivoting); B holds multiple
// right-hand sides as columns of a row-major n x m block.
void solve_inplace(Mat x, std::vector<double>& b, std::size_t nrhs);

// Pade-13 scaling-and-squaring exponential.
Mat expm(const Mat& x);

} // namespace obslab::densemat
