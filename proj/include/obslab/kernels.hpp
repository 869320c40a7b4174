#pragma once

#include <cstddef>

// Hot arithmetic kernels behind the quadrature sweeps and spectral
// evaluations.  Every kernel has a scalar reference implementation and,
// on x86-64, an AVX2+FMA variant selected once at startup.  The two are
// equivalence-tested; callers go through the dispatched entry points.

namespace obslab::kernels {

// y . x over n entries.
double dot(const double* a, const double* b, std::size_t n);

// sum_i w[i] * |v[i]|  (quadrature of an absolute value).
double weighted_abs_sum(const double* w, const double* v, std::size_t n);

// y += alpha * x over n entries.
void axpy(double alpha, const double* x, double* y, std::size_t n);

// Row-major A (rows x cols):  y[r] = sum_c A[r*cols+c] x[c].
void gemv(const double* a, std::size_t rows, std::size_t cols,
          const double* x, double* y);

// Row-major A (rows x cols):  y[c] = sum_r coef[r] A[r*cols+c].
// This is the mode-table evaluation: row r tabulates mode r on a grid.
void gemv_t(const double* a, std::size_t rows, std::size_t cols,
            const double* coef, double* y);

// Row-major C (m x n) += A (m x k) * B (k x n).
void gemm_acc(const double* a, const double* b, double* c,
              std::size_t m, std::size_t k, std::size_t n);

// Which implementation the dispatcher picked ("scalar" or "avx2").
const char* active_implementation();

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double weighted_abs_sum(const double* w, const double* v, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gemv(const double* a, std::size_t rows, std::size_t cols,
          const double* x, double* y);
void gemv_t(const double* a, std::size_t rows, std::size_t cols,
            const double* coef, double* y);
void gemm_acc(const double* a, const double* b, double* c,
              std::size_t m, std::size_t k, std::size_t n);
} // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define OBSLAB_HAVE_AVX2_KERNELS 1
namespace avx2 {
bool supported();
double dot(const double* a, const double* b, std::size_t n);
double weighted_abs_sum(const double* w, const double* v, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gemv(const double* a, std::size_t rows, std::size_t cols,
          const double* x, double* y);
void gemv_t(const double* a, std::size_t rows, std::size_t cols,
            const double* coef, double* y);
void gemm_acc(const double* a, const double* b, double* c,
              std::size_t m, std::size_t k, std::size_t n);
} // namespace avx2
#endif

} // namespace obslab::kernels
