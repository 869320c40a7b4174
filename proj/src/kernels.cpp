#include "obslab/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

namespace obslab::kernels {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

double weighted_abs_sum(const double* w, const double* v, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += w[i] * std::fabs(v[i]);
        s1 += w[i + 1] * std::fabs(v[i + 1]);
        s2 += w[i + 2] * std::fabs(v[i + 2]);
        s3 += w[i + 3] * std::fabs(v[i + 3]);
    }
    for (; i < n; ++i) s0 += w[i] * std::fabs(v[i]);
    return (s0 + s1) + (s2 + s3);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const double* a, std::size_t rows, std::size_t cols,
          const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r)
        y[r] = dot(a + r * cols, x, cols);
}

void gemv_t(const double* a, std::size_t rows, std::size_t cols,
            const double* coef, double* y) {
    std::memset(y, 0, cols * sizeof(double));
    for (std::size_t r = 0; r < rows; ++r)
        axpy(coef[r], a + r * cols, y, cols);
}

void gemm_acc(const double* a, const double* b, double* c,
              std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p)
            axpy(a[i * k + p], b + p * n, c + i * n, n);
}

} // namespace scalar

namespace {

struct Dispatch {
    double (*dot)(const double*, const double*, std::size_t);
    double (*weighted_abs_sum)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*gemv)(const double*, std::size_t, std::size_t, const double*, double*);
    void (*gemv_t)(const double*, std::size_t, std::size_t, const double*, double*);
    void (*gemm_acc)(const double*, const double*, double*, std::size_t,
                     std::size_t, std::size_t);
    const char* name;
};

Dispatch pick() {
    // OBSLAB_SIMD=scalar forces the reference path (used by tests/benchmarks).
    const char* force = std::getenv("OBSLAB_SIMD");
    bool want_scalar = force != nullptr && std::strcmp(force, "scalar") == 0;
#if OBSLAB_HAVE_AVX2_KERNELS
    if (!want_scalar && avx2::supported())
        return {avx2::dot, avx2::weighted_abs_sum, avx2::axpy,
                avx2::gemv, avx2::gemv_t, avx2::gemm_acc, "avx2"};
#else
    (void)want_scalar;
#endif
    return {scalar::dot, scalar::weighted_abs_sum, scalar::axpy,
            scalar::gemv, scalar::gemv_t, scalar::gemm_acc, "scalar"};
}

const Dispatch& table() {
    static const Dispatch d = pick();
    return d;
}

} // namespace

double dot(const double* a, const double* b, std::size_t n) {
    return table().dot(a, b, n);
}
double weighted_abs_sum(const double* w, const double* v, std::size_t n) {
    return table().weighted_abs_sum(w, v, n);
}
void axpy(double alpha, const double* x, double* y, std::size_t n) {
    table().axpy(alpha, x, y, n);
}
void gemv(const double* a, std::size_t rows, std::size_t cols,
          const double* x, double* y) {
    table().gemv(a, rows, cols, x, y);
}
void gemv_t(const double* a, std::size_t rows, std::size_t cols,
            const double* coef, double* y) {
    table().gemv_t(a, rows, cols, coef, y);
}
void gemm_acc(const double* a, const double* b, double* c,
              std::size_t m, std::size_t k, std::size_t n) {
    table().gemm_acc(a, b, c, m, k, n);
}
const char* active_implementation() { return table().name; }

} // namespace obslab::kernels
