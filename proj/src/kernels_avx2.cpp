// AVX2+FMA kernel variants.  This translation unit is compiled with
// -mavx2 -mfma; nothing here runs unless avx2::supported() said yes.

#include "obslab/kernels.hpp"

#if OBSLAB_HAVE_AVX2_KERNELS

#include <immintrin.h>

#include <cmath>
#include <cstring>

namespace obslab::kernels::avx2 {

bool supported() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

const __m256d kAbsMask =
    _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));

} // namespace

double dot(const double* a, const double* b, std::size_t n) {
    __m256d s0 = _mm256_setzero_pd();
    __m256d s1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
        s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                             _mm256_loadu_pd(b + i + 4), s1);
    }
    if (i + 4 <= n) {
        s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
        i += 4;
    }
    double s = hsum(_mm256_add_pd(s0, s1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double weighted_abs_sum(const double* w, const double* v, std::size_t n) {
    __m256d s0 = _mm256_setzero_pd();
    __m256d s1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d va = _mm256_and_pd(_mm256_loadu_pd(v + i), kAbsMask);
        __m256d vb = _mm256_and_pd(_mm256_loadu_pd(v + i + 4), kAbsMask);
        s0 = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), va, s0);
        s1 = _mm256_fmadd_pd(_mm256_loadu_pd(w + i + 4), vb, s1);
    }
    if (i + 4 <= n) {
        __m256d va = _mm256_and_pd(_mm256_loadu_pd(v + i), kAbsMask);
        s0 = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), va, s0);
        i += 4;
    }
    double s = hsum(_mm256_add_pd(s0, s1));
    for (; i < n; ++i) s += w[i] * std::fabs(v[i]);
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const double* a, std::size_t rows, std::size_t cols,
          const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r)
        y[r] = dot(a + r * cols, x, cols);
}

void gemv_t(const double* a, std::size_t rows, std::size_t cols,
            const double* coef, double* y) {
    std::memset(y, 0, cols * sizeof(double));
    std::size_t r = 0;
    // Two rows per pass keeps the y stream in registers longer.
    for (; r + 2 <= rows; r += 2) {
        __m256d c0 = _mm256_set1_pd(coef[r]);
        __m256d c1 = _mm256_set1_pd(coef[r + 1]);
        const double* row0 = a + r * cols;
        const double* row1 = row0 + cols;
        std::size_t i = 0;
        for (; i + 4 <= cols; i += 4) {
            __m256d vy = _mm256_loadu_pd(y + i);
            vy = _mm256_fmadd_pd(c0, _mm256_loadu_pd(row0 + i), vy);
            vy = _mm256_fmadd_pd(c1, _mm256_loadu_pd(row1 + i), vy);
            _mm256_storeu_pd(y + i, vy);
        }
        for (; i < cols; ++i)
            y[i] += coef[r] * row0[i] + coef[r + 1] * row1[i];
    }
    for (; r < rows; ++r) axpy(coef[r], a + r * cols, y, cols);
}

void gemm_acc(const double* a, const double* b, double* c,
              std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p)
            axpy(a[i * k + p], b + p * n, c + i * n, n);
}

} // namespace obslab::kernels::avx2

#endif // OBSLAB_HAVE_AVX2_KERNELS
