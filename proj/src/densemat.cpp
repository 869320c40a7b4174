#include "obslab/densemat.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "obslab/kernels.hpp"

namespace obslab::densemat {

Mat Mat::identity(std::size_t n) {
    Mat m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat mul(const Mat& x, const Mat& y) {
    Mat out(x.n);
    kernels::gemm_acc(x.a.data(), y.a.data(), out.a.data(), x.n, x.n, x.n);
    return out;
}

Mat add(const Mat& x, const Mat& y) {
    Mat out = x;
    for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] += y.a[i];
    return out;
}

void scale(Mat& x, double s) {
    for (double& v : x.a) v *= s;
}

Mat transpose(const Mat& x) {
    Mat out(x.n);
    for (std::size_t i = 0; i < x.n; ++i)
        for (std::size_t j = 0; j < x.n; ++j) out(j, i) = x(i, j);
    return out;
}

double norm1(const Mat& x) {
    double best = 0.0;
    for (std::size_t j = 0; j < x.n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.n; ++i) s += std::fabs(x(i, j));
        best = std::max(best, s);
    }
    return best;
}

void apply(const Mat& x, const double* v, double* y) {
    kernels::gemv(x.a.data(), x.n, x.n, v, y);
}

void solve_inplace(Mat x, std::vector<double>& b, std::size_t nrhs) {
    const std::size_t n = x.n;
    if (b.size() != n * nrhs) throw std::invalid_argument("solve: size mismatch");
    std::vector<std::size_t> piv(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::fabs(x(i, k)) > std::fabs(x(p, k))) p = i;
        piv[k] = p;
        if (x(p, k) == 0.0) throw std::runtime_error("solve: singular matrix");
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(x(k, j), x(p, j));
            for (std::size_t j = 0; j < nrhs; ++j)
                std::swap(b[k * nrhs + j], b[p * nrhs + j]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            double f = x(i, k) / x(k, k);
            x(i, k) = f;
            for (std::size_t j = k + 1; j < n; ++j) x(i, j) -= f * x(k, j);
            for (std::size_t j = 0; j < nrhs; ++j)
                b[i * nrhs + j] -= f * b[k * nrhs + j];
        }
    }
    for (std::size_t k = n; k-- > 0;) {
        for (std::size_t j = 0; j < nrhs; ++j) {
            double s = b[k * nrhs + j];
            for (std::size_t i = k + 1; i < n; ++i)
                s -= x(k, i) * b[i * nrhs + j];
            b[k * nrhs + j] = s / x(k, k);
        }
    }
}

Mat expm(const Mat& x) {
    // Higham's degree-13 Pade approximant with scaling and squaring.
    static const double b[] = {64764752532480000.0, 32382376266240000.0,
                               7771770303897600.0,  1187353796428800.0,
                               129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,
                               1323241920.0,        40840800.0,
                               960960.0,            16380.0,
                               182.0,               1.0};
    const double theta13 = 5.371920351148152;
    Mat a = x;
    double nrm = norm1(a);
    int s = 0;
    if (nrm > theta13) {
        s = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
        scale(a, std::ldexp(1.0, -s));
    }
    const std::size_t n = a.n;
    Mat a2 = mul(a, a);
    Mat a4 = mul(a2, a2);
    Mat a6 = mul(a2, a4);
    Mat id = Mat::identity(n);

    auto lincomb = [&](double c6, double c4, double c2, double c0) {
        Mat r(n);
        for (std::size_t i = 0; i < r.a.size(); ++i)
            r.a[i] = c6 * a6.a[i] + c4 * a4.a[i] + c2 * a2.a[i] + c0 * id.a[i];
        return r;
    };

    Mat u_inner = lincomb(b[13], b[11], b[9], 0.0);
    Mat u_poly = add(mul(a6, u_inner), lincomb(b[7], b[5], b[3], b[1]));
    Mat u = mul(a, u_poly);

    Mat v_inner = lincomb(b[12], b[10], b[8], 0.0);
    Mat v = add(mul(a6, v_inner), lincomb(b[6], b[4], b[2], b[0]));

    Mat vmu(n), vpu(n);
    for (std::size_t i = 0; i < v.a.size(); ++i) {
        vmu.a[i] = v.a[i] - u.a[i];
        vpu.a[i] = v.a[i] + u.a[i];
    }
    solve_inplace(vmu, vpu.a, n);
    Mat r;
    r.n = n;
    r.a = std::move(vpu.a);
    for (int i = 0; i < s; ++i) r = mul(r, r);
    return r;
}

} // namespace obslab::densemat
