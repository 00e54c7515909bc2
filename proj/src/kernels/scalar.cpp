#include "kernels_impl.hpp"

#include <cmath>

namespace wmnv::kernels::detail {

namespace {

// std::complex operator* goes through the Annex G slow path; spell it out.
inline void cmul(const cplx &a, const cplx &b, double &re, double &im) {
    re = a.real() * b.real() - a.imag() * b.imag();
    im = a.real() * b.imag() + a.imag() * b.real();
}

void mul_scalar(const cplx *a, const cplx *b, cplx *out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double re, im;
        cmul(a[i], b[i], re, im);
        out[i] = {re, im};
    }
}

void mul_acc_scalar(const cplx *a, const cplx *b, cplx *out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double re, im;
        cmul(a[i], b[i], re, im);
        out[i] = {out[i].real() + re, out[i].imag() + im};
    }
}

void axpy_scalar(cplx alpha, const cplx *x, cplx *y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double re, im;
        cmul(alpha, x[i], re, im);
        y[i] = {y[i].real() + re, y[i].imag() + im};
    }
}

void scale_real_scalar(const double *s, const cplx *x, cplx *out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = {s[i] * x[i].real(), s[i] * x[i].imag()};
}

// Four interleaved partial sums, combined pairwise; the AVX2 variant uses the same split.
cplx sum_scalar(const cplx *x, std::size_t n) {
    double re[4] = {0, 0, 0, 0}, im[4] = {0, 0, 0, 0};
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        for (int l = 0; l < 4; ++l) {
            re[l] += x[i + l].real();
            im[l] += x[i + l].imag();
        }
    }
    for (int l = 0; i < n; ++i, ++l) {
        re[l] += x[i].real();
        im[l] += x[i].imag();
    }
    return {(re[0] + re[2]) + (re[1] + re[3]), (im[0] + im[2]) + (im[1] + im[3])};
}

double max_abs_scalar(const cplx *x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = std::sqrt(x[i].real() * x[i].real() + x[i].imag() * x[i].imag());
        if (std::isnan(a)) return a;
        if (a > m) m = a;
    }
    return m;
}

} // namespace

const KernelTable kScalarTable{Isa::Scalar, mul_scalar,        mul_acc_scalar, axpy_scalar,
                               scale_real_scalar, sum_scalar, max_abs_scalar};

} // namespace wmnv::kernels::detail
